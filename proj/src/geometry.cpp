#include "rel_euler/parallel.hpp"
#include "rel_euler/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "rel_euler/analysis.hpp"
#include "rel_euler/eos.hpp"
#include "rel_euler/tensor.hpp"

namespace rel_euler::geometry {

using tensor::eta;

namespace {

const Mat4& minkowski() {
    static const Mat4 m = Vec4(-1.0, 1.0, 1.0, 1.0).asDiagonal();
    return m;
}

Vec4 point_u(const FourVector& u, std::size_t j) { return Vec4(u[0][j], u[1][j], u[2][j], u[3][j]); }

}  // namespace

PointMetric metric_at(double h, const Vec4& u, double theta) {
    const double c2 = eos::cs2_from_enthalpy(h, theta);
    if (!(c2 > 0.0 && c2 <= 1.0)) throw eos::DomainError("acoustic metric: inadmissible sound speed");
    const Vec4 ul = minkowski() * u;
    PointMetric p;
    p.Omega = 1.0 / (c2 + (1.0 - c2) * u[0] * u[0]);
    p.upper = p.Omega * (c2 * minkowski() + (c2 - 1.0) * u * u.transpose());
    p.lower = (1.0 / p.Omega) * (minkowski() / c2 + (1.0 / c2 - 1.0) * ul * ul.transpose());
    return p;
}

Mat4 rest_metric_upper(double h0, double theta) { return metric_at(h0, Vec4(1, 0, 0, 0), theta).upper; }

Mat4 AcousticMetric::upper_at(std::size_t j) const {
    Mat4 m;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m(a, b) = upper[a][b][j];
    return m;
}

Mat4 AcousticMetric::lower_at(std::size_t j) const {
    Mat4 m;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m(a, b) = lower[a][b][j];
    return m;
}

namespace {

void allocate(AcousticMetric& M, const Grid& g) {
    M.grid = g;
    const std::size_t N = g.size();
    for (auto& row : M.lower)
        for (auto& x : row) x.assign(N, 0.0);
    for (auto& row : M.upper)
        for (auto& x : row) x.assign(N, 0.0);
    M.Omega.assign(N, 0.0);
}

void store(AcousticMetric& M, std::size_t j, const Mat4& up, const Mat4& lo) {
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            M.upper[a][b][j] = up(a, b);
            M.lower[a][b][j] = lo(a, b);
        }
}

}  // namespace

AcousticMetric acoustic_metric(const FieldSet& f) {
    AcousticMetric M;
    allocate(M, f.grid);
    const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(f.grid.size());
    ExceptionSlot ex;
#pragma omp parallel for
    for (std::ptrdiff_t j = 0; j < N; ++j)
        ex.run([&] {
            const PointMetric p = metric_at(f.h[j], point_u(f.u, j), f.theta);
            store(M, j, p.upper, p.lower);
            M.Omega[j] = p.Omega;
        });
    ex.rethrow();
    return M;
}

MetricCheck check_metric(const AcousticMetric& M) {
    MetricCheck c;
    for (std::size_t j = 0; j < M.grid.size(); ++j) {
        const Mat4 up = M.upper_at(j), lo = M.lower_at(j);
        c.g00_defect = std::max(c.g00_defect, std::abs(up(0, 0) + 1.0));
        c.inverse_defect = std::max(c.inverse_defect, (up * lo - Mat4::Identity()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(up.bottomRightCorner<3, 3>());
        if (es.eigenvalues().minCoeff() <= 0.0 || up.determinant() >= 0.0) c.lorentzian = false;
    }
    return c;
}

Scalar smooth_bump(const Grid& g, double r_in, double r_out) {
    if (!(r_out > r_in && r_in >= 0.0)) throw std::invalid_argument("smooth_bump: need 0 <= r_in < r_out");
    Scalar chi(g.size());
    const double c = 0.5 * g.L;
    for (std::size_t j = 0; j < chi.size(); ++j) {
        const auto x = g.coord(j);
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) r2 += (x[a] - c) * (x[a] - c);
        chi[j] = analysis::eta_cutoff(1.0 + (std::sqrt(r2) - r_in) / (r_out - r_in));
    }
    return chi;
}

AcousticMetric truncate_metric(const AcousticMetric& M, const Scalar& chi, const Mat4& g0) {
    if (chi.size() != M.grid.size()) throw std::invalid_argument("truncate_metric: cutoff size mismatch");
    AcousticMetric T;
    allocate(T, M.grid);
    for (std::size_t j = 0; j < chi.size(); ++j) {
        const Mat4 up = chi[j] * (M.upper_at(j) - g0) + g0;
        store(T, j, up, up.inverse());
        T.Omega[j] = M.Omega[j];
    }
    return T;
}

std::array<double, 4> minors(const Vec4& u) {
    const double a = u[0] * u[0], b = u[1] * u[1], c = u[2] * u[2];
    return {-1.0 + 2.0 * a, -1.0 + 2.0 * (a - b), -1.0 + 2.0 * (a - b - c), 1.0};
}

std::array<double, 4> minors_determinant(const Vec4& u) {
    const Mat4 P = minkowski() + 2.0 * u * u.transpose();
    return {P(0, 0), P.topLeftCorner<2, 2>().determinant(), P.topLeftCorner<3, 3>().determinant(), P.determinant()};
}

// ---------------------------------------------------------------- elliptic

StField apply_P(const StVector& u, const StField& f) {
    std::array<StField, 4> df;
    for (int b = 0; b < 4; ++b) df[b] = f.d(b);
    StField r = f;
    for (int b = 0; b < 4; ++b)
        for (int c = b; c < 4; ++c) {
            StField coef = 2.0 * (u[b] * u[c]);
            if (b == c) coef += eta(b);
            if (b != c) coef *= 2.0;
            r -= coef * df[b].d(c);
        }
    return r;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for reduction(+ : s) if (n > 32768)
    for (std::ptrdiff_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

// inverse of the constant-coefficient operator with P^{bc} at the mean velocity
struct Preconditioner {
    std::shared_ptr<const StLayout> L;
    Mat4 Pbar;
    StField operator()(const StField& r) const {
        StField out(L, 0.0);
        const int dim = L->grid.dim;
        L->spacetime->apply(r.values().data(), out.values().data(), [&](const WaveVec& k) {
            double q = 1.0;
            for (int b = 0; b <= dim; ++b)
                for (int c = 0; c <= dim; ++c) q += Pbar(b, c) * k[b] * k[c];
            return std::complex<double>(1.0 / q, 0.0);
        });
        return out;
    }
};

}  // namespace

StField solve_P(const StVector& u, const StField& rhs, SolveStats* stats, double tol, int max_iter) {
    const auto& L = rhs.layout_ptr();
    if (L->mode != TimeMode::Periodic) throw std::invalid_argument("solve_P: needs a space-time periodic layout");
    Vec4 ubar;
    for (int a = 0; a < 4; ++a) {
        double s = 0.0;
        for (double x : u[a].values()) s += x;
        ubar[a] = s / static_cast<double>(u[a].values().size());
    }
    ubar[0] = std::sqrt(1.0 + ubar.tail<3>().squaredNorm());
    const Preconditioner M{L, minkowski() + 2.0 * ubar * ubar.transpose()};

    SolveStats st;
    const double bnorm = std::sqrt(dot(rhs.values(), rhs.values()));
    StField x(L, 0.0);
    if (bnorm == 0.0) {
        if (stats) *stats = st;
        return x;
    }
    // right-preconditioned BiCGSTAB
    StField r = rhs, rhat = rhs, p(L, 0.0), v(L, 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 1; it <= max_iter; ++it) {
        const double rho1 = dot(rhat.values(), r.values());
        if (rho1 == 0.0) break;
        const double beta = (rho1 / rho) * (alpha / omega);
        rho = rho1;
        p = r + beta * (p - omega * v);
        const StField ph = M(p);
        v = apply_P(u, ph);
        alpha = rho / dot(rhat.values(), v.values());
        StField s = r - alpha * v;
        x += alpha * ph;
        double sn = std::sqrt(dot(s.values(), s.values())) / bnorm;
        if (sn < tol) {
            st.iterations = it;
            st.history.push_back(sn);
            r = s;
            break;
        }
        const StField sh = M(s);
        const StField t = apply_P(u, sh);
        omega = dot(t.values(), s.values()) / dot(t.values(), t.values());
        x += omega * sh;
        r = s - omega * t;
        const double rn = std::sqrt(dot(r.values(), r.values())) / bnorm;
        st.history.push_back(rn);
        st.iterations = it;
        if (rn < tol) break;
    }
    const StField res = apply_P(u, x) - rhs;
    st.residual = std::sqrt(dot(res.values(), res.values())) / bnorm;
    if (stats) *stats = st;
    if (!(st.residual < std::max(tol * 100.0, 1e-10)))
        throw NoConvergence("solve_P: no convergence, residual " + std::to_string(st.residual), st.history);
    return x;
}

Split elliptic_split(const vorticity::StState& s, const StVector& W, double tol) {
    Split sp;
    const StField emh = exp(-1.0 * s.h);
    for (int a = 0; a < 4; ++a) {
        SolveStats st;
        sp.u_minus[a] = solve_P(s.u, emh * W[a], &st, tol);
        sp.u_plus[a] = s.u[a] - sp.u_minus[a];
        sp.max_iterations = std::max(sp.max_iterations, st.iterations);
        sp.max_residual = std::max(sp.max_residual, st.residual);
    }
    return sp;
}

namespace {

// sum of a cos + b sin over integer space-time modes with |m|_inf <= band
StField trig_field(std::shared_ptr<const StLayout> L, std::mt19937_64& rng, int band, double decay_pow) {
    std::normal_distribution<double> nd;
    const int dim = L->grid.dim;
    const double period = L->spacing * L->nt;
    StField f(L, 0.0);
    std::vector<int> m(dim + 1, -band);
    auto& v = f.values();
    while (true) {
        int first = 0;
        for (int x : m)
            if (x != 0) {
                first = x;
                break;
            }
        if (first > 0) {
            double k2 = 0.0;
            for (int x : m) k2 += x * x;
            const double w = std::pow(1.0 + k2, -decay_pow);
            const double a = w * nd(rng), b = w * nd(rng);
            for (int k = 0; k < L->nt; ++k) {
                const double t = L->spacing * k;
                for (std::size_t j = 0; j < L->slice; ++j) {
                    const auto x = L->grid.coord(j);
                    double ph = 2.0 * std::numbers::pi * m[0] * t / period;
                    for (int q = 0; q < dim; ++q) ph += 2.0 * std::numbers::pi * m[q + 1] * x[q] / L->grid.L;
                    v[k * L->slice + j] += a * std::cos(ph) + b * std::sin(ph);
                }
            }
        }
        int q = 0;
        while (q <= dim && ++m[q] > band) m[q++] = -band;
        if (q > dim) break;
    }
    return f;
}

}  // namespace

StVector synthetic_velocity(std::shared_ptr<const StLayout> L, double amplitude, std::uint64_t seed, int band) {
    std::mt19937_64 rng(seed);
    StVector u;
    StField s(L, 1.0);
    for (int i = 1; i < 4; ++i) {
        u[i] = trig_field(L, rng, band, 1.0);
        double m = 0.0;
        for (double x : u[i].values()) m = std::max(m, std::abs(x));
        if (m > 0.0) u[i] *= amplitude / m;
        s += u[i] * u[i];
    }
    u[0] = sqrt(s);
    return u;
}

StField random_spacetime(std::shared_ptr<const StLayout> L, std::uint64_t seed, int band) {
    std::mt19937_64 rng(seed);
    StField f = trig_field(L, rng, band, 0.5);
    const double r = l2_norm(f);
    if (r > 0.0) f *= 1.0 / r;
    return f;
}

double spacetime_sobolev(const StField& f, double a) {
    const StLayout& L = f.layout();
    const auto spec = L.space->forward(f.values().data());
    const std::size_t half = spec.size() / L.nt;
    double s = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const std::size_t m = i % half;
        double k2 = 0.0;
        for (double x : L.space->wave(m)) k2 += x * x;
        s += L.space->hermitian_weight(m) * std::norm(spec[i]) * std::pow(1.0 + k2, a);
    }
    return std::sqrt(s * std::pow(L.grid.L, L.grid.dim) * L.spacing);
}

ManufacturedResult manufactured_solve(int dim, int n, int nt, double amplitude, std::uint64_t seed) {
    Grid g{dim, n, 2.0 * std::numbers::pi};
    auto L = StLayout::periodic(g, nt, 2.0 * std::numbers::pi);
    const StVector u = synthetic_velocity(L, amplitude, seed, 1);
    const StField v = random_spacetime(L, seed + 1, 1);
    const StField f = apply_P(u, v);
    ManufacturedResult r;
    const StField x = solve_P(u, f, &r.stats, 1e-13);
    const StField e = x - v;
    r.rel_l2_error = l2_norm(e) / l2_norm(v);
    return r;
}

std::vector<EllipConstant> ellip_constants(int dim, int n, int nt, int count, std::uint64_t seed, double amplitude,
                                           const std::vector<double>& as) {
    Grid g{dim, n, 2.0 * std::numbers::pi};
    auto L = StLayout::periodic(g, nt, 2.0 * std::numbers::pi);
    const StVector u = synthetic_velocity(L, amplitude, seed, 1);
    std::vector<EllipConstant> out;
    for (double a : as) out.push_back({a, 0.0});
    for (int i = 0; i < count; ++i) {
        const StField v = random_spacetime(L, seed + 1000 + i, 1);
        const StField Pv = apply_P(u, v);
        for (auto& e : out)
            e.max_ratio = std::max(e.max_ratio, spacetime_sobolev(v, e.a) / spacetime_sobolev(Pv, e.a - 2.0));
    }
    return out;
}

// ---------------------------------------------------------------- waves

SpatialMetric spatial_part(const AcousticMetric& M) {
    SpatialMetric S;
    S.grid = M.grid;
    for (int i = 0; i < 3; ++i) {
        S.g0i[i] = M.upper[0][i + 1];
        for (int j = 0; j < 3; ++j) S.gij[i][j] = M.upper[i + 1][j + 1];
    }
    return S;
}

SpatialMetric uniform_metric(const Grid& g, const Mat4& up) {
    SpatialMetric S;
    S.grid = g;
    const std::size_t N = g.size();
    for (int i = 0; i < 3; ++i) {
        S.g0i[i].assign(N, up(0, i + 1));
        for (int j = 0; j < 3; ++j) S.gij[i][j].assign(N, up(i + 1, j + 1));
    }
    return S;
}

SpatialMetric flat_metric(const Grid& g) { return uniform_metric(g, minkowski()); }

double max_wave_speed(const SpatialMetric& M) {
    double c = 0.0;
    for (std::size_t j = 0; j < M.grid.size(); ++j) {
        Eigen::Matrix3d G;
        Eigen::Vector3d b;
        for (int i = 0; i < 3; ++i) {
            b[i] = M.g0i[i][j];
            for (int k = 0; k < 3; ++k) G(i, k) = M.gij[i][k][j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(G);
        const double lam = std::max(0.0, es.eigenvalues().maxCoeff());
        c = std::max(c, b.norm() + std::sqrt(b.squaredNorm() + lam));
    }
    return c;
}

namespace {

struct WaveOp {
    const SpatialMetric& M;
    bool dealias;
    // 2 g^{0i} d_i ft + g^{ij} d_ij f
    Scalar spatial(const Scalar& f, const Scalar& ft) const {
        const Grid& g = M.grid;
        const std::size_t N = g.size();
        Scalar r(N, 0.0);
        for (int i = 1; i <= g.dim; ++i) {
            const Scalar dft = spectral_derivative(g, ft, i, dealias);
            const Scalar df = spectral_derivative(g, f, i, dealias);
            for (std::size_t j = 0; j < N; ++j) r[j] += 2.0 * M.g0i[i - 1][j] * dft[j];
            for (int k = i; k <= g.dim; ++k) {
                const Scalar d2 = spectral_derivative(g, df, k, dealias);
                const double w = (k == i) ? 1.0 : 2.0;
                for (std::size_t j = 0; j < N; ++j) r[j] += w * M.gij[i - 1][k - 1][j] * d2[j];
            }
        }
        return r;
    }
};

void axpy(Scalar& y, double a, const Scalar& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

std::vector<WaveSample> linear_wave_solve(const SpatialMetric& M, const Scalar& f0, const Scalar& f1,
                                          const Forcing& forcing, const WaveConfig& cfg) {
    const Grid& g = M.grid;
    if (f0.size() != g.size() || f1.size() != g.size()) throw std::invalid_argument("linear_wave_solve: data size");
    if (!(cfg.dt > 0.0) || !(cfg.T >= 0.0)) throw std::invalid_argument("linear_wave_solve: need dt > 0, T >= 0");
    const double kmax = std::numbers::pi / g.dx() * std::sqrt(static_cast<double>(g.dim));
    const double cfl = cfg.dt * max_wave_speed(M) * kmax;
    if (cfl > cfg.cfl_limit) throw CflBreach("linear_wave_solve: CFL number " + std::to_string(cfl));
    const WaveOp op{M, cfg.dealias};
    const long steps = std::lround(cfg.T / cfg.dt);
    const double dt = steps > 0 ? cfg.T / static_cast<double>(steps) : cfg.dt;
    auto rhs = [&](double t, const Scalar& f, const Scalar& ft) {
        Scalar a = op.spatial(f, ft);
        if (forcing) axpy(a, -1.0, forcing(t));
        return a;
    };
    std::vector<WaveSample> out;
    WaveSample cur{0.0, f0, f1};
    out.push_back(cur);
    for (long s = 1; s <= steps; ++s) {
        const double t = cur.t;
        const Scalar& f = cur.f;
        const Scalar& v = cur.ft;
        const Scalar a1 = rhs(t, f, v);
        Scalar f2 = f, v2 = v;
        axpy(f2, 0.5 * dt, v);
        axpy(v2, 0.5 * dt, a1);
        const Scalar a2 = rhs(t + 0.5 * dt, f2, v2);
        Scalar f3 = f, v3 = v;
        axpy(f3, 0.5 * dt, v2);
        axpy(v3, 0.5 * dt, a2);
        const Scalar a3 = rhs(t + 0.5 * dt, f3, v3);
        Scalar f4 = f, v4 = v;
        axpy(f4, dt, v3);
        axpy(v4, dt, a3);
        const Scalar a4 = rhs(t + dt, f4, v4);
        WaveSample nx{t + dt, f, v};
        for (std::size_t j = 0; j < f.size(); ++j) {
            nx.f[j] += dt / 6.0 * (v[j] + 2.0 * v2[j] + 2.0 * v3[j] + v4[j]);
            nx.ft[j] += dt / 6.0 * (a1[j] + 2.0 * a2[j] + 2.0 * a3[j] + a4[j]);
        }
        cur = std::move(nx);
        if (s % std::max(1, cfg.sample_every) == 0 || s == steps) out.push_back(cur);
    }
    return out;
}

double wave_energy(const SpatialMetric& M, const Scalar& f, const Scalar& ft) {
    const Grid& g = M.grid;
    std::vector<Scalar> df;
    for (int i = 1; i <= g.dim; ++i) df.push_back(spectral_derivative(g, f, i));
    double e = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        e += ft[j] * ft[j];
        for (int i = 0; i < g.dim; ++i)
            for (int k = 0; k < g.dim; ++k) e += M.gij[i][k][j] * df[i][j] * df[k][j];
    }
    return e * std::pow(g.dx(), g.dim);
}

DuhamelResult duhamel_check(const SpatialMetric& M, const DuhamelSource& src, double T, int steps, bool dealias) {
    if (steps < 8) throw std::invalid_argument("duhamel_check: need at least 8 steps");
    const Grid& g = M.grid;
    const std::size_t N = g.size();
    const double dt = T / steps;
    // f(t_k; tau_j) for k >= j, and its time derivative
    std::vector<std::vector<Scalar>> f(steps + 1), ft(steps + 1);
    ExceptionSlot ex;
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j <= steps; ++j)
        ex.run([&] {
            WaveConfig cfg;
            cfg.dt = dt;
            cfg.T = (steps - j) * dt;
            cfg.dealias = dealias;
            const auto tr = linear_wave_solve(M, src.F(j * dt), Scalar(N, 0.0), nullptr, cfg);
            for (const auto& s : tr) {
                f[j].push_back(s.f);
                ft[j].push_back(s.ft);
            }
        });
    ex.rethrow();
    // phi(t_k) and phi_t(t_k) by the trapezoid rule over tau in [0, t_k]
    std::vector<Scalar> phi(steps + 1, Scalar(N, 0.0)), phit(steps + 1, Scalar(N, 0.0));
    for (int k = 0; k <= steps; ++k) {
        phit[k] = src.F(k * dt);
        for (int j = 0; j <= k; ++j) {
            const double w = (k == 0) ? 0.0 : ((j == 0 || j == k) ? 0.5 * dt : dt);
            axpy(phi[k], w, f[j][k - j]);
            axpy(phit[k], w, ft[j][k - j]);
        }
    }
    DuhamelResult r;
    r.steps = steps;
    r.phi0 = analysis::linf_norm(phi[0]);
    {
        Scalar d = phit[0];
        axpy(d, -1.0, src.F(0.0));
        r.phit0 = analysis::linf_norm(d);
    }
    const WaveOp op{M, dealias};
    const double vol = std::pow(g.dx(), g.dim);
    double ss = 0.0, sp = 0.0, sr = 0.0;
    for (int k = 2; k <= steps - 2; ++k) {
        Scalar phitt(N);
        for (std::size_t j = 0; j < N; ++j)
            phitt[j] = (-phit[k + 2][j] + 8.0 * phit[k + 1][j] - 8.0 * phit[k - 1][j] + phit[k - 2][j]) / (12.0 * dt);
        Scalar box = op.spatial(phi[k], phit[k]);
        axpy(box, -1.0, phitt);
        const Scalar F = src.F(k * dt), dF = src.dF(k * dt);
        Scalar cross(N, 0.0);  // g^{0i} d_i F
        for (int i = 1; i <= g.dim; ++i) {
            const Scalar d = spectral_derivative(g, F, i, dealias);
            for (std::size_t j = 0; j < N; ++j) cross[j] += M.g0i[i - 1][j] * d[j];
        }
        for (std::size_t j = 0; j < N; ++j) {
            const double rhs = -dF[j] + 2.0 * cross[j];
            const double printed = -dF[j] + cross[j];
            ss += (box[j] - rhs) * (box[j] - rhs);
            sp += (box[j] - printed) * (box[j] - printed);
            sr += rhs * rhs;
        }
    }
    const double w = vol * dt;
    r.residual = std::sqrt(ss * w);
    r.printed_residual = std::sqrt(sp * w);
    r.rhs_norm = std::sqrt(sr * w);
    return r;
}

// ---------------------------------------------------------------- geodesics

MetricSampler constant_sampler(const Mat4& up) {
    MetricSampler s;
    s.upper = [up](const Vec4&) { return up; };
    s.d_upper = [](const Vec4&) {
        std::array<Mat4, 4> z;
        for (auto& m : z) m.setZero();
        return z;
    };
    return s;
}

MetricSampler interpolated_sampler(const AcousticMetric& M, double t_min, double t_max) {
    struct Coeffs {
        Grid grid;
        std::vector<std::vector<double>> k;  // wave vectors
        std::vector<double> w;
        Sym4<std::vector<std::complex<double>>> c;
    };
    auto C = std::make_shared<Coeffs>();
    C->grid = M.grid;
    auto box = M.grid.box();
    const std::size_t half = box->spectrum_size();
    for (std::size_t i = 0; i < half; ++i) {
        C->k.push_back(box->wave(i));
        C->w.push_back(box->hermitian_weight(i));
    }
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) C->c[a][b] = box->forward(M.upper[a][b].data());
    // value and spatial gradient of all components at x
    auto eval = [C](const Vec4& x, Mat4* val, std::array<Mat4, 4>* grad) {
        const int dim = C->grid.dim;
        if (val) val->setZero();
        if (grad)
            for (auto& m : *grad) m.setZero();
        for (std::size_t i = 0; i < C->k.size(); ++i) {
            double ph = 0.0;
            for (int q = 0; q < dim; ++q) ph += C->k[i][q] * x[q + 1];
            const std::complex<double> e = C->w[i] * std::complex<double>(std::cos(ph), std::sin(ph));
            for (int a = 0; a < 4; ++a)
                for (int b = a; b < 4; ++b) {
                    const std::complex<double> z = C->c[a][b][i] * e;
                    if (val) (*val)(a, b) += z.real();
                    if (grad)
                        for (int q = 0; q < dim; ++q) (*grad)[q + 1](a, b) += -C->k[i][q] * z.imag();
                }
        }
        auto sym = [](Mat4& m) {
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < a; ++b) m(a, b) = m(b, a);
        };
        if (val) sym(*val);
        if (grad)
            for (auto& m : *grad) sym(m);
    };
    MetricSampler s;
    s.upper = [eval](const Vec4& x) {
        Mat4 m;
        eval(x, &m, nullptr);
        return m;
    };
    s.d_upper = [eval](const Vec4& x) {
        std::array<Mat4, 4> d;
        eval(x, nullptr, &d);
        return d;
    };
    s.t_min = t_min;
    s.t_max = t_max;
    return s;
}

namespace {

struct Phase {
    Vec4 x, xi;
};

Phase hamilton(const MetricSampler& M, const Phase& p) {
    const Mat4 g = M.upper(p.x);
    const auto dg = M.d_upper(p.x);
    Phase r;
    r.x = g * p.xi;
    for (int a = 0; a < 4; ++a) r.xi[a] = -0.5 * p.xi.dot(dg[a] * p.xi);
    return r;
}

// future-directed null xi_0 for given spatial xi: g^{00} x^2 + 2 x b + c = 0
double null_xi0(const Mat4& g, const Vec4& xi) {
    const double A = g(0, 0);
    double b = 0.0, c = 0.0;
    for (int i = 1; i < 4; ++i) {
        b += g(0, i) * xi[i];
        for (int j = 1; j < 4; ++j) c += g(i, j) * xi[i] * xi[j];
    }
    const double disc = std::sqrt(std::max(0.0, b * b - A * c));
    // dx^0/ds = g^{00} xi_0 + b > 0
    const double r1 = (-b + disc) / A, r2 = (-b - disc) / A;
    return (A * r1 + b > 0.0) ? r1 : r2;
}

}  // namespace

GeodesicTrace null_geodesic_trace(const MetricSampler& M, const Vec4& x0, const Vec4& xi0, double ds, int steps) {
    GeodesicTrace tr;
    Phase p{x0, xi0};
    const Mat4 g0 = M.upper(x0);
    const double H0 = xi0.dot(g0 * xi0);
    if (std::abs(H0) > 1e-12 * std::max(1.0, xi0.squaredNorm())) {
        p.xi[0] = null_xi0(g0, xi0);
        tr.projected = true;
    }
    auto record = [&](double s) {
        const double H = p.xi.dot(M.upper(p.x) * p.xi);
        tr.points.push_back({s, p.x, p.xi, H});
        tr.max_abs_H = std::max(tr.max_abs_H, std::abs(H));
    };
    record(0.0);
    for (int k = 1; k <= steps; ++k) {
        const Phase k1 = hamilton(M, p);
        const Phase k2 = hamilton(M, {p.x + 0.5 * ds * k1.x, p.xi + 0.5 * ds * k1.xi});
        const Phase k3 = hamilton(M, {p.x + 0.5 * ds * k2.x, p.xi + 0.5 * ds * k2.xi});
        const Phase k4 = hamilton(M, {p.x + ds * k3.x, p.xi + ds * k3.xi});
        Phase nx{p.x + ds / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
                 p.xi + ds / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi)};
        if (nx.x[0] < M.t_min || nx.x[0] > M.t_max) {
            tr.truncated = true;
            break;
        }
        p = nx;
        record(k * ds);
    }
    return tr;
}

std::string trace_csv(const GeodesicTrace& tr) {
    std::ostringstream os;
    os << "s,t,x1,x2,x3,xi0,xi1,xi2,xi3,H\n";
    char buf[512];
    for (const auto& p : tr.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.s, p.x[0],
                      p.x[1], p.x[2], p.x[3], p.xi[0], p.xi[1], p.xi[2], p.xi[3], p.H);
        os << buf;
    }
    return os.str();
}

// ---------------------------------------------------------------- null frame

NullFrame null_frame(const Mat4& g, double phi1, double phi2) {
    if (std::abs(g(0, 0) + 1.0) > 1e-10) throw std::invalid_argument("null_frame: needs g^{00} = -1");
    NullFrame fr;
    // k = dx3 - dphi = (-phi_t, -phi1, -phi2, 1); with x = k_0: -x^2 + 2 b x + c = 0
    Vec4 k(0.0, -phi1, -phi2, 1.0);
    double b = 0.0, c = 0.0;
    for (int i = 1; i < 4; ++i) {
        b += g(0, i) * k[i];
        for (int j = 1; j < 4; ++j) c += g(i, j) * k[i] * k[j];
    }
    const double disc = std::sqrt(b * b + c);
    // root with <dt, k>_g = -x + b = +disc
    Vec4 k_other = k;
    k_other[0] = b + disc;
    fr.other_branch_negative = (g * k_other)[0] < 0.0;
    k[0] = b - disc;
    fr.phi_t = -k[0];
    const Vec4 ks = g * k;
    fr.dt_k = ks[0];
    fr.l = ks / fr.dt_k;
    fr.n = -g.col(0);
    fr.lbar = fr.l - 2.0 * fr.n;
    const Mat4 lo = g.inverse();
    auto ip = [&](const Vec4& a, const Vec4& bb) { return a.dot(lo * bb); };
    Vec4 v1(0.0, 1.0, 0.0, phi1), v2(0.0, 0.0, 1.0, phi2);
    fr.e1 = v1 / std::sqrt(ip(v1, v1));
    Vec4 w = v2 - ip(v2, fr.e1) * fr.e1;
    fr.e2 = w / std::sqrt(ip(w, w));
    return fr;
}

double FrameRelations::max() const { return std::max({ll, lblb, llb, ee, le, lbe, dtl}); }

FrameRelations frame_relations(const Mat4& lo, const NullFrame& f) {
    auto ip = [&](const Vec4& a, const Vec4& b) { return a.dot(lo * b); };
    FrameRelations r;
    r.ll = std::abs(ip(f.l, f.l));
    r.lblb = std::abs(ip(f.lbar, f.lbar));
    r.llb = std::abs(ip(f.l, f.lbar) - 2.0);
    r.ee = std::max({std::abs(ip(f.e1, f.e1) - 1.0), std::abs(ip(f.e2, f.e2) - 1.0), std::abs(ip(f.e1, f.e2))});
    r.le = std::max(std::abs(ip(f.l, f.e1)), std::abs(ip(f.l, f.e2)));
    r.lbe = std::max(std::abs(ip(f.lbar, f.e1)), std::abs(ip(f.lbar, f.e2)));
    r.dtl = std::abs(f.l[0] - 1.0);
    return r;
}

ConnectionCoefficients connection_coefficients(const vorticity::StState& s, const StField& phi) {
    const auto& L = s.layout;
    const std::size_t N = L->size();
    Sym4<StField> lo;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) lo[a][b] = StField(L, 0.0);
    std::array<StField, 4> l, lb, e1, e2;
    for (int a = 0; a < 4; ++a) l[a] = lb[a] = e1[a] = e2[a] = StField(L, 0.0);
    const StField p1 = phi.d(1), p2 = phi.d(2);
    for (std::size_t j = 0; j < N; ++j) {
        Vec4 u;
        for (int a = 0; a < 4; ++a) u[a] = s.u[a].values()[j];
        const PointMetric m = metric_at(s.h.values()[j], u, s.theta);
        const NullFrame f = null_frame(m.upper, p1.values()[j], p2.values()[j]);
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                lo[a][b].values()[j] = m.lower(a, b);
            }
            l[a].values()[j] = f.l[a];
            lb[a].values()[j] = f.lbar[a];
            e1[a].values()[j] = f.e1[a];
            e2[a].values()[j] = f.e2[a];
        }
    }
    // Gamma_{d b c} = 1/2 (d_b g_{dc} + d_c g_{db} - d_d g_{bc}), lower first index
    std::array<Sym4<StField>, 4> dg;
    for (int c = 0; c < 4; ++c)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) dg[c][a][b] = lo[a][b].d(c);
    // <D_X Y, Z> = g_{ab} X^c d_c Y^a Z^b + Gamma_{d b c} Z^d X^b Y^c
    auto inner_D = [&](const std::array<StField, 4>& X, const std::array<StField, 4>& Y,
                       const std::array<StField, 4>& Z) {
        const std::size_t b0 = static_cast<std::size_t>(L->eval_slice) * L->slice;
        std::array<std::array<Scalar, 4>, 4> dY;
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) dY[a][c] = Y[a].d(c).slice(L->eval_slice);
        Scalar out(L->slice, 0.0);
        for (std::size_t q = 0; q < L->slice; ++q) {
            const std::size_t j = b0 + q;
            double v = 0.0;
            for (int a = 0; a < 4; ++a) {
                double XdY = 0.0;
                for (int c = 0; c < 4; ++c) XdY += X[c].values()[j] * dY[a][c][q];
                for (int b = 0; b < 4; ++b) v += lo[a][b].values()[j] * XdY * Z[b].values()[j];
            }
            for (int d = 0; d < 4; ++d)
                for (int b = 0; b < 4; ++b)
                    for (int c = 0; c < 4; ++c) {
                        const double G = 0.5 * (dg[b][d][c].values()[j] + dg[c][d][b].values()[j] -
                                                dg[d][b][c].values()[j]);
                        v += G * Z[d].values()[j] * X[b].values()[j] * Y[c].values()[j];
                    }
            out[q] = v;
        }
        return out;
    };
    const std::array<const std::array<StField, 4>*, 2> e{&e1, &e2};
    ConnectionCoefficients cc;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            cc.chi[a][b] = inner_D(*e[a], l, *e[b]);
            cc.mu0[a][b] = inner_D(l, *e[a], *e[b]);
        }
    cc.l_ln_sigma = inner_D(l, lb, l);
    for (double& x : cc.l_ln_sigma) x *= 0.5;
    return cc;
}

}  // namespace rel_euler::geometry
