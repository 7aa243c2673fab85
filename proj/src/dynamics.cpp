#include "rel_euler/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "rel_euler/eos.hpp"
#include "rel_euler/kernels.hpp"
#include "rel_euler/qh_system.hpp"
#include "rel_euler/tensor.hpp"

namespace rel_euler::dynamics {

void RunConfig::validate() const {
    grid.validate();
    eos::check_theta(theta);
    if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("cfl must lie in (0,1)");
    if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be non-negative");
    if (fixed_dt < 0.0) throw std::invalid_argument("fixed_dt must be non-negative");
    if (snapshot_every < 0 || speed_every < 1) throw std::invalid_argument("bad cadence");
}

std::array<Mat4, 4> assemble_flux_matrices(const Eigen::Vector4d& U, double theta) {
    if (!(U[0] > 0.0) || eos::cs2_from_pressure(U[0], theta) > 1.0)
        throw eos::DomainError("flux matrices: inadmissible pressure");
    auto m = qh::matrices<double>(U[0], {U[1], U[2], U[3]}, theta);
    std::array<Mat4, 4> A;
    for (int a = 0; a < 4; ++a)
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) A[a](r, c) = m.A[a][r][c];
    return A;
}

std::array<double, 4> characteristic_speeds(const Eigen::Vector4d& U, const Eigen::Vector3d& n, double theta) {
    auto A = assemble_flux_matrices(U, theta);
    Mat4 N = n[0] * A[1] + n[1] * A[2] + n[2] * A[3];
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat4> es(N, A[0]);
    if (es.info() != Eigen::Success) throw InadmissibleState("characteristic speeds: eigensolver failed");
    std::array<double, 4> l;
    for (int k = 0; k < 4; ++k) l[k] = es.eigenvalues()[k];
    std::sort(l.begin(), l.end());
    return l;
}

double max_characteristic_speed(const HyperbolicState& s) {
    const std::size_t n = s.p.size();
    double m = 0.0;
    long bad = static_cast<long>(n);
    const auto ni = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for reduction(max : m) reduction(min : bad) if (ni > 1024)
    for (std::ptrdiff_t j = 0; j < ni; ++j) {
        Eigen::Vector4d U(s.p[j], s.u[0][j], s.u[1][j], s.u[2][j]);
        if (!(U[0] > 0.0) || !(eos::cs2_from_pressure(U[0], s.theta) <= 1.0) || !U.allFinite()) {
            bad = std::min(bad, static_cast<long>(j));
            continue;
        }
        try {
            for (int a = 0; a < 3; ++a) {
                Eigen::Vector3d e = Eigen::Vector3d::Zero();
                e[a] = 1.0;
                auto l = characteristic_speeds(U, e, s.theta);
                m = std::max({m, std::abs(l[0]), std::abs(l[3])});
            }
        } catch (const std::exception&) {
            bad = std::min(bad, static_cast<long>(j));
        }
    }
    if (bad < static_cast<long>(n)) throw InadmissibleState("inadmissible state at grid point " + std::to_string(bad));
    return m;
}

HyperbolicState time_derivative(const HyperbolicState& s, bool dealias) {
    const Grid& g = s.grid;
    const std::size_t n = g.size();
    std::array<const Scalar*, 4> U{&s.p, &s.u[0], &s.u[1], &s.u[2]};
    std::array<std::array<Scalar, 4>, 3> dU;
    kernels::QhInput in;
    in.theta = s.theta;
    in.n = n;
    for (int c = 0; c < 4; ++c) in.U[c] = U[c]->data();
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 4; ++c) {
            if (i < g.dim) {
                dU[i][c] = spectral_derivative(g, *U[c], i + 1, dealias);
                in.dU[i][c] = dU[i][c].data();
            } else {
                in.dU[i][c] = nullptr;
            }
        }
    HyperbolicState r = s;
    const long bad = kernels::qh_rhs(in, {r.p.data(), r.u[0].data(), r.u[1].data(), r.u[2].data()});
    if (bad >= 0) throw InadmissibleState("inadmissible state at grid point " + std::to_string(bad));
    return r;
}

namespace {

HyperbolicState combine(const HyperbolicState& s, double a, const HyperbolicState& k) {
    HyperbolicState r = s;
    kernels::axpy(a, k.p.data(), r.p.data(), r.p.size());
    for (int i = 0; i < 3; ++i) kernels::axpy(a, k.u[i].data(), r.u[i].data(), r.u[i].size());
    return r;
}

}  // namespace

HyperbolicState rk4_step(const HyperbolicState& s, double dt, bool dealias) {
    HyperbolicState k1 = time_derivative(s, dealias);
    HyperbolicState k2 = time_derivative(combine(s, 0.5 * dt, k1), dealias);
    HyperbolicState k3 = time_derivative(combine(s, 0.5 * dt, k2), dealias);
    HyperbolicState k4 = time_derivative(combine(s, dt, k3), dealias);
    HyperbolicState r = combine(s, dt / 6.0, k1);
    r = combine(r, dt / 3.0, k2);
    r = combine(r, dt / 3.0, k3);
    r = combine(r, dt / 6.0, k4);
    r.t = s.t + dt;
    return r;
}

FieldSet to_fieldset(const HyperbolicState& s) {
    FieldSet f;
    f.grid = s.grid;
    f.t = s.t;
    f.theta = s.theta;
    f.h.resize(s.p.size());
    for (std::size_t j = 0; j < s.p.size(); ++j) f.h[j] = eos::enthalpy_from_pressure(s.p[j], s.theta);
    f.u = normalize_velocity(s.u);
    return f;
}

HyperbolicState from_fieldset(const FieldSet& f) {
    HyperbolicState s;
    s.grid = f.grid;
    s.t = f.t;
    s.theta = f.theta;
    s.p.resize(f.h.size());
    for (std::size_t j = 0; j < f.h.size(); ++j) s.p[j] = eos::pressure_from_enthalpy(f.h[j], f.theta);
    for (int i = 0; i < 3; ++i) s.u[i] = f.u[i + 1];
    return s;
}

FieldSet fieldset_rate(const HyperbolicState& s, const HyperbolicState& dU) {
    FieldSet r;
    r.grid = s.grid;
    r.t = s.t;
    r.theta = s.theta;
    const std::size_t n = s.p.size();
    r.h.resize(n);
    for (int a = 0; a < 4; ++a) r.u[a].resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = eos::density_from_pressure(s.p[j], s.theta);
        r.h[j] = dU.p[j] / (rho + s.p[j]);  // dh/dp = 1/(rho + p)
        const double u0 = std::sqrt(1.0 + s.u[0][j] * s.u[0][j] + s.u[1][j] * s.u[1][j] + s.u[2][j] * s.u[2][j]);
        double du0 = 0.0;
        for (int i = 0; i < 3; ++i) {
            du0 += s.u[i][j] * dU.u[i][j];
            r.u[i + 1][j] = dU.u[i][j];
        }
        r.u[0][j] = du0 / u0;
    }
    return r;
}

double EulerResidual::l2() const {
    double s = 0.0;
    std::size_t n = 0;
    for (double x : rh) s += x * x, ++n;
    for (const auto& c : ru)
        for (double x : c) s += x * x, ++n;
    return n ? std::sqrt(s / static_cast<double>(n)) : 0.0;
}

double EulerResidual::linf() const {
    double m = 0.0;
    for (double x : rh) m = std::max(m, std::abs(x));
    for (const auto& c : ru)
        for (double x : c) m = std::max(m, std::abs(x));
    return m;
}

EulerResidual euler_residual(const FieldSet& f, const FieldSet& dt, bool dealias) {
    const Grid& g = f.grid;
    const std::size_t n = g.size();
    // d[k] = d_k of h and u^a
    std::array<Scalar, 4> dh;
    std::array<std::array<Scalar, 4>, 4> du;  // du[k][a]
    dh[0] = dt.h;
    for (int a = 0; a < 4; ++a) du[0][a] = dt.u[a];
    for (int k = 1; k < 4; ++k) {
        dh[k] = spectral_derivative(g, f.h, k, dealias);
        for (int a = 0; a < 4; ++a) du[k][a] = spectral_derivative(g, f.u[a], k, dealias);
    }
    EulerResidual r;
    r.rh.assign(n, 0.0);
    for (auto& c : r.ru) c.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double cs2 = eos::cs2_from_enthalpy(f.h[j], f.theta);
        double udh = 0.0, div = 0.0;
        for (int k = 0; k < 4; ++k) {
            udh += f.u[k][j] * dh[k][j];
            div += du[k][k][j];
        }
        r.rh[j] = udh + cs2 * div;
        for (int a = 0; a < 4; ++a) {
            double v = 0.0;
            for (int k = 0; k < 4; ++k) v += f.u[k][j] * du[k][a][j];
            v += tensor::eta(a) * dh[a][j] + f.u[a][j] * udh;
            r.ru[a][j] = v;
        }
    }
    return r;
}

std::string diag_csv_header() {
    return "t,dt,max_speed,Linf_du,Linf_dh,L2_euler_residual,normalization_defect,orthogonality_defect";
}

std::string diag_csv_row(const DiagRow& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.t, r.dt, r.max_speed,
                  r.linf_du, r.linf_dh, r.l2_euler_residual, r.normalization_defect, r.orthogonality_defect);
    return buf;
}

namespace {

DiagRow diagnose(const HyperbolicState& s, double dt, double speed, bool dealias) {
    const FieldSet f = to_fieldset(s);
    const HyperbolicState dU = time_derivative(s, dealias);
    const FieldSet df = fieldset_rate(s, dU);
    DiagRow row{};
    row.t = s.t;
    row.dt = dt;
    row.max_speed = speed;
    const Grid& g = s.grid;
    double mdh = 0.0, mdu = 0.0;
    for (double x : df.h) mdh = std::max(mdh, std::abs(x));
    for (const auto& c : df.u)
        for (double x : c) mdu = std::max(mdu, std::abs(x));
    FourVector eu, deu;  // e^h u_a and its time derivative
    for (int a = 0; a < 4; ++a) {
        eu[a].resize(g.size());
        deu[a].resize(g.size());
    }
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double eh = std::exp(f.h[j]);
        for (int a = 0; a < 4; ++a) {
            eu[a][j] = tensor::eta(a) * eh * f.u[a][j];
            deu[a][j] = tensor::eta(a) * eh * (df.u[a][j] + df.h[j] * f.u[a][j]);
        }
    }
    for (int k = 1; k <= g.dim; ++k) {
        auto d = spectral_derivative(g, f.h, k, dealias);
        for (double x : d) mdh = std::max(mdh, std::abs(x));
        for (int a = 0; a < 4; ++a) {
            auto du = spectral_derivative(g, f.u[a], k, dealias);
            for (double x : du) mdu = std::max(mdu, std::abs(x));
        }
    }
    row.linf_du = mdu;
    row.linf_dh = mdh;
    row.l2_euler_residual = euler_residual(f, df, dealias).l2();
    row.normalization_defect = check_invariants(f).normalization_defect;
    FourVector w = vort(g, eu, deu, f.u, dealias);
    Scalar uw = contract(f.u, w);
    for (double x : uw) row.orthogonality_defect = std::max(row.orthogonality_defect, std::abs(x));
    return row;
}

}  // namespace

Trajectory simulate(const HyperbolicState& s0, const RunConfig& cfg) {
    cfg.validate();
    if (!(s0.grid == cfg.grid)) throw std::invalid_argument("simulate: state grid differs from config grid");
    Trajectory tr;
    HyperbolicState s = s0;
    tr.last_valid = s;
    double speed = 0.0;
    try {
        tr.snapshots.push_back(to_fieldset(s));
        speed = max_characteristic_speed(s);
    } catch (const std::exception& e) {
        tr.aborted = true;
        tr.abort_reason = e.what();
        return tr;
    }
    const double dx = cfg.grid.dx();
    long steps_total = -1;
    if (cfg.fixed_dt > 0.0) steps_total = std::lround(cfg.t_max / cfg.fixed_dt);
    auto pick_dt = [&](long step) {
        if (steps_total >= 0) return cfg.fixed_dt;
        double dt = speed > 0.0 ? cfg.cfl * dx / speed : cfg.cfl * dx;
        (void)step;
        return std::min(dt, cfg.t_max - s.t);
    };
    tr.diagnostics.push_back(diagnose(s, 0.0, speed, cfg.dealias));
    long step = 0;
    while (true) {
        if (steps_total >= 0 ? step >= steps_total : s.t >= cfg.t_max * (1.0 - 1e-14)) break;
        if (step >= cfg.max_steps) {
            tr.aborted = true;
            tr.abort_reason = "step limit reached";
            break;
        }
        const double dt = pick_dt(step);
        if (!(dt > 0.0)) break;
        try {
            HyperbolicState next = rk4_step(s, dt, cfg.dealias);
            if (steps_total >= 0) next.t = s0.t + (step + 1) * cfg.fixed_dt;
            ++step;
            if ((step % cfg.speed_every) == 0) speed = max_characteristic_speed(next);
            DiagRow row = diagnose(next, dt, speed, cfg.dealias);
            if (!(row.linf_du <= cfg.gradient_ceiling && row.linf_dh <= cfg.gradient_ceiling)) {
                tr.aborted = true;
                tr.abort_reason = "gradient ceiling exceeded at t=" + std::to_string(next.t);
                break;
            }
            s = std::move(next);
            tr.last_valid = s;
            tr.diagnostics.push_back(row);
            if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) tr.snapshots.push_back(to_fieldset(s));
        } catch (const std::exception& e) {
            tr.aborted = true;
            tr.abort_reason = e.what();
            break;
        }
    }
    tr.steps = step;
    if (cfg.snapshot_every == 0 || step % cfg.snapshot_every != 0) tr.snapshots.push_back(to_fieldset(s));
    return tr;
}

HyperbolicState constant_state(const Grid& g, double theta, double rho, const std::array<double, 3>& u) {
    g.validate();
    const double p = eos::from_density(rho, theta).p;
    HyperbolicState s;
    s.grid = g;
    s.theta = theta;
    s.p.assign(g.size(), p);
    for (int i = 0; i < 3; ++i) s.u[i].assign(g.size(), u[i]);
    return s;
}

HyperbolicState acoustic_wave(const Grid& g, double theta, double rho, double amplitude, int mode, bool travelling) {
    HyperbolicState s = constant_state(g, theta, rho, {0.0, 0.0, 0.0});
    const auto th = eos::from_density(rho, theta);
    const double k = 2.0 * std::numbers::pi * mode / g.L;
    // linearized right-moving mode: u^1 = dp / ((rho + p) c_s)
    const double c = std::sqrt(th.cs2);
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double dp = th.p * amplitude * std::sin(k * g.coord(j)[0]);
        s.p[j] = th.p + dp;
        if (travelling) s.u[0][j] = dp / ((rho + th.p) * c);
    }
    return s;
}

HyperbolicState smooth_random(const Grid& g, double theta, double rho, double amplitude, std::uint64_t seed,
                              int max_mode) {
    HyperbolicState s = constant_state(g, theta, rho, {0.0, 0.0, 0.0});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double p0 = s.p[0];
    const double k0 = 2.0 * std::numbers::pi / g.L;
    struct Mode {
        std::array<int, 3> k;
        double a, phase;
    };
    auto draw = [&](int count) {
        std::vector<Mode> m;
        for (int q = 0; q < count; ++q) {
            Mode md{};
            for (int a = 0; a < 3; ++a) md.k[a] = a < g.dim ? static_cast<int>(std::lround(max_mode * U(rng))) : 0;
            if (md.k == std::array<int, 3>{0, 0, 0}) md.k[0] = 1;
            md.a = U(rng);
            md.phase = std::numbers::pi * U(rng);
            m.push_back(md);
        }
        return m;
    };
    auto eval = [&](const std::vector<Mode>& ms, const std::array<double, 3>& x) {
        double v = 0.0;
        for (const auto& m : ms) v += m.a * std::sin(k0 * (m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2]) + m.phase);
        return v / static_cast<double>(ms.size());
    };
    auto mp = draw(3);
    std::array<std::vector<Mode>, 3> mu{draw(3), draw(3), draw(3)};
    for (std::size_t j = 0; j < g.size(); ++j) {
        auto x = g.coord(j);
        s.p[j] = p0 * (1.0 + amplitude * eval(mp, x));
        for (int i = 0; i < 3; ++i) s.u[i][j] = amplitude * eval(mu[i], x);
    }
    return s;
}

}  // namespace rel_euler::dynamics
