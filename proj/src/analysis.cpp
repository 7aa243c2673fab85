#include "rel_euler/parallel.hpp"
#include "rel_euler/analysis.hpp"

#include <algorithm>
#include <boost/math/special_functions/lambert_w.hpp>
#include <cmath>
#include <numeric>
#include <complex>
#include <deque>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "rel_euler/dynamics.hpp"
#include "rel_euler/vorticity.hpp"

namespace rel_euler::analysis {

namespace {

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

using Spectrum = std::vector<std::complex<double>>;

struct Modes {
    std::vector<double> k;       // |xi| per half-spectrum index
    std::vector<double> weight;  // Hermitian multiplicity
};

const Modes& modes_of(const Grid& g) {
    thread_local std::deque<std::pair<Grid, Modes>> cache;
    for (const auto& [gg, m] : cache)
        if (gg == g) return m;
    auto box = g.box();
    Modes m;
    const std::size_t half = box->spectrum_size();
    m.k.resize(half);
    m.weight.resize(half);
    for (std::size_t i = 0; i < half; ++i) {
        double s = 0.0;
        for (double x : box->wave(i)) s += x * x;
        m.k[i] = std::sqrt(s);
        m.weight[i] = box->hermitian_weight(i);
    }
    cache.emplace_back(g, std::move(m));
    return cache.back().second;
}

double volume(const Grid& g) { return std::pow(g.L, g.dim); }

Spectrum spectrum(const Grid& g, const Scalar& f) {
    if (f.size() != g.size()) throw std::invalid_argument("analysis: field size does not match grid");
    return g.box()->forward(f.data());
}

// sum over the full spectrum of |c|^2 m(k)^2, times the box volume
template <class M>
double weighted_sq(const Grid& g, const Spectrum& c, M&& mult) {
    const Modes& md = modes_of(g);
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double w = mult(md.k[i]);
        if (w == 0.0) continue;
        s += md.weight[i] * std::norm(c[i]) * w * w;
    }
    return s * volume(g);
}

struct BlockSums {
    std::vector<double> sq;  // ||P_j f||^2_{L2}
    DyadicRange r;
};

BlockSums block_l2(const Grid& g, const Spectrum& c) {
    BlockSums b;
    b.r = dyadic_range(g);
    for (int j = b.r.jmin; j <= b.r.jmax; ++j) {
        const double sc = std::ldexp(1.0, -j);
        b.sq.push_back(weighted_sq(g, c, [&](double k) { return k > 0.0 ? zeta(sc * k) : 0.0; }));
    }
    return b;
}

Scalar project(const Grid& g, const Spectrum& c, int j) {
    const Modes& md = modes_of(g);
    const double sc = std::ldexp(1.0, -j);
    Spectrum p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        if (md.k[i] > 0.0) p[i] = c[i] * zeta(sc * md.k[i]);
    Scalar out(g.size());
    g.box()->inverse(p, out.data());
    return out;
}

}  // namespace

double eta_cutoff(double r) {
    r = std::abs(r);
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double a = psi(2.0 - r), b = psi(r - 1.0);
    return a / (a + b);
}

double zeta(double r) { return eta_cutoff(r) - eta_cutoff(2.0 * r); }

DyadicRange dyadic_range(const Grid& g) {
    const double kmin = 2.0 * std::numbers::pi / g.L;
    const double kmax = kmin * (g.n / 2) * std::sqrt(static_cast<double>(g.dim));
    return {static_cast<int>(std::floor(std::log2(kmin))), static_cast<int>(std::ceil(std::log2(kmax)))};
}

Scalar lp_project(const Grid& g, const Scalar& f, int j) { return project(g, spectrum(g, f), j); }

double l2_norm(const Grid& g, const Scalar& f) {
    double s = 0.0;
    for (double x : f) s += x * x;
    return std::sqrt(s * std::pow(g.dx(), g.dim));
}

double lp_norm(const Grid& g, const Scalar& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (std::isinf(p)) return linf_norm(f);
    double s = 0.0;
    for (double x : f) s += std::pow(std::abs(x), p);
    return std::pow(s * std::pow(g.dx(), g.dim), 1.0 / p);
}

double linf_norm(const Scalar& f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
}

NormResult sobolev_norm(const Grid& g, const Scalar& f, double s, bool homogeneous) {
    const Spectrum c = spectrum(g, f);
    const BlockSums b = block_l2(g, c);
    double total = 0.0;
    for (std::size_t q = 0; q < b.sq.size(); ++q) total += std::exp2(2.0 * (b.r.jmin + q) * s) * b.sq[q];
    NormResult r;
    r.value = std::sqrt(total);
    if (!homogeneous) r.value += l2_norm(g, f);
    // the top block carries a visible share of the weighted sum: the grid does not resolve H^s
    r.above_resolution = total > 0.0 && std::exp2(2.0 * b.r.jmax * s) * b.sq.back() > 1e-2 * total;
    return r;
}

NormResult sobolev_norm_weighted(const Grid& g, const Scalar& f, double s, bool homogeneous) {
    const Spectrum c = spectrum(g, f);
    const double tot = weighted_sq(g, c, [&](double k) { return k > 0.0 ? std::pow(k, s) : 0.0; });
    NormResult r;
    r.value = std::sqrt(tot);
    if (!homogeneous) r.value += l2_norm(g, f);
    const double kmax = modes_of(g).k.empty() ? 0.0 : *std::max_element(modes_of(g).k.begin(), modes_of(g).k.end());
    const double top = weighted_sq(g, c, [&](double k) { return k > 0.5 * kmax ? std::pow(k, s) : 0.0; });
    r.above_resolution = tot > 0.0 && top > 1e-2 * tot;
    return r;
}

NormResult besov_norm(const Grid& g, const Scalar& f, double s) {
    const Spectrum c = spectrum(g, f);
    const DyadicRange r = dyadic_range(g);
    double total = 0.0, top = 0.0;
    for (int j = r.jmin; j <= r.jmax; ++j) {
        const double m = linf_norm(project(g, c, j));
        const double t = std::exp2(2.0 * j * s) * m * m;
        total += t;
        if (j == r.jmax) top = t;
    }
    NormResult out;
    out.value = std::sqrt(total);
    out.above_resolution = total > 0.0 && top > 1e-2 * total;
    return out;
}

double holder_seminorm(const Grid& g, const Scalar& f, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("holder_seminorm: delta must lie in (0,1)");
    if (f.size() != g.size()) throw std::invalid_argument("holder_seminorm: field size does not match grid");
    const std::size_t N = g.size();
    double best = 0.0;
    std::size_t stride = 1;
    for (int a = g.dim - 1; a >= 0; --a) {
        for (int m = 1; m <= g.n / 2; m *= 2) {
            const double den = std::pow(m * g.dx(), delta);
            for (std::size_t idx = 0; idx < N; ++idx) {
                const int ia = static_cast<int>((idx / stride) % g.n);
                const std::size_t jdx = idx + stride * (((ia + m) % g.n) - ia);
                best = std::max(best, std::abs(f[jdx] - f[idx]) / den);
            }
        }
        stride *= g.n;
    }
    return best;
}

Scalar fractional_laplacian(const Grid& g, const Scalar& f, double a) {
    Spectrum c = spectrum(g, f);
    const Modes& md = modes_of(g);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (md.k[i] == 0.0) {
            if (a != 0.0) c[i] = 0.0;
        } else {
            c[i] *= std::pow(md.k[i], a);
        }
    }
    Scalar out(g.size());
    g.box()->inverse(c, out.data());
    return out;
}

double lp_equivalence_constant(double k, double s) {
    if (k <= 0.0) return 1.0;
    double sum = 0.0;
    const int j0 = static_cast<int>(std::floor(std::log2(k)));
    for (int j = j0 - 2; j <= j0 + 2; ++j) {
        const double z = zeta(std::ldexp(k, -j));
        sum += std::exp2(2.0 * j * s) * z * z;
    }
    return std::sqrt(sum) / std::pow(k, s);
}

double sobolev_norm_family(const Grid& g, const std::vector<const Scalar*>& fs, double s, bool homogeneous) {
    double t = 0.0;
    for (const Scalar* f : fs) {
        const double v = sobolev_norm(g, *f, s, homogeneous).value;
        t += v * v;
    }
    return std::sqrt(t);
}

double besov_norm_family(const Grid& g, const std::vector<const Scalar*>& fs, double s) {
    double t = 0.0;
    for (const Scalar* f : fs) {
        const double v = besov_norm(g, *f, s).value;
        t += v * v;
    }
    return std::sqrt(t);
}

EnergyRecord energy_at(const FieldSet& f, const EnergyParams& p) {
    const Grid& g = f.grid;
    const std::size_t N = g.size();
    const auto hs = dynamics::from_fieldset(f);
    const FieldSet rate = dynamics::fieldset_rate(hs, dynamics::time_derivative(hs, p.dealias));
    const FourVector w = vorticity::modified_vorticity(f, rate, p.dealias);

    Scalar u0m1(N), dh0(N);
    double hb = p.h_background;
    if (std::isnan(hb)) hb = std::accumulate(f.h.begin(), f.h.end(), 0.0) / static_cast<double>(N);
    for (std::size_t j = 0; j < N; ++j) {
        u0m1[j] = f.u[0][j] - 1.0;
        dh0[j] = f.h[j] - hb;
    }
    const std::vector<const Scalar*> uvec{&u0m1, &f.u[1], &f.u[2], &f.u[3]};
    const std::vector<const Scalar*> wv{&w[0], &w[1], &w[2], &w[3]};
    auto sq = [](double x) { return x * x; };

    EnergyRecord r;
    r.t = f.t;
    const double h_s = sobolev_norm(g, dh0, p.s).value;
    const double u_s = sobolev_norm_family(g, uvec, p.s);
    r.E_s = sq(h_s) + sq(u_s) + sq(sobolev_norm_family(g, wv, p.s0));
    r.E_tilde = sq(h_s) + sq(u_s) + sq(sobolev_norm_family(g, wv, 2.0));
    r.E_bb = sq(sobolev_norm(g, dh0, p.s_star + 1.0).value) + sq(sobolev_norm_family(g, uvec, p.s_star + 1.0)) +
             sq(sobolev_norm_family(g, wv, 3.0));

    // space-time gradients d_a u^b and d_a h
    std::vector<Scalar> du, dh;
    for (int b = 0; b < 4; ++b) du.push_back(rate.u[b]);
    dh.push_back(rate.h);
    for (int a = 1; a <= g.dim; ++a) {
        for (int b = 0; b < 4; ++b) du.push_back(spectral_derivative(g, f.u[b], a, p.dealias));
        dh.push_back(spectral_derivative(g, f.h, a, p.dealias));
    }
    for (std::size_t j = 0; j < N; ++j) {
        double su = 0.0, sh = 0.0;
        for (const auto& x : du) su += x[j] * x[j];
        for (const auto& x : dh) sh += x[j] * x[j];
        r.linf_du = std::max(r.linf_du, std::sqrt(su));
        r.linf_dh = std::max(r.linf_dh, std::sqrt(sh));
        r.linf_dudh = std::max(r.linf_dudh, std::sqrt(su + sh));
    }
    std::vector<const Scalar*> all;
    for (const auto& x : du) all.push_back(&x);
    for (const auto& x : dh) all.push_back(&x);
    r.besov_du = besov_norm_family(g, all, p.s0 - 2.0);
    return r;
}

std::vector<EnergyRecord> energy_functionals(const std::vector<FieldSet>& snaps, const EnergyParams& params) {
    std::vector<EnergyRecord> out(snaps.size());
    EnergyParams p = params;
    if (std::isnan(p.h_background) && !snaps.empty())
        p.h_background = std::accumulate(snaps[0].h.begin(), snaps[0].h.end(), 0.0) / static_cast<double>(snaps[0].h.size());
    ExceptionSlot ex;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < snaps.size(); ++k) ex.run([&] { out[k] = energy_at(snaps[k], p); });
    ex.rethrow();
    for (std::size_t k = 1; k < out.size(); ++k) {
        const double a = out[k - 1].linf_dudh + out[k - 1].besov_du;
        const double b = out[k].linf_dudh + out[k].besov_du;
        out[k].M = out[k - 1].M + 0.5 * (out[k].t - out[k - 1].t) * (a + b);
    }
    return out;
}

std::string energy_csv_header() { return "t,E_s,Etilde_s,Ebb,M,Linf_du,Linf_dh,besov_du"; }

std::string energy_csv_row(const EnergyRecord& r) {
    char buf[320];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.t, r.E_s, r.E_tilde, r.E_bb,
                  r.M, r.linf_du, r.linf_dh, r.besov_du);
    return buf;
}

GronwallResult gronwall_diagnostic(const std::vector<EnergyRecord>& recs) {
    GronwallResult g;
    if (recs.size() < 2) throw std::invalid_argument("gronwall_diagnostic: need at least two records");
    const double E0 = recs.front().E_s;
    // below this E_s(0) is round-off of a constant state
    constexpr double kEnergyFloor = 1e-24;
    if (!(E0 > kEnergyFloor)) {
        g.skipped = true;
        g.note = "E_s(0) = 0: diagnostic skipped";
        return g;
    }
    for (const auto& r : recs) {
        if (!std::isfinite(r.E_s)) {
            g.bounded = false;
            g.K = INFINITY;
            g.note = "non-finite energy at t = " + std::to_string(r.t);
            return g;
        }
        const double lr = std::log(r.E_s / E0);
        if (lr <= 0.0) continue;
        if (r.M <= 0.0) {
            g.bounded = false;
            g.K = INFINITY;
            g.note = "energy grows with M = 0 at t = " + std::to_string(r.t);
            return g;
        }
        // K M e^{K M} = lr
        g.K = std::max(g.K, boost::math::lambert_w0(lr) / r.M);
    }
    return g;
}

namespace {

struct ModeCoef {
    std::vector<int> k;
    double a, b;  // a cos(k.x) + b sin(k.x)
};

// A band-limited function defined by its modes, independent of any grid.
std::vector<ModeCoef> random_modes(std::mt19937_64& rng, int dim, int band, bool adversarial) {
    std::normal_distribution<double> nd;
    std::vector<ModeCoef> out;
    std::vector<int> k(dim, 0);
    const int lo = adversarial ? (3 * band) / 4 : 1;
    auto rec = [&](auto&& self, int a) -> void {
        if (a == dim) {
            // canonical half space: first nonzero component positive
            int first = 0;
            for (int x : k)
                if (x != 0) {
                    first = x;
                    break;
                }
            if (first <= 0) return;
            int mx = 0;
            double k2 = 0.0;
            for (int x : k) {
                mx = std::max(mx, std::abs(x));
                k2 += x * x;
            }
            if (mx < lo) return;
            const double decay = adversarial ? 1.0 : 1.0 / (1.0 + k2);
            out.push_back({k, decay * nd(rng), decay * nd(rng)});
            return;
        }
        for (int v = -band; v <= band; ++v) {
            k[a] = v;
            self(self, a + 1);
        }
    };
    rec(rec, 0);
    return out;
}

Scalar synthesize(const Grid& g, const std::vector<ModeCoef>& ms) {
    auto box = g.box();
    Spectrum c(box->spectrum_size(), 0.0);
    const int last = g.n / 2 + 1;
    auto index = [&](const std::vector<int>& k) {
        std::size_t idx = 0;
        for (int a = 0; a < g.dim - 1; ++a) idx = idx * g.n + static_cast<std::size_t>((k[a] % g.n + g.n) % g.n);
        return idx * last + static_cast<std::size_t>(k.back());
    };
    for (const auto& m : ms) {
        for (int x : m.k)
            if (2 * std::abs(x) >= g.n) throw std::invalid_argument("probe: band exceeds grid Nyquist");
        const std::complex<double> cp(0.5 * m.a, -0.5 * m.b), cm = std::conj(cp);
        std::vector<int> neg(m.k.size());
        for (std::size_t a = 0; a < m.k.size(); ++a) neg[a] = -m.k[a];
        if (m.k.back() > 0) c[index(m.k)] += cp;
        else if (m.k.back() < 0) c[index(neg)] += cm;
        else {
            c[index(m.k)] += cp;
            c[index(neg)] += cm;
        }
    }
    Scalar out(g.size());
    box->inverse(c, out.data());
    return out;
}

Scalar mul(const Scalar& a, const Scalar& b) {
    Scalar r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
    return r;
}

}  // namespace

std::pair<double, double> probe_sides(ProbeKind kind, const Grid& g, const Scalar& f1, const Scalar& f2, double a) {
    if (kind == ProbeKind::KatoPonceCommutator) {
        if (a == 0.0) a = 1.5;
        Scalar lhs = fractional_laplacian(g, mul(f1, f2), a);
        const Scalar t = mul(fractional_laplacian(g, f1, a), f2);
        for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= t[i];
        Scalar grad(g.size(), 0.0);
        for (int ax = 1; ax <= g.dim; ++ax) {
            const Scalar d = spectral_derivative(g, f2, ax);
            for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += d[i] * d[i];
        }
        for (double& x : grad) x = std::sqrt(x);
        const double rhs = l2_norm(g, fractional_laplacian(g, f1, a - 1.0)) * linf_norm(grad) +
                           lp_norm(g, f1, 4.0) * lp_norm(g, fractional_laplacian(g, f2, a), 4.0);
        return {l2_norm(g, lhs), rhs};
    }
    if (a == 0.0) a = 0.5;
    if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("lp_product probe: a must lie in [0,1)");
    const double lhs = l2_norm(g, fractional_laplacian(g, mul(f1, f2), a));
    const double rhs = besov_norm(g, f1, a).value * l2_norm(g, f2) +
                       linf_norm(f1) * sobolev_norm_weighted(g, f2, a, true).value;
    return {lhs, rhs};
}

ProbeResult inequality_probe(ProbeKind kind, std::uint64_t seed, int count, const ProbeParams& p) {
    if (count <= 0) throw std::invalid_argument("inequality_probe: count must be positive");
    Grid g{p.dim, p.n, 2.0 * std::numbers::pi};
    g.validate();
    std::vector<std::vector<ModeCoef>> m1(count), m2(count);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count; ++i) {
        m1[i] = random_modes(rng, p.dim, p.bandwidth, p.adversarial);
        m2[i] = random_modes(rng, p.dim, p.bandwidth, p.adversarial);
    }
    std::vector<double> ratios(count);
    ExceptionSlot ex;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i)
        ex.run([&] {
            const auto [l, r] = probe_sides(kind, g, synthesize(g, m1[i]), synthesize(g, m2[i]), p.a);
            ratios[i] = r > 0.0 ? l / r : 0.0;
        });
    ex.rethrow();
    ProbeResult out;
    out.count = count;
    for (double x : ratios) {
        out.max_ratio = std::max(out.max_ratio, x);
        out.mean_ratio += x / count;
    }
    return out;
}

}  // namespace rel_euler::analysis
