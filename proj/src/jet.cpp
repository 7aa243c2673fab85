#include "rel_euler/parallel.hpp"
#include "rel_euler/jet.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rel_euler/eos.hpp"
#include "rel_euler/qh_system.hpp"

namespace rel_euler::jet {

namespace {

using Exponent = TaylorPoly::Exponent;

double factorial_weight(const Exponent& e) {
    double f = 1.0;
    for (int v : e)
        for (int k = 2; k <= v; ++k) f *= k;
    return f;
}

void check_order(int order) {
    if (order < 1 || order > kMaxJetOrder)
        throw PreconditionError("jet order " + std::to_string(order) + " unsupported (1..4)");
}

// Solve A x = b in the truncated algebra; A symmetric positive definite at the base point.
std::array<TaylorPoly, 4> solve4(qh::Mat4<TaylorPoly> A, std::array<TaylorPoly, 4> b) {
    for (int k = 0; k < 4; ++k) {
        TaylorPoly inv = recip(A[k][k]);
        for (int r = k + 1; r < 4; ++r) {
            TaylorPoly f = A[r][k] * inv;
            for (int c = k; c < 4; ++c) A[r][c] -= f * A[k][c];
            b[r] -= f * b[k];
        }
    }
    std::array<TaylorPoly, 4> x;
    for (int k = 3; k >= 0; --k) {
        TaylorPoly s = b[k];
        for (int c = k + 1; c < 4; ++c) s -= A[k][c] * x[c];
        x[k] = s * recip(A[k][k]);
    }
    return x;
}

bool spatial_only(const TaylorPoly& p) {
    const auto& b = p.layout();
    for (std::size_t i = 0; i < p.size(); ++i)
        if (b.exps[i][0] != 0 && p[i] != 0.0) return false;
    return true;
}

void derive(SpaceTimeJet& j) {
    const double th = j.theta;
    TaylorPoly s = pow(j.p, (th - 1.0) / th);
    j.h = (th / (th - 1.0)) * log(1.0 + s);
    j.cs2 = th * s;
    TaylorPoly u0sq = j.u[0] * j.u[0];
    j.omega = recip(j.cs2 + u0sq - j.cs2 * u0sq);
}

struct Draw {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> uni{-1.0, 1.0};
    double operator()() { return uni(rng); }
};

TaylorPoly random_poly(Draw& d, int order, double amplitude, bool time_part, double c0) {
    TaylorPoly p(order, c0);
    const auto& b = p.layout();
    for (std::size_t i = 1; i < p.size(); ++i) {
        const bool has_t = b.exps[i][0] != 0;
        if (has_t != time_part) continue;
        p[i] = amplitude * d() / factorial_weight(b.exps[i]);
    }
    return p;
}

struct SpatialData {
    TaylorPoly p;
    std::array<TaylorPoly, 3> u;
};

SpatialData random_spatial(Draw& d, int order, double amplitude, double theta, double base_density) {
    const double p0 = eos::pressure(base_density, theta);
    SpatialData s;
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double pc = p0 * (1.0 + amplitude * d());
        s.p = random_poly(d, order, amplitude * p0, false, pc);
        for (int i = 0; i < 3; ++i) s.u[i] = random_poly(d, order, amplitude, false, amplitude * d());
        if (pc > 0.0 && eos::cs2_from_pressure(pc, theta) < 1.0) return s;
    }
    throw eos::DomainError("random jet: no admissible base point after retries");
}

}  // namespace

SpaceTimeJet complete_jet(const TaylorPoly& p_spatial, const std::array<TaylorPoly, 3>& u_spatial, double theta) {
    eos::check_theta(theta);
    const int N = p_spatial.order();
    check_order(N);
    for (const auto& ui : u_spatial)
        if (ui.order() != N) throw PreconditionError("complete_jet: inconsistent jet orders");
    if (!spatial_only(p_spatial)) throw PreconditionError("complete_jet: data must be spatial");
    const double p0 = p_spatial.value();
    if (!(p0 > 0.0) || eos::cs2_from_pressure(p0, theta) > 1.0)
        throw eos::DomainError("complete_jet: inadmissible base point");

    std::array<TaylorPoly, 4> U{p_spatial, u_spatial[0], u_spatial[1], u_spatial[2]};
    const auto& B = TaylorPoly::basis(N);
    for (int k = 0; k < N; ++k) {
        auto m = qh::matrices(U[0], {U[1], U[2], U[3]}, theta);
        std::array<TaylorPoly, 4> rhs;
        for (int r = 0; r < 4; ++r) rhs[r] = TaylorPoly(N);
        for (int i = 1; i < 4; ++i) {
            std::array<TaylorPoly, 4> dU;
            for (int c = 0; c < 4; ++c) dU[c] = U[c].d(i);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) rhs[r] += m.A[i][r][c] * dU[c];
        }
        auto x = solve4(m.A[0], rhs);
        // d_t U = -x: the t^k coefficients of x fix the t^{k+1} coefficients of U
        for (std::size_t idx = 0; idx < B.exps.size(); ++idx) {
            const Exponent& e = B.exps[idx];
            if (e[0] != k || B.degree[idx] >= N) continue;
            Exponent up = e;
            up[0] += 1;
            for (int c = 0; c < 4; ++c) U[c].coeff(up) = -x[c][idx] / (k + 1);
        }
    }
    SpaceTimeJet j;
    j.order = N;
    j.theta = theta;
    j.p = U[0];
    j.u = {sqrt(1.0 + U[1] * U[1] + U[2] * U[2] + U[3] * U[3]), U[1], U[2], U[3]};
    j.constrained = true;
    derive(j);
    return j;
}

SpaceTimeJet random_constrained_jet(std::uint64_t seed, int order, double amplitude, double theta,
                                    double base_density) {
    check_order(order);
    Draw d{std::mt19937_64(seed)};
    SpatialData s = random_spatial(d, order, amplitude, theta, base_density);
    SpaceTimeJet j = complete_jet(s.p, s.u, theta);
    j.seed = seed;
    return j;
}

SpaceTimeJet random_unconstrained_jet(std::uint64_t seed, int order, double amplitude, double theta,
                                      double base_density) {
    check_order(order);
    eos::check_theta(theta);
    Draw d{std::mt19937_64(seed)};
    SpatialData s = random_spatial(d, order, amplitude, theta, base_density);
    const double p0 = s.p.value();
    SpaceTimeJet j;
    j.order = order;
    j.theta = theta;
    j.seed = seed;
    j.p = s.p + random_poly(d, order, amplitude * p0, true, 0.0);
    TaylorPoly u0 = sqrt(1.0 + s.u[0] * s.u[0] + s.u[1] * s.u[1] + s.u[2] * s.u[2]);
    u0 += random_poly(d, order, amplitude, true, amplitude * d());
    j.u[0] = u0;
    for (int i = 0; i < 3; ++i) j.u[i + 1] = s.u[i] + random_poly(d, order, amplitude, true, 0.0);
    j.constrained = false;
    derive(j);
    return j;
}

double euler_residual(const SpaceTimeJet& j) {
    calc::Fluid<TaylorPoly> f = make_fluid(j);
    const int deg = j.order - 1;
    TaylorPoly rh = f.udh() + j.cs2 * f.divu();
    double m = max_abs_coeff(rh, deg);
    for (int a = 0; a < 4; ++a) {
        TaylorPoly r = calc::sum4([&](int k) { return f.u(k) * f.u(a, k); });
        r += calc::eta(a) * f.h(a);
        r += f.u(a) * f.udh();
        m = std::max(m, max_abs_coeff(r, deg));
    }
    return m;
}

double normalization_defect(const SpaceTimeJet& j) {
    TaylorPoly n = j.u[1] * j.u[1] + j.u[2] * j.u[2] + j.u[3] * j.u[3] - j.u[0] * j.u[0] + 1.0;
    return max_abs_coeff(n, j.order);
}

calc::Fluid<TaylorPoly> make_fluid(const SpaceTimeJet& j) { return calc::Fluid<TaylorPoly>(j.h, j.u, j.theta); }

std::array<TaylorPoly, 4> random_one_form(std::uint64_t seed, int order, double amplitude) {
    Draw d{std::mt19937_64(seed)};
    std::array<TaylorPoly, 4> a;
    for (auto& c : a) {
        c = random_poly(d, order, amplitude, false, amplitude * d());
        c += random_poly(d, order, amplitude, true, 0.0);
    }
    return a;
}

std::array<TaylorPoly, 4> constrained_u_minus(calc::Fluid<TaylorPoly>& f, std::uint64_t seed, int order,
                                              double amplitude) {
    auto um = random_one_form(seed, order, amplitude);
    const auto& B = TaylorPoly::basis(order);
    for (int a = 0; a < 4; ++a) {
        // P um = um - P^{bc} d_b d_c um; the low-degree part of P^{bc} d_b d_c um
        // does not involve the low-degree coefficients of um.
        TaylorPoly target = f.emh() * f.W(a);
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) target += f.P(b, c) * um[a].d(b).d(c);
        for (std::size_t i = 0; i < B.exps.size(); ++i)
            if (B.degree[i] <= 1) um[a][i] = target[i];
    }
    return um;
}

JetResidual eval_identity(const SpaceTimeJet& j, calc::Id id) {
    const auto& inf = calc::info(id);
    if (j.order < inf.depth)
        throw PreconditionError(std::string("identity ") + inf.name + " needs jet order N >= " +
                                std::to_string(inf.depth));
    calc::Fluid<TaylorPoly> f = make_fluid(j);
    if (inf.needs_one_form) f.set_one_form(random_one_form(j.seed ^ 0x9e3779b97f4a7c15ULL, j.order, 0.1));
    if (inf.needs_u_minus) f.set_u_minus(constrained_u_minus(f, j.seed ^ 0x85ebca6bULL, j.order, 0.1));
    auto comps = calc::evaluate(f, id);
    JetResidual r;
    r.identity = inf.name;
    r.anchor = inf.anchor;
    r.jet_order = j.order;
    r.n_points = static_cast<int>(comps.size());
    double ss = 0.0, smax = 0.0;
    for (const auto& c : comps) {
        const double res = std::abs(c.residual.value());
        const double rel = c.scale > 0.0 ? res / c.scale : (res == 0.0 ? 0.0 : INFINITY);
        r.component_rel.push_back(rel);
        r.component_labels.push_back(c.label);
        r.max_rel_residual = std::max(r.max_rel_residual, rel);
        ss += res * res;
        smax = std::max(smax, c.scale);
    }
    r.l2_rel_residual = smax > 0.0 ? std::sqrt(ss) / smax : 0.0;
    return r;
}

BatchSummary verify_batch(calc::Id id, const BatchParams& p) {
    if (p.count <= 0) throw PreconditionError("verify_batch: count must be positive");
    const auto& inf = calc::info(id);
    if (p.order < inf.depth)
        throw PreconditionError(std::string("identity ") + inf.name + " needs jet order N >= " +
                                std::to_string(inf.depth));
    std::vector<JetResidual> rs(p.count);
    ExceptionSlot ex;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < p.count; ++i)
        ex.run([&] {
            const std::uint64_t s = p.seed + static_cast<std::uint64_t>(i);
            const SpaceTimeJet j = p.constrained
                                       ? random_constrained_jet(s, p.order, p.amplitude, p.theta, p.base_density)
                                       : random_unconstrained_jet(s, p.order, p.amplitude, p.theta, p.base_density);
            rs[i] = eval_identity(j, id);
        });
    ex.rethrow();
    BatchSummary b;
    b.identity = inf.name;
    b.anchor = inf.anchor;
    b.jet_order = p.order;
    b.count = p.count;
    std::vector<double> m;
    for (const auto& r : rs) {
        b.max_rel_residual = std::max(b.max_rel_residual, r.max_rel_residual);
        b.max_l2_rel_residual = std::max(b.max_l2_rel_residual, r.l2_rel_residual);
        b.n_points += r.n_points;
        m.push_back(r.max_rel_residual);
    }
    std::sort(m.begin(), m.end());
    b.median_rel_residual = (m.size() % 2) ? m[m.size() / 2] : 0.5 * (m[m.size() / 2 - 1] + m[m.size() / 2]);
    return b;
}

}  // namespace rel_euler::jet
