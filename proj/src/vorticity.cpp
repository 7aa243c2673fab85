#include "rel_euler/vorticity.hpp"

#include <cmath>
#include <stdexcept>

#include "rel_euler/analysis.hpp"
#include "rel_euler/dynamics.hpp"
#include "rel_euler/tensor.hpp"

namespace rel_euler::vorticity {

using tensor::eta;

StState make_state(std::shared_ptr<const StLayout> L, const StField& h, const std::array<StField, 4>& u, double theta) {
    StState s;
    s.layout = std::move(L);
    s.theta = theta;
    s.h = h;
    s.u = u;
    return s;
}

namespace {

StState from_fieldsets(const std::vector<const FieldSet*>& fs, std::shared_ptr<const StLayout> L) {
    std::vector<const Scalar*> hs;
    std::array<std::vector<const Scalar*>, 4> us;
    for (const FieldSet* f : fs) {
        hs.push_back(&f->h);
        for (int a = 0; a < 4; ++a) us[a].push_back(&f->u[a]);
    }
    StState s;
    s.layout = L;
    s.theta = fs.front()->theta;
    s.h = StField::from_slices(L, hs);
    for (int a = 0; a < 4; ++a) s.u[a] = StField::from_slices(L, us[a]);
    return s;
}

}  // namespace

StState stack_from_snapshots(const std::vector<FieldSet>& snaps, int center, int nt, bool dealias) {
    if (nt < 3 || nt % 2 == 0) throw std::invalid_argument("stack: nt must be odd and >= 3");
    const int half = nt / 2;
    if (center - half < 0 || center + half >= static_cast<int>(snaps.size()))
        throw std::invalid_argument("stack: not enough snapshots around the centre");
    const double dt = snaps[center + 1].t - snaps[center].t;
    std::vector<const FieldSet*> fs;
    for (int k = -half; k <= half; ++k) {
        const FieldSet& f = snaps[center + k];
        if (std::abs((f.t - snaps[center].t) - k * dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw std::invalid_argument("stack: snapshots are not equally spaced");
        fs.push_back(&f);
    }
    auto L = StLayout::collocation(snaps[center].grid, nt, snaps[center - half].t, dt, dealias);
    return from_fieldsets(fs, L);
}

StState local_stack(const FieldSet& f, double dt, int nt, bool dealias) {
    if (nt < 3 || nt % 2 == 0) throw std::invalid_argument("stack: nt must be odd and >= 3");
    const int half = nt / 2;
    std::vector<FieldSet> levels(nt);
    levels[half] = f;
    dynamics::HyperbolicState fwd = dynamics::from_fieldset(f), bwd = fwd;
    for (int k = 1; k <= half; ++k) {
        fwd = dynamics::rk4_step(fwd, dt, dealias);
        bwd = dynamics::rk4_step(bwd, -dt, dealias);
        levels[half + k] = dynamics::to_fieldset(fwd);
        levels[half - k] = dynamics::to_fieldset(bwd);
    }
    std::vector<const FieldSet*> fs;
    for (const auto& l : levels) fs.push_back(&l);
    auto L = StLayout::collocation(f.grid, nt, f.t - half * dt, dt, dealias);
    return from_fieldsets(fs, L);
}

calc::Fluid<StField> make_fluid(const StState& s) { return calc::Fluid<StField>(s.h, s.u, s.theta); }

FourVector modified_vorticity(const FieldSet& f, const FieldSet& dfdt, bool dealias) {
    const std::size_t n = f.grid.size();
    FourVector A, dA;
    for (int a = 0; a < 4; ++a) {
        A[a].resize(n);
        dA[a].resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double H = std::exp(f.h[j]);
            A[a][j] = eta(a) * H * f.u[a][j];
            dA[a][j] = eta(a) * H * (dfdt.u[a][j] + dfdt.h[j] * f.u[a][j]);
        }
    }
    return vort(f.grid, A, dA, f.u, dealias);
}

FourVector modified_vorticity_extracted(const FieldSet& f, const FieldSet& dfdt, bool dealias) {
    const std::size_t n = f.grid.size();
    FourVector A, dA;
    for (int a = 0; a < 4; ++a) {
        A[a].resize(n);
        dA[a].resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            A[a][j] = eta(a) * f.u[a][j];
            dA[a][j] = eta(a) * dfdt.u[a][j];
        }
    }
    FourVector w = vort(f.grid, A, dA, f.u, dealias);
    for (int a = 0; a < 4; ++a)
        for (std::size_t j = 0; j < n; ++j) w[a][j] *= std::exp(f.h[j]);
    return w;
}

VorticityBundle compute_bundle(const StState& s) {
    auto f = make_fluid(s);
    calc::SdeParts<StField> parts;
    calc::sde(f, &parts);
    VorticityBundle b;
    for (int a = 0; a < 4; ++a) {
        b.w[a] = f.w(a).eval();
        b.W[a] = f.W(a).eval();
        b.G[a] = f.G(a).eval();
        b.F[a] = parts.F[a].eval();
        b.E[a] = parts.E[a].eval();
    }
    b.gamma = parts.gamma.eval();
    return b;
}

FourVector fluid_W(const StState& s) {
    auto f = make_fluid(s);
    FourVector W;
    for (int a = 0; a < 4; ++a) W[a] = f.W(a).eval();
    return W;
}

FourVector fluid_G(const StState& s) {
    auto f = make_fluid(s);
    FourVector G;
    for (int a = 0; a < 4; ++a) G[a] = f.G(a).eval();
    return G;
}

FourVector vort_ehw(const StState& s) {
    auto f = make_fluid(s);
    FourVector r;
    for (int a = 0; a < 4; ++a) {
        StField v = f.vort_of(a, [&](int d, int c) { return (f.eh() * f.wl(d)).d(c); });
        r[a] = v.eval();
    }
    return r;
}

Scalar gamma_alternate(const StState& s) {
    auto f = make_fluid(s);
    using calc::eps_up;
    using calc::sum4;
    using calc::sum44;
    StField gam = -2.0 * sum44([&](int c, int k) { return eta(c) * (f.w(k, c) * f.ul(k, c)); });
    gam += -2.0 * (f.emh() * sum4([&](int l) { return f.w(l) * f.vortwl(l); }));
    StField wW = sum4([&](int k) {
        return -1.0 * (f.wl(k) * eps_up(k, [&](int b, int c, int d) { return f.ul(b) * f.wl(d, c); }));
    });
    gam += f.emh() * wW;
    return gam.eval();
}

Report grid_identity(const StState& s, calc::Id id, const Extras& ex) {
    const auto& inf = calc::info(id);
    auto f = make_fluid(s);
    if (inf.needs_one_form) {
        if (!ex.one_form) throw std::invalid_argument(std::string(inf.name) + " needs a one-form field");
        f.set_one_form(*ex.one_form);
    }
    if (inf.needs_u_minus) {
        if (!ex.u_minus) throw std::invalid_argument(std::string(inf.name) + " needs a u_minus field");
        f.set_u_minus(*ex.u_minus);
    }
    auto comps = calc::evaluate(f, id);
    Report r;
    r.identity = inf.name;
    r.anchor = inf.anchor;
    r.jet_order = 0;
    const StLayout& L = *s.layout;
    r.n_points = static_cast<long>(L.mode == TimeMode::Periodic ? L.size() : L.slice) *
                 static_cast<long>(comps.size());
    double scale = 0.0, ss = 0.0;
    for (const auto& c : comps) {
        scale = std::max(scale, c.scale);
        const double m = magnitude(c.residual);
        const double rel = c.scale > 0.0 ? m / c.scale : (m == 0.0 ? 0.0 : INFINITY);
        r.max_rel_residual = std::max(r.max_rel_residual, rel);
        const double l2 = l2_norm(c.residual);
        ss += l2 * l2;
    }
    r.l2_rel_residual = scale > 0.0 ? std::sqrt(ss) / scale : (ss == 0.0 ? 0.0 : INFINITY);
    return r;
}

std::vector<Report> transport_residuals(const StState& s) {
    std::vector<Report> out;
    for (auto id : {calc::Id::CEQ, calc::Id::CEQ0, calc::Id::CEQ1, calc::Id::SDe}) out.push_back(grid_identity(s, id));
    return out;
}

std::vector<Report> divcurl_residuals(const StState& s) {
    std::vector<Report> out;
    for (auto id : {calc::Id::HDe, calc::Id::OEe, calc::Id::c2, calc::Id::d5}) out.push_back(grid_identity(s, id));
    return out;
}

D17 d17_ratio(const StState& s, double s0) {
    auto f = make_fluid(s);
    const Grid& g = s.layout->grid;
    const double sig = s0 - 2.0;
    std::vector<Scalar> lhs_parts;
    for (int i = 1; i < 4; ++i)
        for (int j = 1; j < 4; ++j) lhs_parts.push_back(f.W(i, j).eval());
    std::vector<const Scalar*> lp;
    for (const auto& x : lhs_parts) lp.push_back(&x);
    D17 r;
    r.lhs = analysis::sobolev_norm_family(g, lp, sig, true);

    // pointwise Euclidean magnitudes of the products on the right
    const std::size_t n = g.size();
    auto mag = [&](auto&& get, int count) {
        Scalar m(n, 0.0);
        for (int q = 0; q < count; ++q) {
            Scalar v = get(q);
            for (std::size_t k = 0; k < n; ++k) m[k] += v[k] * v[k];
        }
        for (double& x : m) x = std::sqrt(x);
        return m;
    };
    Scalar du = mag([&](int q) { return f.u(q / 4, q % 4).eval(); }, 16);
    Scalar dh = mag([&](int q) { return f.h(q).eval(); }, 4);
    Scalar dudh(n);
    for (std::size_t k = 0; k < n; ++k) dudh[k] = std::hypot(du[k], dh[k]);
    Scalar Wm = mag([&](int q) { return f.W(q).eval(); }, 4);
    Scalar wm = mag([&](int q) { return f.w(q).eval(); }, 4);
    Scalar dw = mag([&](int q) { return f.w(q / 4, q % 4).eval(); }, 16);
    std::vector<Scalar> G;
    for (int a = 0; a < 4; ++a) G.push_back(f.G(a).eval());
    std::vector<const Scalar*> gp;
    for (const auto& x : G) gp.push_back(&x);
    auto prod = [&](const Scalar& a, const Scalar& b) {
        Scalar r2(n);
        for (std::size_t k = 0; k < n; ++k) r2[k] = a[k] * b[k];
        return r2;
    };
    double rhs = analysis::sobolev_norm_family(g, gp, sig, true);
    rhs += analysis::sobolev_norm(g, prod(Wm, dudh), sig, true).value;
    rhs += analysis::sobolev_norm(g, prod(dw, dudh), sig, true).value;
    rhs += analysis::sobolev_norm(g, prod(prod(wm, du), dh), sig, true).value;
    rhs += analysis::sobolev_norm(g, prod(prod(wm, wm), dh), sig, true).value;
    r.rhs = rhs;
    r.ratio = rhs > 0.0 ? r.lhs / rhs : 0.0;
    return r;
}

Orthogonality orthogonality(const StState& s) {
    auto f = make_fluid(s);
    Orthogonality o;
    const Scalar u0 = s.u[0].eval();
    std::array<Scalar, 4> u, w, W;
    for (int a = 0; a < 4; ++a) {
        u[a] = s.u[a].eval();
        w[a] = f.w(a).eval();
        W[a] = f.W(a).eval();
    }
    for (std::size_t j = 0; j < u0.size(); ++j) {
        double uw = -u[0][j] * w[0][j], uW = -u[0][j] * W[0][j], iw = 0.0, iW = 0.0;
        for (int i = 1; i < 4; ++i) {
            uw += u[i][j] * w[i][j];
            uW += u[i][j] * W[i][j];
            iw += u[i][j] * w[i][j];
            iW += u[i][j] * W[i][j];
        }
        o.uw = std::max(o.uw, std::abs(uw));
        o.uW = std::max(o.uW, std::abs(uW));
        o.w0 = std::max(o.w0, std::abs(w[0][j] - iw / u0[j]));
        o.W0 = std::max(o.W0, std::abs(W[0][j] - iW / u0[j]));
    }
    return o;
}

}  // namespace rel_euler::vorticity
