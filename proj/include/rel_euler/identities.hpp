#pragma once

// Identities satisfied by smooth solutions of the relativistic Euler system,
// written once over a generic scalar type (Taylor jets or grid slabs).
// Each identity returns one residual per free index combination, together
// with the largest magnitude among its individual additive terms.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rel_euler/fluid_calculus.hpp"

namespace rel_euler::calc {

enum class Id { WTe_h, WTe_u, CEQ, CEQ0, CEQ1, SDe, HDe, OEe, c2, d5, OE00, cr04, cra0, cra1, UM, fdr, tue, OE };

struct IdentityInfo {
    Id id;
    const char* name;
    int depth;           // derivative depth on (h, u)
    const char* anchor;  // human-readable description carried into reports
    bool solution_only;  // holds only on solutions of the Euler system
    bool needs_one_form;
    bool needs_u_minus;
};

inline const std::vector<IdentityInfo>& identity_table() {
    static const std::vector<IdentityInfo> t = {
        {Id::WTe_h, "WTe-h", 2, "WTe: wave equation for h, box_g h = D", true, false, false},
        {Id::WTe_u, "WTe-u", 2, "WTe: wave equation for u, box_g u = -c^2 Omega e^-h W + Q", true, false, false},
        {Id::CEQ, "CEQ", 2, "CEQ: transport of the modified vorticity w", true, false, false},
        {Id::CEQ0, "CEQ0", 2, "CEQ0: divergence of w", true, false, false},
        {Id::CEQ1, "CEQ1", 3, "CEQ1: transport of W", true, false, false},
        {Id::SDe, "SDe", 4, "SDe: transport of G - F", true, false, false},
        {Id::HDe, "HDe", 2, "HDe: Hodge-type decomposition of d_g d^g u", false, false, false},
        {Id::OEe, "OEe", 2, "OEe: spatial curl of w", true, false, false},
        {Id::c2, "c2", 3, "c2: spatial curl of W", true, false, false},
        {Id::d5, "d5", 3, "d5: elliptic decomposition of the Laplacian of w", true, false, false},
        {Id::OE00, "OE00", 1, "OE00: antisymmetric derivative of u", true, false, false},
        {Id::cr04, "cr04", 2, "cr04: antisymmetric derivative of w", false, false, false},
        {Id::cra0, "cra0", 1, "cra0: w-derivative of u", true, false, false},
        {Id::cra1, "cra1", 1, "cra1: dual curl of u", true, false, false},
        {Id::UM, "fd-um-local", 2, "UM: wave equation for u_plus, pointwise form", true, false, true},
        {Id::fdr, "fdr", 2, "fdr: wave equation for u_plus in divergence-friendly form", true, false, true},
        {Id::tue, "tue", 3, "tue: elliptic equation for T u_minus", true, false, true},
        {Id::OE, "OE", 1, "OE: antisymmetric derivative of an arbitrary one-form", false, true, false},
    };
    return t;
}

inline const IdentityInfo& info(Id id) {
    for (const auto& i : identity_table())
        if (i.id == id) return i;
    throw std::logic_error("unknown identity");
}

inline std::optional<Id> parse_identity(std::string_view name) {
    for (const auto& i : identity_table())
        if (name == i.name) return i.id;
    if (name == "UM") return Id::UM;
    return std::nullopt;
}

// Optional per-term multipliers, used when checking the sensitivity of an
// identity to individual terms.  Keyed by term tag and 0-based term index.
struct TermOverrides {
    std::map<std::string, std::map<int, double>> factors;
};
inline thread_local const TermOverrides* g_term_overrides = nullptr;

template <class S>
class TermSum {
public:
    explicit TermSum(std::string tag = {}) : tag_(std::move(tag)) {}
    void add(const S& t, double c = 1.0) {
        const int idx = count_++;
        if (g_term_overrides) {
            auto it = g_term_overrides->factors.find(tag_);
            if (it != g_term_overrides->factors.end()) {
                auto jt = it->second.find(idx);
                if (jt != it->second.end()) c *= jt->second;
            }
        }
        scale_ = std::max(scale_, std::abs(c) * magnitude(t));
        if (value_) *value_ += c * t;
        else value_ = c * t;
    }
    bool empty() const { return !value_; }
    const S& value() const { return *value_; }
    double scale() const { return scale_; }
    int count() const { return count_; }

private:
    std::string tag_;
    std::optional<S> value_;
    double scale_ = 0.0;
    int count_ = 0;
};

template <class S>
struct Component {
    std::string label;
    S residual;
    double scale = 0.0;
};

template <class S>
Component<S> make_component(std::string label, const TermSum<S>& lhs, const TermSum<S>& rhs) {
    return Component<S>{std::move(label), lhs.value() - rhs.value(), std::max(lhs.scale(), rhs.scale())};
}

namespace detail {

inline std::string idx_label(int a) { return std::to_string(a); }
inline std::string idx_label(int a, int b) { return std::to_string(a) + std::to_string(b); }

// Q^a terms of the wave equation for u, each already multiplied by Omega.
template <class S>
void q_terms(Fluid<S>& f, int a, TermSum<S>& t) {
    const S& om = f.omega();
    const S& c2 = f.cs2();
    const S& dv = f.divu();
    auto mu = [&](int k) {  // m^{a k} + u^a u^k
        S v = f.u(a) * f.u(k);
        if (k == a) v += eta(a);
        return v;
    };
    t.add(om * sum44([&](int b, int k) { return f.u(b) * (f.u(k, b) * f.u(a, k)); }));
    t.add(om * sum44([&](int b, int k) { return f.u(b) * ((f.u(a, b) * f.u(k) + f.u(a) * f.u(k, b)) * f.h(k)); }));
    t.add(om * sum4([&](int k) { return mu(k) * (dv * f.cs2(k)); }), -1.0);
    t.add(om * sum44([&](int k, int b) { return mu(k) * (f.u(b, k) * f.h(b)); }), -1.0);
    t.add(om * (c2 * f.emh() * eps_up(a, [&](int b, int c, int d) { return f.wl(d) * f.ul(c, b); })), -1.0);
    t.add(om * (c2 * (dv * f.h(a))), eta(a));
    t.add(om * (c2 * sum4([&](int b) { return eta(b) * (f.u(a, b) * f.h(b)); })), -1.0);
    t.add(om * (c2 * (f.u(a) * (dv * f.udh()))));
    t.add(om * (c2 * (f.u(a) * sum44([&](int b, int k) { return f.u(k, b) * f.u(b, k); }))));
    t.add(om * (c2 * sum44([&](int b, int k) { return f.u(b) * (f.u(k, b) * f.u(a, k)); })), -1.0);
    t.add(om * (c2 * sum4([&](int b) { return f.u(b) * f.u(a, b); }) * f.udh()), -1.0);
    t.add(om * ((1.0 - c2) * f.emh() * eps_up(a, [&](int b, int c, int d) { return f.ul(b) * (f.wl(d) * f.h(c)); })));
}

// Right-hand side of the transport equation for W^a, as separate terms.
// For spatial a the lowered and raised forms coincide.
template <class S>
void ceq1_terms(Fluid<S>& f, int a, TermSum<S>& t, const S* factor = nullptr) {
    auto add = [&](S v, double c) {
        if (factor) t.add(*factor * v, c);
        else t.add(v, c);
    };
    const S& ic2 = f.ics2();
    const S& dv = f.divu();
    add(sum4([&](int k) { return f.W(k) * f.u(a, k); }), 1.0);
    add(f.W(a) * dv, -2.0);
    add(f.u(a) * sum44([&](int b, int k) { return f.W(b) * (f.u(k) * f.ul(b, k)); }), 1.0);
    add(eps_up(a, [&](int b, int c, int d) { return f.ul(b) * sum4([&](int k) { return f.u(k, d) * f.wl(k, c); }); }), -2.0);
    add(f.emh() * (f.w(a) * f.wdh()), -2.0);
    add(ic2 * eps_up(a, [&](int b, int c, int d) {
            return f.ul(b) * (f.wl(d) * sum4([&](int k) { return f.u(k, c) * f.h(k); }));
        }), -1.0);
    add(ic2 * sum4([&](int k) {
            return eps_up(k, [&](int b, int c, int d) { return f.ul(b) * (f.wl(d) * f.h(c)); }) * f.u(a, k);
        }), -1.0);
    add(ic2 * eps_up(a, [&](int b, int c, int d) { return f.ul(b) * (f.wl(d) * f.h(c)); }) * dv, 1.0);
    add((ic2 + 2.0) * eps_up(a, [&](int b, int c, int d) {
            return f.ul(b) * (sum4([&](int k) { return f.w(k) * f.ul(k, d); }) * f.h(c));
        }), 1.0);
}

// OE for lowered components given by A(d, k...) access.
template <class S, class AL, class VA>
Component<S> oe_component(Fluid<S>& f, int a, int b, AL&& A, VA&& vortA, const std::string& tag) {
    TermSum<S> lhs(tag + ".lhs"), rhs(tag + ".rhs");
    lhs.add(A(b, a));
    lhs.add(A(a, b), -1.0);
    rhs.add(eps_dn2(a, b, [&](int c, int d) { return f.u(c) * vortA(d); }));
    rhs.add(f.ul(a) * sum4([&](int k) { return f.u(k) * A(k, b); }));
    rhs.add(f.ul(b) * sum4([&](int k) { return f.u(k) * A(k, a); }), -1.0);
    rhs.add(f.ul(b) * sum4([&](int k) { return f.u(k) * A(a, k); }));
    rhs.add(f.ul(a) * sum4([&](int k) { return f.u(k) * A(b, k); }), -1.0);
    return make_component(idx_label(a, b), lhs, rhs);
}

// Right-hand side of the spatial-curl identity for w: d_j w_i - d_i w_j.
template <class S>
S oee_rhs(Fluid<S>& f, int j, int i, TermSum<S>* terms = nullptr) {
    TermSum<S> local;
    TermSum<S>& t = terms ? *terms : local;
    const S& dv = f.divu();
    const S& wdh = f.wdh();
    t.add(eps_dn2(j, i, [&](int c, int d) { return f.u(c) * f.vortw(d); }));
    t.add(f.ul(j) * sum4([&](int k) { return f.u(k, i) * f.wl(k); }), -1.0);
    t.add(f.ul(i) * sum4([&](int k) { return f.u(k, j) * f.wl(k); }));
    t.add(f.ul(i) * (f.ul(j) * wdh), -1.0);
    t.add(f.ul(i) * sum4([&](int k) { return f.w(k) * f.ul(j, k); }));
    t.add(f.ul(i) * (f.wl(j) * dv), -1.0);
    t.add(f.ul(j) * (f.ul(i) * wdh));
    t.add(f.ul(j) * sum4([&](int k) { return f.w(k) * f.ul(i, k); }), -1.0);
    t.add(f.ul(j) * (f.wl(i) * dv));
    return t.value();
}

}  // namespace detail

template <class S>
std::vector<Component<S>> wte_h(Fluid<S>& f) {
    TermSum<S> lhs("WTe-h.lhs"), rhs("WTe-h.rhs");
    lhs.add(f.box([&](int b, int c) { return f.h(b, c); }));
    const S& om = f.omega();
    const S& c2 = f.cs2();
    const S& dv = f.divu();
    rhs.add(om * ((1.0 - c2) * sum44([&](int b, int k) { return f.u(b) * (f.u(k, b) * f.h(k)); })));
    rhs.add(om * (dv * sum4([&](int b) { return f.u(b) * f.cs2(b); })));
    rhs.add(om * (c2 * (dv * f.udh())), -1.0);
    rhs.add(om * (c2 * sum44([&](int k, int b) { return f.u(b, k) * f.u(k, b); })), -1.0);
    return {make_component("", lhs, rhs)};
}

template <class S>
std::vector<Component<S>> wte_u(Fluid<S>& f) {
    std::vector<Component<S>> out;
    for (int a = 0; a < 4; ++a) {
        TermSum<S> lhs("WTe-u.lhs"), rhs("WTe-u.rhs");
        lhs.add(f.box([&](int b, int c) { return f.u(a, b, c); }));
        rhs.add(f.cs2() * (f.omega() * (f.emh() * f.W(a))), -1.0);
        detail::q_terms(f, a, rhs);
        out.push_back(make_component(detail::idx_label(a), lhs, rhs));
    }
    return out;
}

template <class S>
std::vector<Component<S>> ceq(Fluid<S>& f) {
    std::vector<Component<S>> out;
    for (int a = 0; a < 4; ++a) {
        TermSum<S> lhs("CEQ.lhs"), rhs("CEQ.rhs");
        lhs.add(sum4([&](int k) { return f.u(k) * f.w(a, k); }));
        rhs.add(f.u(a) * f.wdh(), -1.0);
        rhs.add(sum4([&](int k) { return f.w(k) * f.u(a, k); }));
        rhs.add(f.w(a) * f.divu(), -1.0);
        out.push_back(make_component(detail::idx_label(a), lhs, rhs));
    }
    return out;
}

template <class S>
std::vector<Component<S>> ceq0(Fluid<S>& f) {
    TermSum<S> lhs("CEQ0.lhs"), rhs("CEQ0.rhs");
    lhs.add(sum4([&](int a) { return f.w(a, a); }));
    rhs.add(f.wdh(), -1.0);
    return {make_component("", lhs, rhs)};
}

template <class S>
std::vector<Component<S>> ceq1(Fluid<S>& f) {
    std::vector<Component<S>> out;
    for (int a = 0; a < 4; ++a) {
        TermSum<S> lhs("CEQ1.lhs"), rhs("CEQ1.rhs");
        lhs.add(sum4([&](int k) { return f.u(k) * f.W(a, k); }));
        detail::ceq1_terms(f, a, rhs);
        out.push_back(make_component(detail::idx_label(a), lhs, rhs));
    }
    return out;
}

template <class S>
std::vector<Component<S>> hde(Fluid<S>& f) {
    std::vector<Component<S>> out;
    for (int a = 0; a < 4; ++a) {
        TermSum<S> lhs("HDe.lhs"), rhs("HDe.rhs");
        lhs.add(sum4([&](int c) { return eta(c) * f.u(a, c, c); }));
        rhs.add(f.vort_of(a, [&](int d, int c) { return f.vortul(d, c); }), -1.0);
        rhs.add(f.divu(a), eta(a));
        DerivCache<S> X(sum4([&](int c) { return f.u(c) * f.u(a, c); }) - f.u(a) * f.divu());
        rhs.add(sum4([&](int k) { return f.u(k) * X(k); }), -1.0);
        rhs.add(sum44([&](int b, int c) { return f.ul(b) * (f.u(a, c) * (eta(b) * f.u(c, b))); }), 2.0);
        rhs.add(f.divu() * sum4([&](int b) { return f.ul(b) * (eta(b) * f.u(a, b)); }), -2.0);
        rhs.add(f.u(a) * sum44([&](int c, int b) { return f.ul(b, c) * (eta(c) * f.u(b, c)); }));
        rhs.add(sum44([&](int c, int b) { return f.u(c) * (f.ul(b, c) * f.u(b, a)); }), -eta(a));
        out.push_back(make_component(detail::idx_label(a), lhs, rhs));
    }
    return out;
}

template <class S>
std::vector<Component<S>> oe(Fluid<S>& f) {
    std::vector<Component<S>> out;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            out.push_back(detail::oe_component(
                f, a, b, [&](int d, auto... k) -> const S& { return f.A(d, k...); },
                [&](int d) -> const S& { return f.vortA(d); }, "OE"));
    return out;
}

template <class S>
std::vector<Component<S>> cr04(Fluid<S>& f) {
    std::vector<Component<S>> out;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            out.push_back(detail::oe_component(
                f, a, b, [&](int d, auto... k) -> const S& { return f.wl(d, k...); },
                [&](int d) -> const S& { return f.vortw(d); }, "cr04"));
    return out;
}

template <class S>
std::vector<Component<S>> oe00(Fluid<S>& f) {
    std::vector<Component<S>> out;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            TermSum<S> lhs("OE00.lhs"), rhs("OE00.rhs");
            lhs.add(f.ul(b, a));
            lhs.add(f.ul(a, b), -1.0);
            rhs.add(f.emh() * eps_dn2(a, b, [&](int c, int d) { return f.u(c) * f.w(d); }));
            rhs.add(f.ul(b) * f.h(a), -1.0);
            rhs.add(f.ul(a) * f.h(b));
            out.push_back(make_component(detail::idx_label(a, b), lhs, rhs));
        }
    return out;
}

template <class S>
std::vector<Component<S>> cra0(Fluid<S>& f) {
    std::vector<Component<S>> out;
    for (int a = 0; a < 4; ++a) {
        TermSum<S> lhs("cra0.lhs"), rhs("cra0.rhs");
        lhs.add(sum4([&](int k) { return f.w(k) * f.ul(a, k); }));
        rhs.add(sum4([&](int k) { return f.w(k) * f.ul(k, a); }));
        rhs.add(f.ul(a) * f.wdh(), -1.0);
        out.push_back(make_component(detail::idx_label(a), lhs, rhs));
    }
    return out;
}

template <class S>
std::vector<Component<S>> cra1(Fluid<S>& f) {
    std::vector<Component<S>> out;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            TermSum<S> lhs("cra1.lhs"), rhs("cra1.rhs");
            lhs.add(eps_up2(a, b, [&](int c, int d) { return f.ul(d, c); }));
            rhs.add(f.emh() * (f.w(a) * f.u(b)));
            rhs.add(f.emh() * (f.u(a) * f.w(b)), -1.0);
            rhs.add(eps_up2(a, b, [&](int c, int d) { return f.ul(d) * f.h(c); }), -1.0);
            out.push_back(make_component(detail::idx_label(a, b), lhs, rhs));
        }
    return out;
}

template <class S>
std::vector<Component<S>> oee(Fluid<S>& f) {
    std::vector<Component<S>> out;
    for (int i = 1; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            // d_j w_i - d_i w_j
            TermSum<S> lhs("OEe.lhs"), rhs("OEe.rhs");
            lhs.add(f.wl(i, j));
            lhs.add(f.wl(j, i), -1.0);
            detail::oee_rhs(f, j, i, &rhs);
            out.push_back(make_component(detail::idx_label(j, i), lhs, rhs));
        }
    return out;
}

template <class S>
std::vector<Component<S>> c2(Fluid<S>& f) {
    std::vector<Component<S>> out;
    for (int i = 1; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            TermSum<S> lhs("c2.lhs"), rhs("c2.rhs");
            lhs.add(f.Wl(j, i));
            lhs.add(f.Wl(i, j), -1.0);
            rhs.add(eps_dn2(i, j, [&](int c, int d) { return f.u(c) * f.G(d); }));
            rhs.add(f.ul(i) * sum4([&](int k) { return f.Wl(k) * f.u(k, j); }), -1.0);
            rhs.add(f.ul(j) * sum4([&](int k) { return f.Wl(k) * f.u(k, i); }));
            const S uj = f.ul(j);
            const S mui = -1.0 * f.ul(i);
            detail::ceq1_terms(f, i, rhs, &uj);
            detail::ceq1_terms(f, j, rhs, &mui);
            out.push_back(make_component(detail::idx_label(i, j), lhs, rhs));
        }
    return out;
}

// Elliptic decomposition of the spatial Laplacian of w_i, with the sign of the
// mixed second-order term fixed by u_a w^a = 0, i.e. w^0 = (u^0)^{-1} u^m w_m.
template <class S>
std::vector<Component<S>> d5(Fluid<S>& f) {
    std::vector<Component<S>> out;
    S iu0 = recip(f.u(0));
    S iu0sq = iu0 * iu0;
    std::array<std::array<DerivCache<S>, 4>, 4> O;
    for (int j = 1; j < 4; ++j)
        for (int i = 1; i < 4; ++i)
            if (i != j) O[j][i] = DerivCache<S>(detail::oee_rhs(f, j, i));
    std::array<std::array<DerivCache<S>, 4>, 4> B;
    for (int m = 1; m < 4; ++m)
        for (int j = 1; j < 4; ++j) B[m][j] = DerivCache<S>(iu0sq * (f.u(m) * f.u(j)));
    std::array<DerivCache<S>, 4> a;
    for (int m = 1; m < 4; ++m) a[m] = DerivCache<S>(iu0 * f.u(m));
    S y = f.wl(1) * a[1](0) + f.wl(2) * a[2](0) + f.wl(3) * a[3](0);
    DerivCache<S> Y(y);
    S uu = f.u(1) * f.u(1) + f.u(2) * f.u(2) + f.u(3) * f.u(3);
    DerivCache<S> C1(iu0sq * (uu * f.wdh()));
    S uwdu = f.zero();
    for (int m = 1; m < 4; ++m) uwdu += f.u(m) * sum4([&](int k) { return f.w(k) * f.ul(m, k); });
    DerivCache<S> C2(iu0sq * uwdu);
    S uw = f.u(1) * f.wl(1) + f.u(2) * f.wl(2) + f.u(3) * f.wl(3);
    DerivCache<S> C3(iu0sq * (uw * f.divu()));
    for (int i = 1; i < 4; ++i) {
        TermSum<S> lhs("d5.lhs"), rhs("d5.rhs");
        lhs.add(f.wl(i, 1, 1) + f.wl(i, 2, 2) + f.wl(i, 3, 3));
        S mixed = f.zero();
        for (int m = 1; m < 4; ++m)
            for (int j = 1; j < 4; ++j) mixed += B[m][j]() * f.wl(i, j, m);
        lhs.add(mixed, -1.0);
        S t1 = f.zero();
        for (int j = 1; j < 4; ++j)
            if (j != i) t1 += O[j][i](j);
        rhs.add(t1);
        rhs.add(f.wdh(i), -1.0);
        rhs.add(Y(i), -1.0);
        S t4 = f.zero();
        for (int m = 1; m < 4; ++m)
            for (int j = 1; j < 4; ++j) t4 += B[m][j](i) * f.wl(m, j);
        rhs.add(t4);
        S t5 = f.zero();
        for (int m = 1; m < 4; ++m)
            for (int j = 1; j < 4; ++j)
                if (m != i) t5 += B[m][j]() * O[m][i](j);
        rhs.add(t5, -1.0);
        rhs.add(C1(i));
        rhs.add(C2(i), -1.0);
        rhs.add(C3(i));
        out.push_back(make_component(detail::idx_label(i), lhs, rhs));
    }
    return out;
}

// Gamma, F^a and E^a of the transport equation for G - F.
template <class S>
struct SdeParts {
    S gamma;
    std::array<S, 4> F, E;
};

template <class S>
std::vector<Component<S>> sde(Fluid<S>& f, SdeParts<S>* parts = nullptr) {
    const S& ic2 = f.ics2();
    const S& emh = f.emh();
    const S& dv = f.divu();
    const S& wdh = f.wdh();
    const S& c3cp = f.c3cp();
    // Gamma = -2 d^g w^k d_g u_k - 2 e^-h w^l vort_l(w) + e^-h w_k W^k
    S gam = -2.0 * sum44([&](int c, int k) { return eta(c) * (f.w(k, c) * f.ul(k, c)); });
    gam += -2.0 * (emh * sum4([&](int l) { return f.w(l) * f.vortwl(l); }));
    gam += emh * sum4([&](int k) { return f.wl(k) * f.W(k); });
    DerivCache<S> Gam(gam);
    std::array<DerivCache<S>, 4> F;
    for (int a = 0; a < 4; ++a) {
        S v = -2.0 * (ic2 * eps_up(a, [&](int b, int c, int d) { return f.ul(b) * (f.h(c) * f.Wl(d)); }));
        v += -2.0 * (f.u(a) * sum44([&](int c, int l) { return eta(c) * (f.w(l, c) * f.ul(l, c)); }));
        v += 2.0 * (dv * sum4([&](int l) { return f.ul(l) * f.w(l, a); })) * eta(a);
        v += -2.0 * eta(a) * (ic2 * sum4([&](int l) { return f.h(l) * f.w(l, a); }));
        F[a] = DerivCache<S>(v);
    }
    // e^-h (vort_l(w) + eps_l^{bcd} u_b w_d d_c h), lowered
    std::array<DerivCache<S>, 4> Vw;
    for (int l = 0; l < 4; ++l)
        Vw[l] = DerivCache<S>(emh * (f.vortwl(l) + eta(l) * eps_up(l, [&](int b, int c, int d) {
                                                       return f.ul(b) * (f.wl(d) * f.h(c));
                                                   })));
    // lowered-index helpers for second derivatives
    auto ddw_up = [&](int k, int c, int b) -> const S& { return f.w(k, c, b); };
    auto box_u_l = [&](int k) { return sum4([&](int c) { return eta(c) * f.ul(k, c, c); }); };
    auto eps_mixed = [&](int d, auto&& g) {  // sum_{e,m,n} eps_d^{e m n} g(e, m, n)
        return eta(d) * eps_up(d, g);
    };
    std::vector<Component<S>> out;
    for (int a = 0; a < 4; ++a) {
        const double ea = eta(a);
        TermSum<S> lhs("SDe.lhs"), rhs("SDe.rhs");
        lhs.add(sum4([&](int k) { return f.u(k) * f.G(a, k); }));
        lhs.add(sum4([&](int k) { return f.u(k) * F[a](k); }), -1.0);
        rhs.add(Gam(a), ea);
        // E^a
        rhs.add(eps_up(a, [&](int b, int c, int d) {
            return f.ul(b) * sum4([&](int k) { return f.u(k, c) * f.Wl(d, k); });
        }));
        rhs.add(eps_up(a, [&](int b, int c, int d) {
                    return sum4([&](int k) { return f.u(k) * f.ul(b, k); }) * f.Wl(d, c);
                }), -1.0);
        rhs.add(ic2 * eps_up(a, [&](int b, int c, int d) {
                    return sum4([&](int k) { return f.u(k) * f.ul(b, k); }) * (f.h(c) * f.Wl(d));
                }), 2.0);
        rhs.add(ic2 * eps_up(a, [&](int b, int c, int d) {
                    return f.ul(b) * (f.h(c) * sum4([&](int k) { return f.u(k) * f.Wl(d, k); }));
                }), 2.0);
        rhs.add(dv * eps_up(a, [&](int b, int c, int d) { return f.ul(b) * f.Wl(d, c); }), 2.0);
        auto t6 = [&] {
            return eps_up(a, [&](int b, int c, int d) {
                return f.ul(b) * sum4([&](int k) { return f.ul(d, k) * f.W(k, c); });
            });
        };
        rhs.add(t6(), -1.0);
        rhs.add(emh * sum4([&](int k) { return f.W(k) * f.ul(k) * sum4([&](int c) { return f.u(c) * f.w(a, c); }); }), -1.0);
        rhs.add(emh * sum4([&](int k) { return f.W(k) * f.ul(k) * sum4([&](int c) { return f.u(c) * f.wl(c, a); }); }), ea);
        rhs.add(emh * (f.u(a) * sum4([&](int k) { return f.W(k) * sum4([&](int c) { return f.u(c) * f.wl(k, c); }); })));
        rhs.add(emh * (f.u(a) * sum4([&](int k) { return f.W(k) * sum4([&](int c) { return f.u(c) * f.wl(c, k); }); })), -1.0);
        rhs.add(emh * (sum4([&](int k) { return f.wl(k) * f.W(k); }) * f.h(a)), ea);
        rhs.add(emh * sum4([&](int k) { return f.wl(k) * f.W(k, a); }), -ea);
        {
            // - eps_k^a_{c d} eps^{d b m n} c^-2 e^-h u^c u_b w_n W^k d_m h
            std::optional<S> acc;
            for (const auto& q : tensor::eps_all()) {
                if (q.b != a) continue;
                const int k = q.a, c = q.c, d = q.d;
                S inner = eps_up(d, [&](int b, int m, int n) { return f.ul(b) * (f.wl(n) * f.h(m)); });
                S t = (q.sign * ea) * (f.u(c) * (f.W(k) * inner));
                if (acc) *acc += t;
                else acc = std::move(t);
            }
            rhs.add(ic2 * (emh * *acc), -1.0);
        }
        auto t11 = [&] {
            return eps_up(a, [&](int b, int c, int d) {
                return sum4([&](int k) { return f.W(k) * f.ul(b, k); }) * f.ul(d, c);
            });
        };
        rhs.add(t11());
        rhs.add(emh * (f.w(a) * sum4([&](int k) { return f.W(k) * f.h(k); })), -2.0);
        rhs.add(sum44([&](int c, int k) { return eta(c) * f.ul(k, c) * (ea * ddw_up(k, a, c)); }), 4.0);
        rhs.add(sum4([&](int b) {
                    return f.u(b) * f.u(a, b) *
                           sum44([&](int c, int k) { return eta(c) * f.w(k, c) * f.ul(k, c); });
                }), 2.0);
        rhs.add(sum44([&](int b, int c) {
                    return f.ul(b) * f.u(a, c) *
                           sum4([&](int k) { return eta(c) * f.w(k, c) * (eta(b) * f.ul(k, b)); });
                }), -2.0);
        rhs.add(f.u(a) * sum4([&](int b) {
                    return f.ul(b) * sum4([&](int k) {
                               return sum4([&](int c) { return eta(c) * ddw_up(k, c, c); }) * (eta(b) * f.ul(k, b));
                           });
                }), -2.0);
        rhs.add(f.u(a) * sum44([&](int b, int c) {
                    return f.u(b) * sum4([&](int k) { return f.ul(k, c) * (eta(c) * ddw_up(k, c, b)); });
                }), 2.0);
        rhs.add(sum44([&](int b, int c) {
                    return f.ul(b) * f.u(a, c) *
                           sum4([&](int k) { return eta(b) * f.w(k, b) * (eta(c) * f.ul(k, c)); });
                }), 2.0);
        rhs.add(f.u(a) * sum44([&](int b, int c) {
                    return f.ul(b) * sum4([&](int k) { return eta(c) * f.ul(k, c) * (eta(b) * ddw_up(k, b, c)); });
                }), 2.0);
        rhs.add(f.u(a) * (wdh * sum4([&](int k) { return f.u(k) * box_u_l(k); })), -2.0);
        rhs.add(f.u(a) * sum4([&](int k) {
                    return sum4([&](int l) { return f.w(l) * f.u(k, l); }) * box_u_l(k);
                }), 2.0);
        rhs.add(f.u(a) * (dv * sum4([&](int k) { return f.w(k) * box_u_l(k); })), -2.0);
        {
            auto dwa = [&](int l) { return ea * f.w(l, a); };  // d^a w^l
            rhs.add(sum4([&](int l) {
                        return sum44([&](int b, int c) { return f.ul(b) * f.ul(l, c) * (eta(b) * f.u(c, b)); }) * dwa(l);
                    }), 4.0);
            rhs.add(sum4([&](int l) {
                        return dv * sum4([&](int b) { return f.ul(b) * (eta(b) * f.ul(l, b)); }) * dwa(l);
                    }), -4.0);
            rhs.add(sum4([&](int l) {
                        return f.ul(l) * sum44([&](int c, int b) { return f.ul(b, c) * (eta(c) * f.u(b, c)); }) * dwa(l);
                    }), 2.0);
            rhs.add(sum4([&](int l) {
                        return sum44([&](int c, int b) { return f.u(c) * f.ul(b, c) * f.u(b, l); }) * dwa(l);
                    }), -2.0);
            rhs.add(ic2 * sum4([&](int l) {
                        return sum4([&](int k) { return f.u(k, l) * f.h(k); }) * dwa(l);
                    }), -2.0);
            rhs.add(ic2 * sum4([&](int l) {
                        return f.h(l) * sum4([&](int k) { return f.u(k) * (ea * f.w(l, a, k)); });
                    }), 2.0);
        }
        rhs.add(sum4([&](int l) { return f.w(l) * (ea * Vw[l](a)); }), 2.0);
        rhs.add(ic2 * eps_up(a, [&](int b, int c, int d) {
                    return f.ul(b) * sum4([&](int k) { return f.u(k, c) * f.h(k); }) * f.Wl(d);
                }), -2.0);
        rhs.add(sum4([&](int l) {
                    return sum4([&](int c) { return f.u(c) * f.ul(l, c); }) *
                           sum4([&](int k) { return f.u(k) * (ea * f.w(l, a, k)); });
                }), 2.0);
        rhs.add(sum4([&](int l) {
                    return f.ul(l) * dv * sum4([&](int k) { return f.u(k) * (ea * f.w(l, a, k)); });
                }), -2.0);
        rhs.add(sum4([&](int k) {
                    return (ea * f.ul(k, a)) * sum4([&](int c) { return eta(c) * ddw_up(k, c, c); });
                }), -2.0);
        rhs.add(dv * sum4([&](int b) {
                    return f.ul(b) * sum4([&](int k) { return eta(b) * f.w(k, b) * (ea * f.ul(k, a)); });
                }), -2.0);
        rhs.add(sum44([&](int b, int c) {
                    return f.ul(b) * f.u(c) * sum4([&](int k) { return ea * f.ul(k, a) * (eta(b) * ddw_up(k, c, b)); });
                }), -2.0);
        rhs.add(wdh * sum44([&](int k, int c) { return f.u(k) * f.u(c) * (ea * f.ul(k, a, c)); }), 2.0);
        rhs.add(sum44([&](int c, int k) {
                    return f.u(c) * sum4([&](int l) { return f.w(l) * f.u(k, l); }) * (ea * f.ul(k, a, c));
                }), -2.0);
        rhs.add(dv * sum44([&](int c, int k) { return f.u(c) * f.w(k) * (ea * f.ul(k, a, c)); }), 2.0);
        rhs.add(sum4([&](int b) {
                    return sum44([&](int k, int c) { return f.u(k) * f.u(c, k) * f.ul(b, c); }) * (ea * f.w(b, a));
                }), -2.0);
        rhs.add(sum44([&](int b, int c) {
                    return f.ul(b) * f.u(c) * sum4([&](int k) { return ea * ddw_up(k, c, a) * (eta(b) * f.ul(k, b)); });
                }), 2.0);
        rhs.add(sum44([&](int k, int c) {
                    return f.u(k) * f.u(c) * sum4([&](int b) { return f.ul(b, c) * (ea * ddw_up(b, k, a)); });
                }), -2.0);
        rhs.add(dv * sum4([&](int b) {
                    return f.ul(b) * sum4([&](int k) { return ea * f.w(k, a) * (eta(b) * f.ul(k, b)); });
                }), 2.0);
        // double-epsilon terms with eps_d^{e m n}
        auto udh_m = [&](int m) { return sum4([&](int k) { return f.u(k, m) * f.h(k); }); };
        auto ee = [&](auto&& g) {  // sum eps^{a b c d} eps_d^{e m n} g(b, c, d, e, m, n)
            return eps_up(a, [&](int b, int c, int d) {
                return eps_mixed(d, [&](int e, int m, int n) { return g(b, c, d, e, m, n); });
            });
        };
        rhs.add(c3cp * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.wl(n) * f.h(c) * udh_m(m);
                }), -2.0);
        rhs.add(ic2 * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e, c) * f.wl(n) * udh_m(m);
                }));
        rhs.add(ic2 * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.wl(n, c) * udh_m(m);
                }));
        rhs.add(ic2 * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.wl(n) * sum4([&](int k) { return f.h(k) * f.u(k, c, m); });
                }));
        rhs.add(ic2 * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.wl(n) * sum4([&](int k) { return f.u(k, m) * f.h(c, k); });
                }));
        rhs.add(emh * eps_up(a, [&](int b, int c, int d) { return f.ul(b) * f.wl(d) * wdh * f.h(c); }), -2.0);
        rhs.add(emh * eps_up(a, [&](int b, int c, int d) {
                    return f.ul(b) * sum4([&](int k) { return f.w(k) * f.h(k); }) * f.wl(d, c);
                }), 2.0);
        rhs.add(emh * eps_up(a, [&](int b, int c, int d) {
                    return f.ul(b) * f.wl(d) * sum4([&](int k) { return f.w(k, c) * f.h(k); });
                }), 2.0);
        rhs.add(emh * eps_up(a, [&](int b, int c, int d) {
                    return f.ul(b) * f.wl(d) * sum4([&](int k) { return f.w(k) * f.h(c, k); });
                }), 2.0);
        // double-epsilon terms with eps^{k e m n}
        auto ek = [&](auto&& g) {  // sum eps^{a b c d} eps^{k e m n} g(b, c, d, k, e, m, n)
            return eps_up(a, [&](int b, int c, int d) {
                return sum4([&](int k) {
                    return eps_up(k, [&](int e, int m, int n) { return g(b, c, d, k, e, m, n); });
                });
            });
        };
        rhs.add(c3cp * ek([&](int b, int c, int d, int k, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.wl(n) * f.h(c) * f.h(m) * f.ul(d, k);
                }), -2.0);
        rhs.add(ic2 * ek([&](int b, int c, int d, int k, int e, int m, int n) {
                    return f.ul(b) * f.wl(n) * f.ul(e, c) * f.h(m) * f.ul(d, k);
                }));
        rhs.add(ic2 * ek([&](int b, int c, int d, int k, int e, int m, int n) {
                    return f.ul(e) * f.ul(b) * f.wl(n, c) * f.h(m) * f.ul(d, k);
                }));
        rhs.add(ic2 * ek([&](int b, int c, int d, int k, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.wl(n) * f.ul(d, k) * f.h(c, m);
                }));
        rhs.add(ic2 * ek([&](int b, int c, int d, int k, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.wl(n) * f.h(m) * f.ul(d, c, k);
                }));
        // remaining eps_d^{e m n} terms
        rhs.add(c3cp * dv * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.wl(n) * f.h(c) * f.h(m);
                }), 2.0);
        rhs.add(ic2 * dv * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e, c) * f.wl(n) * f.h(m);
                }), -1.0);
        rhs.add(ic2 * dv * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.wl(n, c) * f.h(m);
                }), -1.0);
        rhs.add(ic2 * dv * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.wl(n) * f.h(c, m);
                }), -1.0);
        rhs.add(ic2 * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.wl(n) * f.h(m) * f.divu(c);
                }), -1.0);
        auto wdu = [&](int n) { return sum4([&](int k) { return f.w(k) * f.ul(k, n); }); };
        rhs.add(c3cp * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.h(c) * wdu(n) * f.h(m);
                }), 2.0);
        rhs.add((ic2 + 2.0) * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e, c) * wdu(n) * f.h(m);
                }), -1.0);
        rhs.add((ic2 + 2.0) * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(e) * f.ul(b) * sum4([&](int k) { return f.w(k, c) * f.ul(k, n); }) * f.h(m);
                }), -1.0);
        rhs.add((ic2 + 2.0) * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * f.h(m) * sum4([&](int k) { return f.w(k) * f.ul(k, c, n); });
                }), -1.0);
        rhs.add((ic2 + 2.0) * ee([&](int b, int c, int, int e, int m, int n) {
                    return f.ul(b) * f.ul(e) * wdu(n) * f.h(c, m);
                }), -1.0);
        if (parts) {
            parts->F[a] = F[a]();
            parts->E[a] = rhs.value() - ea * Gam(a);
        }
        out.push_back(make_component(detail::idx_label(a), lhs, rhs));
    }
    if (parts) parts->gamma = Gam();
    return out;
}

// Wave equation for u_plus = u - u_minus, with P u_minus = e^-h W.
template <class S>
std::vector<Component<S>> um(Fluid<S>& f) {
    std::vector<Component<S>> out;
    const S& om = f.omega();
    const S& c2 = f.cs2();
    for (int a = 0; a < 4; ++a) {
        TermSum<S> lhs("UM.lhs"), rhs("UM.rhs");
        lhs.add(f.box([&](int b, int c) { return f.u(a, b, c); }));
        lhs.add(f.box([&](int b, int c) { return f.um(a, b, c); }), -1.0);
        rhs.add(om * (c2 + 1.0) * sum44([&](int b, int c) { return f.u(b) * f.u(c) * f.um(a, b, c); }));
        rhs.add(om * c2 * f.um(a), -1.0);
        detail::q_terms(f, a, rhs);
        out.push_back(make_component(detail::idx_label(a), lhs, rhs));
    }
    return out;
}

template <class S>
std::vector<Component<S>> fdr(Fluid<S>& f) {
    std::vector<Component<S>> out;
    const S& om = f.omega();
    const S& c2 = f.cs2();
    S iu0 = recip(f.u(0));
    S k0 = om * (c2 + 1.0);
    std::array<DerivCache<S>, 4> K;
    for (int c = 0; c < 4; ++c) K[c] = DerivCache<S>(k0 * f.u(c));
    S tu0 = iu0 * sum4([&](int k) { return f.u(k) * f.u(0, k); });
    for (int a = 0; a < 4; ++a) {
        S udum = sum4([&](int c) { return f.u(c) * f.um(a, c); });
        DerivCache<S> Z(-1.0 * (k0 * (f.u(0) * udum)));
        TermSum<S> lhs("fdr.lhs"), rhs("fdr.rhs");
        lhs.add(f.box([&](int b, int c) { return f.u(a, b, c); }));
        lhs.add(f.box([&](int b, int c) { return f.um(a, b, c); }), -1.0);
        rhs.add(sum4([&](int b) { return f.g(0, b) * Z(b); }));
        detail::q_terms(f, a, rhs);
        rhs.add(sum4([&](int i) { return i == 0 ? f.zero() : (iu0 * f.u(i) + f.g(0, i)) * Z(i); }), -1.0);
        rhs.add(tu0 * (k0 * udum), -1.0);
        rhs.add(sum44([&](int b, int c) { return f.u(b) * K[c](b) * f.um(a, c); }), -1.0);
        rhs.add(om * c2 * f.um(a), -1.0);
        out.push_back(make_component(detail::idx_label(a), lhs, rhs));
    }
    return out;
}

template <class S>
std::vector<Component<S>> tue(Fluid<S>& f) {
    std::vector<Component<S>> out;
    S iu0 = recip(f.u(0));
    std::array<DerivCache<S>, 4> av;  // u^k / u^0
    for (int k = 0; k < 4; ++k) av[k] = DerivCache<S>(iu0 * f.u(k));
    S emhiu0 = iu0 * f.emh();
    for (int a = 0; a < 4; ++a) {
        DerivCache<S> V(sum4([&](int k) { return av[k]() * f.um(a, k); }));
        TermSum<S> lhs("tue.lhs"), rhs("tue.rhs");
        lhs.add(V());
        lhs.add(sum44([&](int b, int c) { return f.P(b, c) * V(b, c); }), -1.0);
        rhs.add(emhiu0 * (f.cs2() * (f.W(a) * f.divu())));
        detail::ceq1_terms(f, a, rhs, &emhiu0);
        rhs.add(sum44([&](int b, int c) { return sum4([&](int k) { return av[k]() * f.P(b, c, k); }) * f.um(a, b, c); }));
        rhs.add(sum44([&](int b, int c) {
                    return f.P(b, c) * sum4([&](int k) { return av[k](b, c) * f.um(a, k); });
                }), -1.0);
        rhs.add(sum44([&](int b, int c) {
                    return f.P(b, c) * sum4([&](int k) { return av[k](b) * f.um(a, c, k); });
                }), -1.0);
        rhs.add(sum44([&](int b, int c) {
                    return f.P(b, c) * sum4([&](int k) { return av[k](c) * f.um(a, b, k); });
                }), -1.0);
        out.push_back(make_component(detail::idx_label(a), lhs, rhs));
    }
    return out;
}

template <class S>
std::vector<Component<S>> evaluate(Fluid<S>& f, Id id) {
    switch (id) {
        case Id::WTe_h: return wte_h(f);
        case Id::WTe_u: return wte_u(f);
        case Id::CEQ: return ceq(f);
        case Id::CEQ0: return ceq0(f);
        case Id::CEQ1: return ceq1(f);
        case Id::SDe: return sde(f);
        case Id::HDe: return hde(f);
        case Id::OEe: return oee(f);
        case Id::c2: return c2(f);
        case Id::d5: return d5(f);
        case Id::OE00: return oe00(f);
        case Id::cr04: return cr04(f);
        case Id::cra0: return cra0(f);
        case Id::cra1: return cra1(f);
        case Id::UM: return um(f);
        case Id::fdr: return fdr(f);
        case Id::tue: return tue(f);
        case Id::OE: return oe(f);
    }
    throw std::logic_error("unhandled identity");
}

}  // namespace rel_euler::calc
