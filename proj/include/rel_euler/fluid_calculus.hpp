#pragma once

// Differential quantities of a fluid state (h, u^a) over a generic scalar type S.
//
// S must provide: copy, +, -, unary -, S*S, double*S, S+double, d(int) const,
// and the free functions exp, recip, zero_like, magnitude found by ADL.

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rel_euler/tensor.hpp"

namespace rel_euler::calc {

using tensor::eta;

// Lazily memoized partial derivatives of one scalar.
template <class S>
class DerivCache {
public:
    DerivCache() = default;
    explicit DerivCache(S base) : base_(std::make_shared<S>(std::move(base))), cache_(std::make_shared<Map>()) {}

    const S& operator()() const { return *base_; }
    template <class... K>
    const S& operator()(K... k) const {
        std::array<int, 4> counts{0, 0, 0, 0};
        ((++counts.at(static_cast<std::size_t>(k))), ...);
        return get(counts);
    }
    bool empty() const { return !base_; }

private:
    using Map = std::map<int, S>;
    const S& get(const std::array<int, 4>& counts) const {
        int key = counts[0] + 16 * counts[1] + 256 * counts[2] + 4096 * counts[3];
        if (key == 0) return *base_;
        auto it = cache_->find(key);
        if (it != cache_->end()) return it->second;
        int v = 0;
        while (counts[v] == 0) ++v;
        std::array<int, 4> lower = counts;
        --lower[v];
        S r = get(lower).d(v);
        return cache_->emplace(key, std::move(r)).first->second;
    }
    std::shared_ptr<S> base_;
    std::shared_ptr<Map> cache_;
};

using Vec4Idx = std::array<int, 4>;

// Sum_{b,c,d} eps^{a b c d} f(b, c, d)
template <class F>
auto eps_up(int a, F&& f) {
    const auto& tail = tensor::eps_tail(a);
    auto acc = static_cast<double>(-tail[0].sign) * f(tail[0].b, tail[0].c, tail[0].d);
    for (int k = 1; k < 6; ++k) acc += static_cast<double>(-tail[k].sign) * f(tail[k].b, tail[k].c, tail[k].d);
    return acc;
}

// Sum_{c,d} eps^{a b c d} f(c, d)
template <class F>
auto eps_up2(int a, int b, F&& f) {
    std::optional<decltype(f(0, 0))> acc;
    for (const auto& p : tensor::eps_tail(a)) {
        if (p.b != b) continue;
        auto t = static_cast<double>(-p.sign) * f(p.c, p.d);
        if (acc) *acc += t;
        else acc = std::move(t);
    }
    return *acc;
}

// Sum_{c,d} eps_{a b c d} f(c, d), all indices down
template <class F>
auto eps_dn2(int a, int b, F&& f) {
    std::optional<decltype(f(0, 0))> acc;
    for (const auto& p : tensor::eps_tail(a)) {
        if (p.b != b) continue;
        auto t = static_cast<double>(p.sign) * f(p.c, p.d);
        if (acc) *acc += t;
        else acc = std::move(t);
    }
    return *acc;
}

// Sum_k f(k), k = 0..3
template <class F>
auto sum4(F&& f) {
    auto acc = f(0);
    for (int k = 1; k < 4; ++k) acc += f(k);
    return acc;
}

template <class F>
auto sum44(F&& f) {
    return sum4([&](int a) { return sum4([&](int b) { return f(a, b); }); });
}

template <class S>
class Fluid {
public:
    Fluid(const S& h, const std::array<S, 4>& u, double theta) : theta_(theta) {
        h_ = DerivCache<S>(h);
        for (int a = 0; a < 4; ++a) {
            u_[a] = DerivCache<S>(u[a]);
            ul_[a] = DerivCache<S>(eta(a) * u[a]);
        }
    }

    double theta() const { return theta_; }
    S zero() const { return zero_like(h_()); }

    // Optional auxiliary fields.
    void set_one_form(const std::array<S, 4>& a_lower) {
        for (int a = 0; a < 4; ++a) A_[a] = DerivCache<S>(a_lower[a]);
    }
    void set_u_minus(const std::array<S, 4>& um) {
        for (int a = 0; a < 4; ++a) um_[a] = DerivCache<S>(um[a]);
    }
    bool has_one_form() const { return !A_[0].empty(); }
    bool has_u_minus() const { return !um_[0].empty(); }

    template <class... K> const S& h(K... k) const { return h_(k...); }
    template <class... K> const S& u(int a, K... k) const { return u_[a](k...); }
    template <class... K> const S& ul(int a, K... k) const { return ul_[a](k...); }
    template <class... K> const S& A(int a, K... k) const { return A_[a](k...); }
    template <class... K> const S& um(int a, K... k) const { return um_[a](k...); }

    // c_s^2(h) = theta (exp(h (theta-1)/theta) - 1)
    template <class... K> const S& cs2(K... k) { ensure_thermo(); return cs2_(k...); }
    template <class... K> const S& ics2(K... k) { ensure_thermo(); return ics2_(k...); }
    template <class... K> const S& emh(K... k) { ensure_thermo(); return emh_(k...); }
    template <class... K> const S& eh(K... k) { ensure_thermo(); return eh_(k...); }
    // c_s^{-1} c_s' and c_s^{-3} c_s', with ' = d/dh
    const S& cpc() { ensure_thermo(); return cpc_; }
    const S& c3cp() { ensure_thermo(); return c3cp_; }
    template <class... K> const S& omega(K... k) { ensure_thermo(); return omega_(k...); }

    // inverse acoustic metric g^{ab} and the elliptic tensor P^{ab} = m^{ab} + 2 u^a u^b
    const S& g(int a, int b) { ensure_metric(); return g_[a][b]; }
    template <class... K> const S& P(int a, int b, K... k) { ensure_metric(); return P_[a][b](k...); }

    template <class... K> const S& divu(K... k) {
        if (divu_.empty()) divu_ = DerivCache<S>(sum4([&](int c) { return u(c, c); }));
        return divu_(k...);
    }
    template <class... K> const S& udh(K... k) {
        if (udh_.empty()) udh_ = DerivCache<S>(sum4([&](int c) { return u(c) * h(c); }));
        return udh_(k...);
    }
    template <class... K> const S& wdh(K... k) {
        if (wdh_.empty()) wdh_ = DerivCache<S>(sum4([&](int c) { return w(c) * h(c); }));
        return wdh_(k...);
    }

    // w^a = -eps^{abcd} e^h u_b d_c u_d
    template <class... K> const S& w(int a, K... k) { ensure_w(); return w_[a](k...); }
    template <class... K> const S& wl(int a, K... k) { ensure_w(); return wl_[a](k...); }

    // W^a = -eps^{abcd} u_b d_c w_d + c^{-2} eps^{abcd} u_b w_d d_c h
    template <class... K> const S& W(int a, K... k) { ensure_W(); return W_[a](k...); }
    template <class... K> const S& Wl(int a, K... k) { ensure_W(); return Wl_[a](k...); }

    // G^a = vort^a(W)
    template <class... K> const S& G(int a, K... k) { ensure_G(); return G_[a](k...); }

    // vort^a of u, w, A (upper) and lowered versions
    template <class... K> const S& vortu(int a, K... k) { ensure_vortu(); return vortu_[a](k...); }
    template <class... K> const S& vortul(int a, K... k) { ensure_vortu(); return vortul_[a](k...); }
    template <class... K> const S& vortw(int a, K... k) { ensure_vortw(); return vortw_[a](k...); }
    template <class... K> const S& vortwl(int a, K... k) { ensure_vortw(); return vortwl_[a](k...); }
    template <class... K> const S& vortA(int a, K... k) { ensure_vortA(); return vortA_[a](k...); }

    // vort^a(B) = -eps^{abcd} u_b d_c B_d for lowered components B_d given by bl(d, c) = d_c B_d
    template <class BL>
    S vort_of(int a, BL&& bl) {
        return -1.0 * eps_up(a, [&](int b, int c, int d) { return ul(b) * bl(d, c); });
    }

    // The modified-vorticity wave operator g^{bc} d_b d_c applied to a derivative cache.
    template <class Getter>
    S box(Getter&& second) {
        ensure_metric();
        S acc = g_[0][0] * second(0, 0);
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                if (b == 0 && c == 0) continue;
                acc += g_[b][c] * second(b, c);
            }
        return acc;
    }

private:
    void ensure_thermo() {
        if (!cs2_.empty()) return;
        const double k = (theta_ - 1.0) / theta_;
        S e = exp(k * h());
        S c2 = theta_ * e + (-theta_);
        S ic2 = recip(c2);
        cs2_ = DerivCache<S>(c2);
        ics2_ = DerivCache<S>(ic2);
        eh_ = DerivCache<S>(exp(h()));
        emh_ = DerivCache<S>(exp(-1.0 * h()));
        // c' / c = (dc^2/dh) / (2 c^2)
        cpc_ = (0.5 * (theta_ - 1.0)) * (e * ic2);
        c3cp_ = cpc_ * ic2;
        S u0sq = u(0) * u(0);
        omega_ = DerivCache<S>(recip(c2 + (1.0 * u0sq) - c2 * u0sq));
    }
    void ensure_metric() {
        if (!g_.empty()) return;
        ensure_thermo();
        const S& c2 = cs2();
        const S& om = omega();
        g_.assign(4, std::vector<S>());
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                S t = (c2 + (-1.0)) * (u(a) * u(b));
                if (a == b) t += eta(a) * c2;
                g_[a].push_back(om * t);
            }
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                S t = 2.0 * (u(a) * u(b));
                if (a == b) t += eta(a);
                P_[a][b] = DerivCache<S>(t);
            }
    }
    void ensure_w() {
        if (!w_[0].empty()) return;
        ensure_thermo();
        for (int a = 0; a < 4; ++a) {
            S v = -1.0 * (eh() * eps_up(a, [&](int b, int c, int d) { return ul(b) * ul(d, c); }));
            wl_[a] = DerivCache<S>(eta(a) * v);
            w_[a] = DerivCache<S>(std::move(v));
        }
    }
    void ensure_W() {
        if (!W_[0].empty()) return;
        ensure_w();
        for (int a = 0; a < 4; ++a) {
            S v = eps_up(a, [&](int b, int c, int d) {
                return ul(b) * (ics2() * (wl(d) * h(c)) - wl(d, c));
            });
            Wl_[a] = DerivCache<S>(eta(a) * v);
            W_[a] = DerivCache<S>(std::move(v));
        }
    }
    void ensure_G() {
        if (!G_[0].empty()) return;
        ensure_W();
        for (int a = 0; a < 4; ++a) G_[a] = DerivCache<S>(vort_of(a, [&](int d, int c) { return Wl(d, c); }));
    }
    void ensure_vortu() {
        if (!vortu_[0].empty()) return;
        for (int a = 0; a < 4; ++a) {
            S v = vort_of(a, [&](int d, int c) { return ul(d, c); });
            vortul_[a] = DerivCache<S>(eta(a) * v);
            vortu_[a] = DerivCache<S>(std::move(v));
        }
    }
    void ensure_vortw() {
        if (!vortw_[0].empty()) return;
        ensure_w();
        for (int a = 0; a < 4; ++a) {
            S v = vort_of(a, [&](int d, int c) { return wl(d, c); });
            vortwl_[a] = DerivCache<S>(eta(a) * v);
            vortw_[a] = DerivCache<S>(std::move(v));
        }
    }
    void ensure_vortA() {
        if (!vortA_[0].empty()) return;
        if (!has_one_form()) throw std::logic_error("Fluid: one-form not set");
        for (int a = 0; a < 4; ++a) vortA_[a] = DerivCache<S>(vort_of(a, [&](int d, int c) { return A(d, c); }));
    }

    double theta_;
    DerivCache<S> h_;
    std::array<DerivCache<S>, 4> u_, ul_, A_, um_;
    DerivCache<S> cs2_, ics2_, eh_, emh_, omega_;
    S cpc_, c3cp_;
    std::vector<std::vector<S>> g_;
    std::array<std::array<DerivCache<S>, 4>, 4> P_;
    DerivCache<S> divu_, udh_, wdh_;
    std::array<DerivCache<S>, 4> w_, wl_, W_, Wl_, G_, vortu_, vortul_, vortw_, vortwl_, vortA_;
};

}  // namespace rel_euler::calc
