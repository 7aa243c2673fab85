#include "rel_euler/taylor.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <string>

namespace rel_euler {

namespace {

TaylorPoly::Basis build_basis(int order) {
    using Exponent = TaylorPoly::Exponent;
    TaylorPoly::Basis b;
    b.order = order;
    b.degree_start.assign(order + 2, 0);
    for (int deg = 0; deg <= order; ++deg) {
        b.degree_start[deg] = b.exps.size();
        for (int e0 = deg; e0 >= 0; --e0)
            for (int e1 = deg - e0; e1 >= 0; --e1)
                for (int e2 = deg - e0 - e1; e2 >= 0; --e2) {
                    b.exps.push_back(Exponent{e0, e1, e2, deg - e0 - e1 - e2});
                    b.degree.push_back(deg);
                }
    }
    b.degree_start[order + 1] = b.exps.size();
    const std::size_t n = b.exps.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (b.degree[i] + b.degree[j] > order) continue;
            Exponent e;
            for (int v = 0; v < TaylorPoly::kVars; ++v) e[v] = b.exps[i][v] + b.exps[j][v];
            b.products.push_back({static_cast<unsigned short>(i), static_cast<unsigned short>(j),
                                  static_cast<unsigned short>(b.index(e))});
        }
    for (int v = 0; v < TaylorPoly::kVars; ++v) {
        b.deriv[v].resize(n, {0, 0.0});
        for (std::size_t t = 0; t < n; ++t) {
            if (b.degree[t] >= order) {
                b.deriv[v][t] = {0, 0.0};
                continue;
            }
            Exponent e = b.exps[t];
            e[v] += 1;
            b.deriv[v][t] = {b.index(e), static_cast<double>(e[v])};
        }
    }
    return b;
}

}  // namespace

std::size_t TaylorPoly::Basis::index(const Exponent& e) const {
    int deg = 0;
    for (int v : e) {
        if (v < 0) throw std::out_of_range("TaylorPoly: negative exponent");
        deg += v;
    }
    if (deg > order) throw std::out_of_range("TaylorPoly: exponent beyond truncation order");
    for (std::size_t i = degree_start[deg]; i < degree_start[deg + 1]; ++i)
        if (exps[i] == e) return i;
    throw std::logic_error("TaylorPoly: exponent not found");
}

const TaylorPoly::Basis& TaylorPoly::basis(int order) {
    if (order < 0 || order > kMaxOrder)
        throw std::invalid_argument("TaylorPoly: unsupported order " + std::to_string(order));
    static std::array<std::unique_ptr<Basis>, kMaxOrder + 1> cache;
    static std::once_flag flags[kMaxOrder + 1];
    std::call_once(flags[order], [order] { cache[order] = std::make_unique<Basis>(build_basis(order)); });
    return *cache[order];
}

TaylorPoly::TaylorPoly(int order, double c0) : basis_(&basis(order)), c_(basis_->exps.size(), 0.0) {
    c_[0] = c0;
}

TaylorPoly TaylorPoly::variable(int order, int var, double at) {
    TaylorPoly p(order, at);
    if (order >= 1) {
        Exponent e{0, 0, 0, 0};
        e[var] = 1;
        p.coeff(e) = 1.0;
    }
    return p;
}

double TaylorPoly::derivative(const Exponent& e) const {
    double f = 1.0;
    for (int v : e)
        for (int k = 2; k <= v; ++k) f *= k;
    return f * coeff(e);
}

TaylorPoly TaylorPoly::d(int var) const {
    if (var < 0 || var >= kVars) throw std::out_of_range("TaylorPoly::d: bad variable");
    TaylorPoly r(order());
    const auto& tab = basis_->deriv[var];
    for (std::size_t t = 0; t < c_.size(); ++t)
        if (tab[t].second != 0.0) r.c_[t] = tab[t].second * c_[tab[t].first];
    return r;
}

TaylorPoly TaylorPoly::with_order(int new_order) const {
    TaylorPoly r(new_order);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Exponent& e = r.basis_->exps[i];
        int deg = r.basis_->degree[i];
        if (deg <= order()) r.c_[i] = coeff(e);
    }
    return r;
}

TaylorPoly& TaylorPoly::operator+=(const TaylorPoly& o) {
    if (o.basis_ != basis_) throw std::invalid_argument("TaylorPoly: order mismatch");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

TaylorPoly& TaylorPoly::operator-=(const TaylorPoly& o) {
    if (o.basis_ != basis_) throw std::invalid_argument("TaylorPoly: order mismatch");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

TaylorPoly& TaylorPoly::operator*=(const TaylorPoly& o) {
    *this = *this * o;
    return *this;
}

TaylorPoly& TaylorPoly::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

TaylorPoly TaylorPoly::operator-() const {
    TaylorPoly r(*this);
    for (double& v : r.c_) v = -v;
    return r;
}

TaylorPoly operator+(TaylorPoly a, const TaylorPoly& b) { return a += b; }
TaylorPoly operator-(TaylorPoly a, const TaylorPoly& b) { return a -= b; }

TaylorPoly operator*(const TaylorPoly& a, const TaylorPoly& b) {
    if (a.order() != b.order()) throw std::invalid_argument("TaylorPoly: order mismatch");
    TaylorPoly r(a.order());
    for (const auto& t : a.layout().products) r[t.k] += a[t.i] * b[t.j];
    return r;
}

TaylorPoly operator*(double s, TaylorPoly a) { return a *= s; }
TaylorPoly operator*(TaylorPoly a, double s) { return a *= s; }
TaylorPoly operator+(TaylorPoly a, double s) { return a += s; }
TaylorPoly operator+(double s, TaylorPoly a) { return a += s; }
TaylorPoly operator-(TaylorPoly a, double s) { return a += -s; }
TaylorPoly operator-(double s, const TaylorPoly& a) { return (-a) + s; }

namespace {

// f(a0 + r) = sum_k c[k] r^k, evaluated by Horner in the truncated algebra
TaylorPoly compose(const TaylorPoly& a, const std::vector<double>& c) {
    TaylorPoly r = a;
    r[0] = 0.0;
    const int n = a.order();
    TaylorPoly acc(n, c[n]);
    for (int k = n - 1; k >= 0; --k) {
        acc = acc * r;
        acc[0] += c[k];
    }
    return acc;
}

}  // namespace

TaylorPoly exp(const TaylorPoly& a) {
    const int n = a.order();
    std::vector<double> c(n + 1);
    double f = std::exp(a.value());
    for (int k = 0; k <= n; ++k) {
        c[k] = f;
        f /= (k + 1);
    }
    return compose(a, c);
}

TaylorPoly log(const TaylorPoly& a) {
    const double a0 = a.value();
    if (!(a0 > 0.0)) throw std::domain_error("TaylorPoly log: nonpositive constant term");
    const int n = a.order();
    std::vector<double> c(n + 1);
    c[0] = std::log(a0);
    double ik = 1.0;
    for (int k = 1; k <= n; ++k) {
        ik /= a0;
        c[k] = ((k % 2) ? 1.0 : -1.0) * ik / k;
    }
    return compose(a, c);
}

TaylorPoly pow(const TaylorPoly& a, double s) {
    const double a0 = a.value();
    if (!(a0 > 0.0)) throw std::domain_error("TaylorPoly pow: nonpositive constant term");
    const int n = a.order();
    std::vector<double> c(n + 1);
    double binom = 1.0;
    double base = std::pow(a0, s);
    for (int k = 0; k <= n; ++k) {
        c[k] = base * binom;
        binom *= (s - k) / (k + 1);
        base /= a0;
    }
    return compose(a, c);
}

TaylorPoly sqrt(const TaylorPoly& a) { return pow(a, 0.5); }

TaylorPoly recip(const TaylorPoly& a) {
    const double a0 = a.value();
    if (a0 == 0.0) throw std::domain_error("TaylorPoly recip: zero constant term");
    const int n = a.order();
    std::vector<double> c(n + 1);
    double f = 1.0 / a0;
    for (int k = 0; k <= n; ++k) {
        c[k] = f;
        f *= -1.0 / a0;
    }
    return compose(a, c);
}

double magnitude(const TaylorPoly& a) { return std::abs(a.value()); }

double max_abs_coeff(const TaylorPoly& a, int max_degree) {
    double m = 0.0;
    const auto& b = a.layout();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (b.degree[i] <= max_degree) m = std::max(m, std::abs(a[i]));
    return m;
}

}  // namespace rel_euler
