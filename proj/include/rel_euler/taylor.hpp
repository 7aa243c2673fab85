#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rel_euler {

// Truncated multivariate Taylor polynomial in (t, x, y, z) about the origin,
// total degree <= order.  Coefficients are Taylor coefficients, so the
// derivative with multi-index b at the origin equals b! * coeff(b).
class TaylorPoly {
public:
    static constexpr int kVars = 4;
    static constexpr int kMaxOrder = 6;
    using Exponent = std::array<int, kVars>;

    struct Basis {
        int order = 0;
        std::vector<Exponent> exps;
        std::vector<int> degree;
        std::vector<std::size_t> degree_start;  // size order + 2
        struct Triple {
            unsigned short i, j, k;
        };
        std::vector<Triple> products;
        // derivative along var v: target index -> (source index, factor)
        std::array<std::vector<std::pair<std::size_t, double>>, kVars> deriv;
        std::size_t index(const Exponent& e) const;
    };
    static const Basis& basis(int order);

    TaylorPoly() : TaylorPoly(0, 0.0) {}
    explicit TaylorPoly(int order, double c0 = 0.0);
    static TaylorPoly variable(int order, int var, double at = 0.0);

    int order() const { return basis_->order; }
    std::size_t size() const { return c_.size(); }
    const Basis& layout() const { return *basis_; }

    double value() const { return c_[0]; }
    double& operator[](std::size_t i) { return c_[i]; }
    double operator[](std::size_t i) const { return c_[i]; }
    double& coeff(const Exponent& e) { return c_[basis_->index(e)]; }
    double coeff(const Exponent& e) const { return c_[basis_->index(e)]; }
    // partial derivative of the represented function at the origin
    double derivative(const Exponent& e) const;

    TaylorPoly d(int var) const;
    TaylorPoly with_order(int order) const;
    const std::vector<double>& coeffs() const { return c_; }

    TaylorPoly& operator+=(const TaylorPoly& o);
    TaylorPoly& operator-=(const TaylorPoly& o);
    TaylorPoly& operator*=(const TaylorPoly& o);
    TaylorPoly& operator*=(double s);
    TaylorPoly& operator+=(double s) {
        c_[0] += s;
        return *this;
    }
    TaylorPoly operator-() const;

private:
    const Basis* basis_;
    std::vector<double> c_;
};

TaylorPoly operator+(TaylorPoly a, const TaylorPoly& b);
TaylorPoly operator-(TaylorPoly a, const TaylorPoly& b);
TaylorPoly operator*(const TaylorPoly& a, const TaylorPoly& b);
TaylorPoly operator*(double s, TaylorPoly a);
TaylorPoly operator*(TaylorPoly a, double s);
TaylorPoly operator+(TaylorPoly a, double s);
TaylorPoly operator+(double s, TaylorPoly a);
TaylorPoly operator-(TaylorPoly a, double s);
TaylorPoly operator-(double s, const TaylorPoly& a);

// Analytic compositions, exact in the truncated algebra.
TaylorPoly exp(const TaylorPoly& a);
TaylorPoly log(const TaylorPoly& a);
TaylorPoly sqrt(const TaylorPoly& a);
TaylorPoly pow(const TaylorPoly& a, double s);
TaylorPoly recip(const TaylorPoly& a);

inline TaylorPoly zero_like(const TaylorPoly& a) { return TaylorPoly(a.order(), 0.0); }
double magnitude(const TaylorPoly& a);
double max_abs_coeff(const TaylorPoly& a, int max_degree);

}  // namespace rel_euler
