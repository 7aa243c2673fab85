#include "rel_euler/stfield.hpp"

#include <cmath>
#include <stdexcept>

#include "rel_euler/kernels.hpp"

namespace rel_euler {

namespace {

// D_ij = l_j'(t_i) for Lagrange basis on nodes 0..n-1 (unit spacing)
std::vector<double> collocation_matrix(int n) {
    std::vector<double> w(n, 1.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (k != j) w[j] /= static_cast<double>(j - k);
    std::vector<double> D(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            D[i * n + j] = (w[j] / w[i]) / static_cast<double>(i - j);
            diag -= D[i * n + j];
        }
        D[i * n + i] = diag;
    }
    return D;
}

void check_same(const StField& a, const StField& b) {
    if (&a.layout() != &b.layout() && !(a.layout().grid == b.layout().grid && a.layout().nt == b.layout().nt))
        throw std::invalid_argument("StField: layout mismatch");
}

template <class F>
StField map(const StField& a, F&& f) {
    StField r = a;
    auto& v = r.values();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for if (n > 32768)
    for (std::ptrdiff_t i = 0; i < n; ++i) v[i] = f(v[i]);
    return r;
}

}  // namespace

std::shared_ptr<const StLayout> StLayout::collocation(const Grid& g, int nt, double t0, double dt, bool dealias) {
    g.validate();
    if (nt < 1 || (nt > 1 && !(dt > 0.0))) throw std::invalid_argument("StLayout: bad collocation stack");
    auto L = std::make_shared<StLayout>();
    L->grid = g;
    L->nt = nt;
    L->mode = TimeMode::Collocation;
    L->t0 = t0;
    L->spacing = dt;
    L->dealias = dealias;
    L->eval_slice = nt / 2;
    L->slice = g.size();
    L->space = g.box(nt);
    L->Dt = collocation_matrix(nt);
    if (nt > 1)
        for (double& x : L->Dt) x /= dt;
    return L;
}

std::shared_ptr<const StLayout> StLayout::periodic(const Grid& g, int nt, double period, bool dealias) {
    g.validate();
    if (nt < 4 || nt % 2 || !(period > 0.0)) throw std::invalid_argument("StLayout: bad periodic stack");
    auto L = std::make_shared<StLayout>();
    L->grid = g;
    L->nt = nt;
    L->mode = TimeMode::Periodic;
    L->spacing = period / nt;
    L->dealias = dealias;
    L->eval_slice = 0;
    L->slice = g.size();
    L->space = g.box(nt);
    std::vector<int> shape{nt};
    std::vector<double> len{period};
    for (int a = 0; a < g.dim; ++a) {
        shape.push_back(g.n);
        len.push_back(g.L);
    }
    L->spacetime = SpectralBox::get(shape, len, 1);
    return L;
}

StField::StField(std::shared_ptr<const StLayout> L, double c) : L_(std::move(L)), v_(L_->size(), c) {}
StField::StField(std::shared_ptr<const StLayout> L, std::vector<double> v) : L_(std::move(L)), v_(std::move(v)) {
    if (v_.size() != L_->size()) throw std::invalid_argument("StField: size mismatch");
}

StField StField::from_slices(std::shared_ptr<const StLayout> L, const std::vector<const Scalar*>& slices) {
    if (static_cast<int>(slices.size()) != L->nt) throw std::invalid_argument("StField: wrong number of slices");
    StField f(L, 0.0);
    for (int k = 0; k < L->nt; ++k) {
        if (slices[k]->size() != L->slice) throw std::invalid_argument("StField: slice size mismatch");
        std::copy(slices[k]->begin(), slices[k]->end(), f.v_.begin() + k * L->slice);
    }
    return f;
}

Scalar StField::slice(int k) const {
    return Scalar(v_.begin() + static_cast<std::ptrdiff_t>(k * L_->slice),
                  v_.begin() + static_cast<std::ptrdiff_t>((k + 1) * L_->slice));
}

StField StField::d(int var) const {
    const StLayout& L = *L_;
    StField r(L_, 0.0);
    if (var < 0 || var > 3) throw std::out_of_range("StField::d");
    if (var == 0) {
        if (L.mode == TimeMode::Periodic) {
            L.spacetime->derivative(v_.data(), r.v_.data(), 0, 1, L.dealias);
        } else if (L.nt > 1) {
            kernels::apply_slice_matrix(L.Dt.data(), L.nt, L.slice, v_.data(), r.v_.data());
        }
        return r;
    }
    if (var > L.grid.dim) return r;
    if (L.mode == TimeMode::Periodic)
        L.spacetime->derivative(v_.data(), r.v_.data(), var, 1, L.dealias);
    else
        L.space->derivative(v_.data(), r.v_.data(), var - 1, 1, L.dealias);
    return r;
}

StField& StField::operator+=(const StField& o) {
    check_same(*this, o);
    kernels::axpy(1.0, o.v_.data(), v_.data(), v_.size());
    return *this;
}
StField& StField::operator-=(const StField& o) {
    check_same(*this, o);
    kernels::axpy(-1.0, o.v_.data(), v_.data(), v_.size());
    return *this;
}
StField& StField::operator*=(const StField& o) {
    check_same(*this, o);
    kernels::multiply(o.v_.data(), v_.data(), v_.size());
    return *this;
}
StField& StField::operator*=(double s) {
    kernels::scale(s, v_.data(), v_.size());
    return *this;
}
StField& StField::operator+=(double s) {
    kernels::shift(s, v_.data(), v_.size());
    return *this;
}
StField StField::operator-() const {
    StField r = *this;
    r *= -1.0;
    return r;
}

StField operator+(StField a, const StField& b) { return a += b; }
StField operator-(StField a, const StField& b) { return a -= b; }
StField operator*(StField a, const StField& b) { return a *= b; }
StField operator*(double s, StField a) { return a *= s; }
StField operator*(StField a, double s) { return a *= s; }
StField operator+(StField a, double s) { return a += s; }
StField operator+(double s, StField a) { return a += s; }
StField operator-(StField a, double s) { return a += -s; }
StField operator-(double s, StField a) {
    a *= -1.0;
    return a += s;
}

StField exp(const StField& a) { return map(a, [](double x) { return std::exp(x); }); }
StField log(const StField& a) { return map(a, [](double x) { return std::log(x); }); }
StField sqrt(const StField& a) { return map(a, [](double x) { return std::sqrt(x); }); }
StField pow(const StField& a, double s) { return map(a, [s](double x) { return std::pow(x, s); }); }
StField recip(const StField& a) { return map(a, [](double x) { return 1.0 / x; }); }

namespace {
std::pair<std::size_t, std::size_t> eval_range(const StField& a) {
    const StLayout& L = a.layout();
    if (L.mode == TimeMode::Periodic) return {0, L.size()};
    return {L.eval_slice * L.slice, (L.eval_slice + 1) * L.slice};
}
}  // namespace

double magnitude(const StField& a) {
    auto [b, e] = eval_range(a);
    double m = 0.0;
    for (std::size_t i = b; i < e; ++i) m = std::max(m, std::abs(a.values()[i]));
    return m;
}

double l2_norm(const StField& a) {
    auto [b, e] = eval_range(a);
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += a.values()[i] * a.values()[i];
    return std::sqrt(s / static_cast<double>(e - b));
}

}  // namespace rel_euler
