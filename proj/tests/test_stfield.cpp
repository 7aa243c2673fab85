#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rel_euler/fluid_calculus.hpp"
#include "rel_euler/geometry.hpp"
#include "rel_euler/tensor.hpp"
#include "rel_euler/stfield.hpp"

using namespace rel_euler;
constexpr double kPi = std::numbers::pi;

namespace {

template <class F>
StField sample(std::shared_ptr<const StLayout> L, F&& f) {
    StField r(L);
    auto& v = r.values();
    for (int k = 0; k < L->nt; ++k)
        for (std::size_t j = 0; j < L->slice; ++j) {
            const auto x = L->grid.coord(j);
            v[k * L->slice + j] = f(L->time(k), x[0], x[1]);
        }
    return r;
}

double max_diff(const StField& a, const StField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

}  // namespace

TEST(StField, CollocationExactForQuartics) {
    const Grid g{2, 16, 2 * kPi};
    const auto L = StLayout::collocation(g, 5, 0.3, 0.1);
    EXPECT_EQ(L->eval_slice, 2);
    const auto f = sample(L, [](double t, double x, double) { return t * t * t * t - 2 * t * std::sin(x); });
    const auto dt = sample(L, [](double t, double x, double) { return 4 * t * t * t - 2 * std::sin(x); });
    EXPECT_LT(max_diff(f.d(0), dt), 1e-11);
    const auto dx = sample(L, [](double t, double x, double) { return -2 * t * std::cos(x); });
    EXPECT_LT(max_diff(f.d(1), dx), 1e-13);
    EXPECT_LT(magnitude(f.d(2)), 1e-14);
}

TEST(StField, PeriodicSpectralTime) {
    const Grid g{1, 16, 2 * kPi};
    const auto L = StLayout::periodic(g, 8, 2 * kPi);
    const auto f = sample(L, [](double t, double x, double) { return std::sin(t + 0.2) * std::cos(2 * x); });
    const auto ft = sample(L, [](double t, double x, double) { return std::cos(t + 0.2) * std::cos(2 * x); });
    EXPECT_LT(max_diff(f.d(0), ft), 1e-13);
    EXPECT_LT(max_diff(f.d(0).d(1), ft.d(1)), 1e-13);
}

TEST(StField, ElementaryFunctions) {
    const Grid g{1, 8, 1.0};
    const auto L = StLayout::collocation(g, 3, 0.0, 0.5);
    const auto f = sample(L, [](double t, double x, double) { return 0.5 + 0.25 * std::sin(2 * kPi * x) + 0.1 * t; });
    EXPECT_LT(max_diff(log(exp(f)), f), 1e-15);
    EXPECT_LT(max_diff(sqrt(f) * sqrt(f), f), 1e-15);
    EXPECT_LT(max_diff(recip(f) * f, StField(L, 1.0)), 1e-15);
    EXPECT_LT(max_diff(pow(f, 3.0), f * f * f), 1e-15);
    EXPECT_LT(max_diff((2.0 - f) + (f - 2.0), StField(L, 0.0)), 1e-15);
    EXPECT_NEAR(magnitude(StField(L, -3.0)), 3.0, 0.0);
    EXPECT_NEAR(l2_norm(StField(L, -3.0)), 3.0, 1e-15);
}

TEST(StField, LayoutErrors) {
    const Grid g{1, 8, 1.0};
    EXPECT_THROW(StLayout::collocation(g, 0, 0.0, 0.1), std::invalid_argument);
    EXPECT_THROW(StLayout::collocation(g, 3, 0.0, 0.0), std::invalid_argument);
}

// w from the templated calculus against the direct grid curl of e^h u_a.
TEST(FluidCalculus, VorticityMatchesGridCurl) {
    const Grid g{2, 32, 2 * kPi};
    const auto L = StLayout::periodic(g, 32, 2 * kPi);
    const auto u = geometry::synthetic_velocity(L, 0.2, 3, 1);
    const StField h = 0.05 * geometry::random_spacetime(L, 4, 1) + 0.3;
    calc::Fluid<StField> f(h, u, 2.0);
    FourVector A, dA, uu;
    const int k = L->eval_slice;
    for (int a = 0; a < 4; ++a) {
        const StField ea = exp(h) * (tensor::eta(a) * u[a]);
        A[a] = ea.slice(k);
        dA[a] = ea.d(0).slice(k);
        uu[a] = u[a].slice(k);
    }
    const FourVector w = vort(g, A, dA, uu);
    for (int a = 0; a < 4; ++a) {
        const Scalar wa = f.w(a).slice(k);
        double m = 0.0, s = 0.0;
        for (std::size_t j = 0; j < wa.size(); ++j) {
            m = std::max(m, std::abs(wa[j] - w[a][j]));
            s = std::max(s, std::abs(w[a][j]));
        }
        EXPECT_GT(s, 1e-3);
        EXPECT_LT(m, 1e-12 * (1.0 + s)) << a;
    }
}
