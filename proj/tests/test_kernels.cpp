#include <gtest/gtest.h>

#include <cstdlib>
#include <random>
#include <vector>

#include "rel_euler/dynamics.hpp"
#include "rel_euler/kernels.hpp"

using namespace rel_euler;

namespace {

std::vector<double> randn(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (auto& x : v) x = nd(rng);
    return v;
}

}  // namespace

TEST(Kernels, PointwiseMatchSerial) {
    const std::size_t n = 40009;
    const auto x = randn(n, 1);
    auto y = randn(n, 2), y2 = y;
    kernels::axpy(0.7, x.data(), y.data(), n);
    kernels::axpy_serial(0.7, x.data(), y2.data(), n);
    EXPECT_EQ(y, y2);
    kernels::multiply(x.data(), y.data(), n);
    kernels::multiply_serial(x.data(), y2.data(), n);
    EXPECT_EQ(y, y2);
    kernels::scale(2.0, y.data(), n);
    kernels::shift(-1.0, y.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(y[i], 2.0 * y2[i] - 1.0);
}

TEST(Kernels, SliceMatrixMatchesSerial) {
    const int nt = 5;
    const std::size_t slice = 333;
    const auto D = randn(nt * nt, 3);
    const auto in = randn(nt * slice, 4);
    std::vector<double> a(in.size()), b(in.size());
    kernels::apply_slice_matrix(D.data(), nt, slice, in.data(), a.data());
    kernels::apply_slice_matrix_serial(D.data(), nt, slice, in.data(), b.data());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
    // direct sum
    double s = 0.0;
    for (int k = 0; k < nt; ++k) s += D[2 * nt + k] * in[k * slice + 7];
    EXPECT_NEAR(a[2 * slice + 7], s, 1e-14);
}

TEST(Kernels, QhRhsMatchesSerial) {
    const Grid g{2, 16, 6.283185307179586};
    const auto s = dynamics::smooth_random(g, 2.0, 0.25, 0.1, 7, 2);
    const std::size_t n = g.size();
    std::array<Scalar, 4> U{s.p, s.u[0], s.u[1], s.u[2]};
    std::array<std::array<Scalar, 4>, 3> dU;
    kernels::QhInput in;
    in.theta = 2.0;
    in.n = n;
    for (int c = 0; c < 4; ++c) in.U[c] = U[c].data();
    for (int ax = 0; ax < 3; ++ax)
        for (int c = 0; c < 4; ++c) {
            if (ax < g.dim) {
                dU[ax][c] = spectral_derivative(g, U[c], ax + 1);
                in.dU[ax][c] = dU[ax][c].data();
            } else {
                in.dU[ax][c] = nullptr;
            }
        }
    std::array<Scalar, 4> a, b;
    for (int c = 0; c < 4; ++c) a[c].resize(n), b[c].resize(n);
    EXPECT_EQ(kernels::qh_rhs(in, {a[0].data(), a[1].data(), a[2].data(), a[3].data()}), -1);
    EXPECT_EQ(kernels::qh_rhs_serial(in, {b[0].data(), b[1].data(), b[2].data(), b[3].data()}), -1);
    for (int c = 0; c < 4; ++c)
        for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(a[c][j], b[c][j], 1e-15);
    // an inadmissible point is reported
    U[0][5] = 10.0;
    EXPECT_EQ(kernels::qh_rhs_serial(in, {b[0].data(), b[1].data(), b[2].data(), b[3].data()}), 5);
}

TEST(Kernels, ThreadEnvironmentCap) {
    setenv("REL_EULER_THREADS", "1", 1);
    EXPECT_EQ(kernels::apply_thread_env(), 1);
    EXPECT_EQ(kernels::max_threads(), 1);
    unsetenv("REL_EULER_THREADS");
}
