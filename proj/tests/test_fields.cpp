#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "rel_euler/fields.hpp"
#include "rel_euler/spectral.hpp"
#include "rel_euler/tensor.hpp"

using namespace rel_euler;

namespace {

const double kPi = std::numbers::pi;

Scalar sample(const Grid& g, const std::function<double(double, double, double)>& f) {
    Scalar s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto x = g.coord(i);
        s[i] = f(x[0], x[1], x[2]);
    }
    return s;
}

double max_diff(const Scalar& a, const Scalar& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// 8th-order central difference along x^1 on a 1D grid
Scalar fd8(const Grid& g, const Scalar& f) {
    static const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    Scalar d(f.size(), 0.0);
    const int n = g.n;
    for (int i = 0; i < n; ++i)
        for (int k = 1; k <= 4; ++k) d[i] += c[k - 1] * (f[(i + k) % n] - f[(i - k + n) % n]) / g.dx();
    return d;
}

}  // namespace

TEST(Grid, Validate) {
    EXPECT_NO_THROW((Grid{2, 16, 1.0}.validate()));
    EXPECT_THROW((Grid{4, 16, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((Grid{1, 12, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((Grid{1, 16, 0.0}.validate()), std::invalid_argument);
    const Grid g{3, 4, 2.0};
    EXPECT_EQ(g.size(), 64u);
    const auto x = g.coord(1 + 4 * 2 + 16 * 3);
    EXPECT_DOUBLE_EQ(x[0], 1.5);
    EXPECT_DOUBLE_EQ(x[1], 1.0);
    EXPECT_DOUBLE_EQ(x[2], 0.5);
}

TEST(SpectralDerivative, FourierEigenfunction) {
    const double L = 3.0;
    for (int axis = 1; axis <= 3; ++axis) {
        const Grid g{3, 16, L};
        const double k = 2 * kPi / L;
        const Scalar f = sample(g, [&](double x, double y, double z) { return std::sin(k * (axis == 1 ? x : axis == 2 ? y : z)); });
        const Scalar want = sample(g, [&](double x, double y, double z) { return k * std::cos(k * (axis == 1 ? x : axis == 2 ? y : z)); });
        EXPECT_LT(max_diff(spectral_derivative(g, f, axis), want), 1e-12) << axis;
    }
}

TEST(SpectralDerivative, ConstantAndAbsentAxis) {
    const Grid g{2, 16, 1.0};
    const Scalar c(g.size(), 3.7);
    for (int a = 1; a <= 3; ++a)
        for (double v : spectral_derivative(g, c, a)) EXPECT_LT(std::abs(v), 1e-13);
    const Scalar f = sample(g, [](double x, double, double) { return std::sin(2 * kPi * x); });
    for (double v : spectral_derivative(g, f, 3)) EXPECT_EQ(v, 0.0);
}

TEST(SpectralDerivative, EighthOrderDifferenceOracle) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    double a[6], b[6];
    for (int m = 0; m < 6; ++m) a[m] = nd(rng), b[m] = nd(rng);
    auto f = [&](double x, double, double) {
        double s = 0.0;
        for (int m = 0; m < 6; ++m) s += a[m] * std::cos((m + 1) * x) + b[m] * std::sin((m + 1) * x);
        return s;
    };
    double err[2];
    for (int lvl = 0; lvl < 2; ++lvl) {
        const Grid g{1, 64 << lvl, 2 * kPi};
        const Scalar v = sample(g, f);
        err[lvl] = max_diff(spectral_derivative(g, v, 1), fd8(g, v));
    }
    // the difference is the FD8 truncation error, C dx^8
    EXPECT_GT(err[0] / err[1], 200.0);
    EXPECT_LT(err[1], 2e-6);
}

TEST(SpectralBox, RoundTripAndHermitianWeights) {
    auto box = SpectralBox::get({8, 6}, {1.0, 2.0});
    std::vector<double> f(box->box_size());
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    for (auto& v : f) v = nd(rng);
    auto spec = box->forward(f.data());
    std::vector<double> back(f.size());
    box->inverse(spec, back.data());
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(back[i], f[i], 1e-14);
    double s = 0.0;
    for (std::size_t i = 0; i < box->spectrum_size(); ++i) s += box->hermitian_weight(i);
    EXPECT_NEAR(s, 48.0, 1e-12);
}

TEST(Velocity, Normalize) {
    const Grid g{1, 4, 1.0};
    std::array<Scalar, 3> ur{Scalar(g.size(), 0.0), Scalar(g.size(), 0.0), Scalar(g.size(), 0.0)};
    auto u = normalize_velocity(ur);
    EXPECT_EQ(u[0][0], 1.0);
    ur[0][1] = 1.0;
    u = normalize_velocity(ur);
    EXPECT_NEAR(u[0][1], std::sqrt(2.0), 1e-15);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ud(-3, 3);
    for (auto& c : ur)
        for (auto& v : c) v = ud(rng);
    FieldSet fs;
    fs.grid = g;
    fs.h.assign(g.size(), 0.1);
    fs.u = normalize_velocity(ur);
    EXPECT_LT(check_invariants(fs).normalization_defect, 1e-14);
    EXPECT_GE(check_invariants(fs).min_u0, 1.0);
}

TEST(Index, LowerRaise) {
    VectorField u;
    for (int a = 0; a < 4; ++a) u.c[a] = Scalar(3, a == 0 ? 1.0 : 0.0);
    const auto l = lower(u);
    EXPECT_EQ(l.var, Variance::Down);
    EXPECT_EQ(l.c[0][0], -1.0);
    EXPECT_EQ(l.c[1][0], 0.0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    VectorField v;
    for (auto& c : v.c) {
        c.resize(10);
        for (auto& x : c) x = nd(rng);
    }
    const auto rl = raise(lower(v));
    for (int a = 0; a < 4; ++a)
        for (int i = 0; i < 10; ++i) EXPECT_NEAR(rl.c[a][i], v.c[a][i], 1e-15);
    TensorField t;
    for (auto& row : t.c)
        for (auto& c : row) c = Scalar(1, 1.0);
    const auto tl = lower(t, 1);
    EXPECT_EQ(tl.c[2][0][0], -1.0);
    EXPECT_EQ(tl.c[0][0][0], -1.0);
    EXPECT_EQ(tl.c[0][2][0], 1.0);
    EXPECT_EQ(lower(tl, 0).c[0][0][0], 1.0);
}

TEST(Tensor, LeviCivita) {
    EXPECT_EQ(tensor::eps_lower(0, 1, 2, 3), 1);
    EXPECT_EQ(tensor::eps_upper(0, 1, 2, 3), -1);
    EXPECT_EQ(tensor::eps_lower(1, 0, 2, 3), -1);
    EXPECT_EQ(tensor::eps_lower(0, 0, 2, 3), 0);
    int sum = 0;
    for (const auto& q : tensor::eps_all()) sum += q.sign * tensor::eps_lower(q.a, q.b, q.c, q.d);
    EXPECT_EQ(sum, 24);
}

TEST(Vort, ConstantOneFormGivesZero) {
    const Grid g{2, 16, 2 * kPi};
    FourVector A, dA, u;
    for (int a = 0; a < 4; ++a) {
        A[a] = Scalar(g.size(), 0.3 * a + 0.1);
        dA[a] = Scalar(g.size(), 0.0);
        u[a] = Scalar(g.size(), a == 0 ? std::sqrt(1.05) : (a == 1 ? 0.2 : (a == 2 ? 0.1 : 0.0)));
    }
    for (const auto& c : vort(g, A, dA, u))
        for (double v : c) EXPECT_LT(std::abs(v), 1e-14);
}

TEST(Vort, RestStateIsSpatialCurl) {
    // A = (0, 0, 0, sin x^1) at rest: vort^2 = -d_1 A_3 = -cos x^1
    const Grid g{1, 32, 2 * kPi};
    FourVector A, dA, u;
    for (int a = 0; a < 4; ++a) {
        A[a] = Scalar(g.size(), 0.0);
        dA[a] = Scalar(g.size(), 0.0);
        u[a] = Scalar(g.size(), a == 0 ? 1.0 : 0.0);
    }
    A[3] = sample(g, [](double x, double, double) { return std::sin(x); });
    const auto w = vort(g, A, dA, u);
    EXPECT_NEAR(w[2][0], -1.0, 1e-14);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(w[2][i], -std::cos(g.coord(i)[0]), 1e-13);
        EXPECT_NEAR(w[0][i], 0.0, 1e-14);
        EXPECT_NEAR(w[1][i], 0.0, 1e-14);
        EXPECT_NEAR(w[3][i], 0.0, 1e-14);
    }
}

TEST(Vort, GradientHasNoVorticity) {
    // A = d Phi with Phi = sin(x + 2y) cos z + t cos y
    const Grid g{3, 16, 2 * kPi};
    FourVector A, dA;
    A[0] = sample(g, [](double, double y, double) { return std::cos(y); });
    A[1] = sample(g, [](double x, double y, double z) { return std::cos(x + 2 * y) * std::cos(z); });
    A[2] = sample(g, [](double x, double y, double z) { return 2 * std::cos(x + 2 * y) * std::cos(z); });
    A[3] = sample(g, [](double x, double y, double z) { return -std::sin(x + 2 * y) * std::sin(z); });
    dA[0] = Scalar(g.size(), 0.0);
    dA[1] = Scalar(g.size(), 0.0);
    dA[2] = sample(g, [](double, double y, double) { return -std::sin(y); });
    dA[3] = Scalar(g.size(), 0.0);
    std::array<Scalar, 3> ur;
    ur[0] = sample(g, [](double x, double, double) { return 0.3 * std::sin(x); });
    ur[1] = sample(g, [](double, double y, double z) { return 0.2 * std::cos(y + z); });
    ur[2] = sample(g, [](double x, double, double z) { return -0.4 * std::cos(x - z); });
    const auto u = normalize_velocity(ur);
    for (const auto& c : vort(g, A, dA, u))
        for (double v : c) EXPECT_LT(std::abs(v), 1e-12);
}

TEST(Parseval, Defect) {
    const Grid g{2, 32, 3.0};
    const Scalar f = sample(g, [](double x, double y, double) { return std::exp(std::sin(2 * kPi * x / 3.0)) * std::cos(2 * kPi * y / 3.0); });
    EXPECT_LT(parseval_defect(g, f), 1e-13);
}

TEST(Snapshot, RoundTripAndHeader) {
    const Grid g{2, 8, 1.5};
    FieldSet f;
    f.grid = g;
    f.t = 0.25;
    f.theta = 2.0;
    f.h = sample(g, [](double x, double y, double) { return 0.3 + 0.01 * x * y; });
    std::array<Scalar, 3> ur{sample(g, [](double x, double, double) { return 0.1 * x; }), Scalar(g.size(), 0.0),
                             Scalar(g.size(), 0.05)};
    f.u = normalize_velocity(ur);
    const auto path = (std::filesystem::temp_directory_path() / "rel_euler_snapshot_test.bin").string();
    write_snapshot(path, to_snapshot(f));
    std::ifstream is(path, std::ios::binary);
    std::string header;
    std::getline(is, header);
    EXPECT_EQ(header.rfind("{\"dims\":[8,8],\"L\":1.5,\"t\":0.25,\"fields\":", 0), 0u) << header;
    EXPECT_NE(header.find("\"dtype\":\"f64le\",\"order\":\"C\""), std::string::npos);
    const auto back = from_snapshot(read_snapshot(path), 2.0);
    EXPECT_EQ(back.grid, g);
    EXPECT_EQ(back.t, 0.25);
    EXPECT_EQ(back.h, f.h);
    for (int a = 0; a < 4; ++a) EXPECT_EQ(back.u[a], f.u[a]);
    std::filesystem::remove(path);
}

TEST(Snapshot, Malformed) {
    const auto path = (std::filesystem::temp_directory_path() / "rel_euler_bad_snapshot.bin").string();
    {
        std::ofstream o(path);
        o << "{\"dims\":[4],\"L\":1,\"t\":0,\"fields\":[\"h\"],\"dtype\":\"f64le\",\"order\":\"C\"}\n" << "abc";
    }
    EXPECT_THROW(read_snapshot(path), FormatError);
    {
        std::ofstream o(path);
        o << "not json\n";
    }
    EXPECT_THROW(read_snapshot(path), FormatError);
    std::filesystem::remove(path);
    EXPECT_THROW(read_snapshot(path), FormatError);
}
