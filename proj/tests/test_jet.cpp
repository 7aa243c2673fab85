#include <gtest/gtest.h>

#include <cmath>

#include "rel_euler/eos.hpp"
#include "rel_euler/jet.hpp"

using namespace rel_euler;
using namespace rel_euler::jet;
using calc::Id;
using E = TaylorPoly::Exponent;

namespace {

TaylorPoly X(int order, int var, double at = 0.0) { return TaylorPoly::variable(order, var, at); }

// quadratic spatial data about the point (s, 0, 0)
SpaceTimeJet quadratic_data(double s) {
    const int N = 2;
    const TaylorPoly x = X(N, 1, s), y = X(N, 2), z = X(N, 3);
    const TaylorPoly p = 0.05 * (1.0 + 0.1 * x - 0.05 * y * z + 0.08 * x * x + 0.02 * z);
    std::array<TaylorPoly, 3> u = {0.1 + 0.2 * x * y - 0.1 * z, -0.05 + 0.15 * x * x + 0.1 * y,
                                   0.02 + 0.1 * x - 0.07 * y * y};
    return complete_jet(p, u, 2.0);
}

std::array<double, 4> dt_U(const SpaceTimeJet& j) {
    const E t{1, 0, 0, 0};
    return {j.p.derivative(t), j.u[1].derivative(t), j.u[2].derivative(t), j.u[3].derivative(t)};
}

}  // namespace

TEST(CompleteJet, ConstantDataHasNoTimeDependence) {
    const int N = 3;
    const auto j = complete_jet(TaylorPoly(N, 0.0625), {TaylorPoly(N, 0.1), TaylorPoly(N, -0.2), TaylorPoly(N, 0.0)}, 2.0);
    const auto& b = j.p.layout();
    for (std::size_t i = 1; i < b.exps.size(); ++i) {
        EXPECT_EQ(j.p[i], 0.0);
        for (int a = 0; a < 4; ++a) EXPECT_NEAR(j.u[a][i], 0.0, 1e-16);
        EXPECT_NEAR(j.h[i], 0.0, 1e-16);
    }
}

TEST(CompleteJet, RestStateExpansion) {
    const double a = 0.01;
    const int N = 2;
    const double p0 = eos::pressure(0.25, 2.0);
    const auto j = complete_jet(TaylorPoly(N, p0), {a * X(N, 1), a * X(N, 2), a * X(N, 3)}, 2.0);
    const E t{1, 0, 0, 0};
    // u.dh = -c^2 div u with c^2 = 1/2 and div u = 3a
    EXPECT_NEAR(j.h.derivative(t), -1.5 * a, 1e-15);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(j.u[k].derivative(t), 0.0, 1e-16);
}

TEST(CompleteJet, ShiftedBasePointDifferences) {
    const double d = 1e-4;
    const auto j0 = quadratic_data(0.0), jp = quadratic_data(d), jm = quadratic_data(-d);
    const auto up = dt_U(jp), um = dt_U(jm);
    const E tx{1, 1, 0, 0};
    const std::array<double, 4> have = {j0.p.derivative(tx), j0.u[1].derivative(tx), j0.u[2].derivative(tx),
                                        j0.u[3].derivative(tx)};
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(have[c], (up[c] - um[c]) / (2 * d), 1e-7) << c;
}

TEST(CompleteJet, Errors) {
    EXPECT_THROW(complete_jet(TaylorPoly(5, 0.06), {TaylorPoly(5), TaylorPoly(5), TaylorPoly(5)}, 2.0), PreconditionError);
    TaylorPoly p = TaylorPoly(2, 0.06) + 0.01 * X(2, 0);
    EXPECT_THROW(complete_jet(p, {TaylorPoly(2), TaylorPoly(2), TaylorPoly(2)}, 2.0), PreconditionError);
    // c_s > 1 at the base point
    EXPECT_THROW(complete_jet(TaylorPoly(2, 4.0), {TaylorPoly(2), TaylorPoly(2), TaylorPoly(2)}, 2.0), std::exception);
}

TEST(RandomJet, ReproducibleAndDegenerate) {
    const auto a = random_constrained_jet(42, 3, 0.1, 2.0);
    const auto b = random_constrained_jet(42, 3, 0.1, 2.0);
    EXPECT_EQ(a.p.coeffs(), b.p.coeffs());
    for (int k = 0; k < 4; ++k) EXPECT_EQ(a.u[k].coeffs(), b.u[k].coeffs());
    EXPECT_NE(a.p.coeffs(), random_constrained_jet(43, 3, 0.1, 2.0).p.coeffs());
    const auto z = random_constrained_jet(7, 3, 0.0, 2.0);
    for (std::size_t i = 1; i < z.p.size(); ++i) {
        EXPECT_EQ(z.p[i], 0.0);
        for (int k = 0; k < 4; ++k) EXPECT_EQ(z.u[k][i], 0.0);
    }
    EXPECT_EQ(z.u[0].value(), 1.0);
}

TEST(RandomJet, SolvesTheSystem) {
    for (int N = 1; N <= 4; ++N)
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto j = random_constrained_jet(s, N, 0.1, 2.0);
            EXPECT_LE(euler_residual(j), 1e-12) << N << " " << s;
            EXPECT_LE(normalization_defect(j), 1e-14);
        }
    const auto bad = random_unconstrained_jet(1, 3, 0.1, 2.0);
    EXPECT_GT(euler_residual(bad), 1e-4);
}

TEST(JetIdentities, SpecExamples) {
    BatchParams p;
    p.count = 100;
    p.order = 2;
    EXPECT_LE(verify_batch(Id::WTe_h, p).max_rel_residual, 1e-10);
    p.order = 3;
    EXPECT_LE(verify_batch(Id::CEQ, p).max_rel_residual, 1e-9);
    EXPECT_LE(verify_batch(Id::CEQ0, p).max_rel_residual, 1e-9);
    EXPECT_LE(verify_batch(Id::CEQ1, p).max_rel_residual, 1e-9);
    EXPECT_LE(verify_batch(Id::d5, p).max_rel_residual, 1e-8);
    p.order = 4;
    p.count = 25;
    EXPECT_LE(verify_batch(Id::SDe, p).max_rel_residual, 1e-7);
}

TEST(JetIdentities, AllIdentitiesOnSolutions) {
    for (const auto& inf : calc::identity_table()) {
        BatchParams p;
        p.order = std::max(2, inf.depth);
        p.count = 10;
        p.seed = 100;
        const auto b = verify_batch(inf.id, p);
        EXPECT_LE(b.max_rel_residual, 1e-9) << inf.name;
        EXPECT_EQ(b.anchor, inf.anchor);
        EXPECT_GT(b.n_points, 0);
    }
}

TEST(JetIdentities, NormalizationOnlyIdentities) {
    // normalized but not a solution
    for (std::uint64_t s = 0; s < 20; ++s) {
        SpaceTimeJet j = random_unconstrained_jet(s, 3, 0.1, 2.0);
        j.u[0] = sqrt(1.0 + j.u[1] * j.u[1] + j.u[2] * j.u[2] + j.u[3] * j.u[3]);
        j.omega = recip(j.cs2 + j.u[0] * j.u[0] - j.cs2 * j.u[0] * j.u[0]);
        EXPECT_GT(euler_residual(j), 1e-4);
        EXPECT_LE(eval_identity(j, Id::HDe).max_rel_residual, 1e-10);
        EXPECT_LE(eval_identity(j, Id::OE).max_rel_residual, 1e-11);
        EXPECT_LE(eval_identity(j, Id::cr04).max_rel_residual, 1e-10);
    }
}

TEST(JetIdentities, NegativeControl) {
    for (Id id : {Id::WTe_h, Id::WTe_u, Id::CEQ, Id::CEQ0, Id::OE00, Id::cra0, Id::cra1}) {
        BatchParams p;
        p.order = 2;
        p.count = 30;
        p.constrained = false;
        EXPECT_GE(verify_batch(id, p).median_rel_residual, 1e-3) << calc::info(id).name;
    }
}

TEST(JetIdentities, OrderTooLow) {
    BatchParams p;
    p.order = 2;
    try {
        verify_batch(Id::SDe, p);
        FAIL() << "expected PreconditionError";
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("N >= 4"), std::string::npos);
    }
    EXPECT_THROW(eval_identity(random_constrained_jet(0, 1, 0.1, 2.0), Id::WTe_h), PreconditionError);
    EXPECT_THROW(random_constrained_jet(0, 5, 0.1, 2.0), PreconditionError);
}

TEST(Taylor, ArithmeticAgainstSeries) {
    const int N = 5;
    const TaylorPoly x = X(N, 1);
    const TaylorPoly e = exp(0.5 * x);
    for (int k = 0; k <= N; ++k) EXPECT_NEAR(e.coeff(E{0, k, 0, 0}), std::pow(0.5, k) / std::tgamma(k + 1), 1e-15);
    const TaylorPoly l = log(1.0 + x);
    for (int k = 1; k <= N; ++k) EXPECT_NEAR(l.coeff(E{0, k, 0, 0}), (k % 2 ? 1.0 : -1.0) / k, 1e-15);
    const TaylorPoly r = recip(1.0 - x) * (1.0 - x);
    EXPECT_NEAR(r.value(), 1.0, 1e-15);
    for (std::size_t i = 1; i < r.size(); ++i) EXPECT_NEAR(r[i], 0.0, 1e-15);
    const TaylorPoly q = sqrt(4.0 + X(N, 2));
    EXPECT_NEAR((q * q - (4.0 + X(N, 2))).coeffs()[3], 0.0, 1e-15);
    const TaylorPoly y = X(N, 2), t = X(N, 0);
    const TaylorPoly f = x * x * y + 3.0 * t * y;
    EXPECT_NEAR(f.derivative(E{0, 2, 1, 0}), 2.0, 1e-15);
    EXPECT_NEAR(f.d(0).value(), 0.0, 1e-15);
    EXPECT_NEAR(f.d(0).coeff(E{0, 0, 1, 0}), 3.0, 1e-15);
    EXPECT_EQ(pow(2.0 + x, 3.0).coeff(E{0, 1, 0, 0}), 12.0);
}

TEST(JetIdentities, InadmissibleBatchThrows) {
    BatchParams p;
    p.count = 8;
    p.base_density = 0.9;
    EXPECT_THROW(verify_batch(Id::WTe_h, p), std::exception);
}
