#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rel_euler/dynamics.hpp"
#include "rel_euler/geometry.hpp"
#include "rel_euler/vorticity.hpp"

using namespace rel_euler;
using namespace rel_euler::vorticity;
using calc::Id;
constexpr double kPi = std::numbers::pi;

namespace {

double maxabs(const Scalar& s) {
    double m = 0.0;
    for (double x : s) m = std::max(m, std::abs(x));
    return m;
}
double maxabs(const FourVector& v) {
    double m = 0.0;
    for (const auto& c : v) m = std::max(m, maxabs(c));
    return m;
}
double maxdiff(const FourVector& a, const FourVector& b) {
    double m = 0.0;
    for (int k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < a[k].size(); ++j) m = std::max(m, std::abs(a[k][j] - b[k][j]));
    return m;
}

FieldSet smooth_state(int n, double amp, std::uint64_t seed) {
    return dynamics::to_fieldset(dynamics::smooth_random(Grid{2, n, 2 * kPi}, 2.0, 0.25, amp, seed, 2));
}

StState periodic_state(int dim, int n, int nt, std::uint64_t seed) {
    const Grid g{dim, n, 2 * kPi};
    const auto L = StLayout::periodic(g, nt, 2 * kPi);
    const auto u = geometry::synthetic_velocity(L, 0.2, seed, 1);
    const StField h = 0.05 * geometry::random_spacetime(L, seed + 1, 1) + 0.3;
    return make_state(L, h, u, 2.0);
}

}  // namespace

TEST(Vorticity, ConstantStateVanishes) {
    const auto s = dynamics::constant_state(Grid{2, 16, 2 * kPi}, 2.0, 0.25, {0.3, -0.1, 0.0});
    const auto st = local_stack(dynamics::to_fieldset(s), 0.05);
    const auto b = compute_bundle(st);
    for (const auto* v : {&b.w, &b.W, &b.G, &b.F, &b.E}) EXPECT_LT(maxabs(*v), 1e-13);
    EXPECT_LT(maxabs(b.gamma), 1e-13);
}

TEST(Vorticity, PrintedAndExtractedForms) {
    const auto s = dynamics::smooth_random(Grid{2, 32, 2 * kPi}, 2.0, 0.25, 0.1, 3, 2);
    const auto f = dynamics::to_fieldset(s);
    const auto df = dynamics::fieldset_rate(s, dynamics::time_derivative(s));
    const auto a = modified_vorticity(f, df), b = modified_vorticity_extracted(f, df);
    EXPECT_GT(maxabs(a), 1e-3);
    EXPECT_LT(maxdiff(a, b), 1e-13);
    // the stack derivative in time approaches the exact rate
    const auto st = local_stack(f, 0.01);
    const auto w = compute_bundle(st).w;
    EXPECT_LT(maxdiff(w, a), 1e-7);
}

TEST(Vorticity, OrthogonalToVelocity) {
    const auto st = local_stack(smooth_state(32, 0.1, 5), 0.02);
    const auto o = orthogonality(st);
    EXPECT_LT(o.uw, 1e-13);
    EXPECT_LT(o.uW, 1e-12);
    EXPECT_LT(o.w0, 1e-13);
    EXPECT_LT(o.W0, 1e-12);
}

TEST(Vorticity, TransportConvergesInTime) {
    // without dealiasing the stack solves the untruncated system; depth-2 identities
    // converge at fourth order, the depth 3 and 4 ones at second order
    const auto f = smooth_state(32, 0.1, 5);
    std::vector<std::vector<Report>> r;
    for (double dt : {0.02, 0.01}) r.push_back(transport_residuals(local_stack(f, dt, 5, false)));
    for (int k = 0; k < 4; ++k) {
        const double ratio = r[0][k].max_rel_residual / r[1][k].max_rel_residual;
        EXPECT_LT(r[1][k].max_rel_residual, 2e-6) << r[1][k].identity;
        EXPECT_GT(ratio, k < 2 ? 12.0 : 3.0) << r[1][k].identity;
    }
}

TEST(Vorticity, FieldIdentitiesHoldOffShell) {
    // HDe and cr04 need only the normalization of u, not the equations of motion
    const auto st = periodic_state(2, 32, 32, 9);
    for (Id id : {Id::HDe, Id::cr04}) {
        const auto r = grid_identity(st, id);
        EXPECT_LT(r.max_rel_residual, 1e-11) << r.identity;
    }
    const auto bad = grid_identity(st, Id::CEQ);
    EXPECT_GT(bad.max_rel_residual, 1e-3);
}

TEST(Vorticity, AuxiliaryFields) {
    const auto st = periodic_state(2, 16, 16, 2);
    EXPECT_THROW(grid_identity(st, Id::OE), std::invalid_argument);
    EXPECT_THROW(grid_identity(st, Id::UM), std::invalid_argument);
    Extras ex;
    std::array<StField, 4> A;
    for (int a = 0; a < 4; ++a) A[a] = geometry::random_spacetime(st.layout, 20 + a, 1);
    ex.one_form = A;
    EXPECT_LT(grid_identity(st, Id::OE, ex).max_rel_residual, 1e-12);
}

TEST(Vorticity, GammaAlternateForm) {
    const auto st = local_stack(smooth_state(32, 0.1, 6), 0.01);
    const auto b = compute_bundle(st);
    const auto g2 = gamma_alternate(st);
    double m = 0.0;
    for (std::size_t j = 0; j < g2.size(); ++j) m = std::max(m, std::abs(g2[j] - b.gamma[j]));
    EXPECT_LT(m, 1e-6 * maxabs(b.gamma));
}

TEST(Vorticity, D17Finite) {
    const auto st = local_stack(smooth_state(32, 0.1, 8), 0.02);
    const auto d = d17_ratio(st, 2.25);
    EXPECT_GT(d.lhs, 0.0);
    EXPECT_TRUE(std::isfinite(d.ratio));
    EXPECT_NEAR(d.ratio, d.lhs / d.rhs, 1e-12 * d.ratio);
}

TEST(Vorticity, StackFromSnapshotsMatchesLocal) {
    const auto s0 = dynamics::smooth_random(Grid{2, 16, 2 * kPi}, 2.0, 0.25, 0.1, 4, 2);
    dynamics::RunConfig rc;
    rc.grid = s0.grid;
    rc.fixed_dt = 0.01;
    rc.t_max = 0.06;
    rc.snapshot_every = 1;
    const auto tr = dynamics::simulate(s0, rc);
    ASSERT_EQ(tr.snapshots.size(), 7u);
    const auto a = stack_from_snapshots(tr.snapshots, 3, 5, true);
    const auto b = local_stack(tr.snapshots[3], 0.01, 5, true);
    EXPECT_LT(maxdiff(compute_bundle(a).w, compute_bundle(b).w), 1e-9);
    EXPECT_THROW(stack_from_snapshots(tr.snapshots, 1, 5), std::invalid_argument);
}
