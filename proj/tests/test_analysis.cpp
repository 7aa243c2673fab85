#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rel_euler/analysis.hpp"
#include "rel_euler/dynamics.hpp"

using namespace rel_euler;
using namespace rel_euler::analysis;
constexpr double kPi = std::numbers::pi;

namespace {

template <class F>
Scalar sample(const Grid& g, F&& f) {
    Scalar s(g.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
        const auto x = g.coord(j);
        s[j] = f(x[0], x[1]);
    }
    return s;
}

}  // namespace

TEST(LittlewoodPaley, CutoffsPartitionUnity) {
    EXPECT_EQ(eta_cutoff(0.5), 1.0);
    EXPECT_EQ(eta_cutoff(1.0), 1.0);
    EXPECT_EQ(eta_cutoff(2.0), 0.0);
    double prev = 1.0;
    for (double r = 1.0; r <= 2.0; r += 0.01) {
        EXPECT_LE(eta_cutoff(r), prev);
        prev = eta_cutoff(r);
    }
    // eta(2r) + sum_{j<12} zeta(r / 2^j) telescopes to eta(r / 2^11)
    for (double r : {0.3, 1.7, 5.0, 37.0}) {
        double s = eta_cutoff(2.0 * r);
        for (int j = 0; j < 12; ++j) s += zeta(std::ldexp(r, -j));
        EXPECT_NEAR(s, 1.0, 1e-15) << r;
    }
}

TEST(LittlewoodPaley, BlocksReconstruct) {
    const Grid g{2, 32, 2 * kPi};
    const Scalar f = sample(g, [](double x, double y) { return std::exp(std::sin(x) * std::cos(2 * y)); });
    const auto r = dyadic_range(g);
    // the blocks carry no zero mode
    double mean = 0.0;
    for (double x : f) mean += x / f.size();
    Scalar sum(g.size(), mean);
    for (int j = r.jmin; j <= r.jmax; ++j) {
        const Scalar p = lp_project(g, f, j);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += p[i];
    }
    double m = 0.0;
    for (std::size_t i = 0; i < sum.size(); ++i) m = std::max(m, std::abs(sum[i] - f[i]));
    EXPECT_LT(m, 1e-12);
    // one mode sits in the blocks whose annulus covers it
    const Scalar s5 = sample(g, [](double x, double) { return std::sin(5 * x); });
    EXPECT_LT(linf_norm(lp_project(g, s5, 0)), 1e-15);
    EXPECT_GT(linf_norm(lp_project(g, s5, 2)), 0.1);
}

TEST(Norms, ClosedForms) {
    const Grid g{1, 64, 2 * kPi};
    const Scalar s = sample(g, [](double x, double) { return std::sin(3 * x); });
    EXPECT_NEAR(l2_norm(g, s), std::sqrt(kPi), 1e-13);
    EXPECT_NEAR(lp_norm(g, s, 2.0), std::sqrt(kPi), 1e-13);
    // int |sin|^4 = 3 pi / 4
    EXPECT_NEAR(lp_norm(g, s, 4.0), std::pow(0.75 * kPi, 0.25), 1e-13);
    EXPECT_NEAR(linf_norm(s), 1.0, 1e-12);
    const auto w = sobolev_norm_weighted(g, s, 2.0, true);
    EXPECT_NEAR(w.value, 9.0 * std::sqrt(kPi), 1e-11);
    EXPECT_FALSE(w.above_resolution);
    const Scalar L2 = fractional_laplacian(g, s, 2.0);
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_NEAR(L2[j], 9.0 * s[j], 1e-11);
    const Scalar Lh = fractional_laplacian(g, fractional_laplacian(g, s, 0.5), 0.5);
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_NEAR(Lh[j], 3.0 * s[j], 1e-12);
}

TEST(Norms, BlockAndWeightedEquivalent) {
    for (double k : {1.0, 3.0, 7.0, 20.0})
        for (double s : {0.5, 1.0, 2.5}) {
            const double c = lp_equivalence_constant(k, s);
            EXPECT_GT(c, 0.1);
            EXPECT_LT(c, 10.0);
        }
    const Grid g{1, 64, 2 * kPi};
    const Scalar f = sample(g, [](double x, double) { return std::sin(7 * x); });
    const double a = sobolev_norm(g, f, 1.5, true).value, b = sobolev_norm_weighted(g, f, 1.5, true).value;
    EXPECT_NEAR(a / b, lp_equivalence_constant(7.0, 1.5), 1e-12);
}

TEST(Norms, AboveResolutionFlag) {
    const Grid g{1, 16, 2 * kPi};
    const Scalar rough = sample(g, [](double x, double) { return std::sin(7 * x) + std::sin(x); });
    EXPECT_TRUE(sobolev_norm(g, rough, 3.0).above_resolution);
    const Scalar smooth = sample(g, [](double x, double) { return std::sin(x); });
    EXPECT_FALSE(sobolev_norm(g, smooth, 3.0).above_resolution);
    EXPECT_FALSE(besov_norm(g, smooth, 1.0).above_resolution);
}

TEST(Norms, HolderLowerBound) {
    const Grid g{1, 256, 2 * kPi};
    const Scalar f = sample(g, [](double x, double) { return std::sin(x); });
    const double h = holder_seminorm(g, f, 0.5);
    // sup |sin(x+d) - sin x| / d^(1/2) over d in (0, pi]: attained near d = 2.33
    double best = 0.0;
    for (double d = 1e-3; d <= kPi; d += 1e-3) best = std::max(best, 2 * std::sin(d / 2) / std::sqrt(d));
    EXPECT_LE(h, best + 1e-12);
    EXPECT_GT(h, 0.9 * best);
    EXPECT_THROW(holder_seminorm(g, f, 1.5), std::invalid_argument);
}

TEST(Energy, RestStateIsZeroAndSkipped) {
    const Grid g{2, 16, 2 * kPi};
    const auto s = dynamics::constant_state(g, 2.0, 0.25, {0.0, 0.0, 0.0});
    std::vector<FieldSet> snaps = {dynamics::to_fieldset(s), dynamics::to_fieldset(s)};
    snaps[1].t = 1.0;
    const auto recs = energy_functionals(snaps);
    EXPECT_LT(recs[0].E_s, 1e-24);
    EXPECT_EQ(recs[1].M, 0.0);
    const auto gr = gronwall_diagnostic(recs);
    EXPECT_TRUE(gr.skipped);
    EXPECT_EQ(gr.K, 0.0);
}

TEST(Energy, TrajectoryRecords) {
    const Grid g{1, 32, 2 * kPi};
    const auto s0 = dynamics::smooth_random(g, 2.0, 0.25, 0.2, 3, 2);
    dynamics::RunConfig rc;
    rc.grid = g;
    rc.t_max = 0.5;
    rc.snapshot_every = 1;
    const auto tr = dynamics::simulate(s0, rc);
    ASSERT_FALSE(tr.aborted);
    const auto recs = energy_functionals(tr.snapshots);
    ASSERT_EQ(recs.size(), tr.snapshots.size());
    for (std::size_t k = 1; k < recs.size(); ++k) {
        EXPECT_GE(recs[k].M, recs[k - 1].M);
        EXPECT_GT(recs[k].E_s, 0.0);
        EXPECT_GE(recs[k].linf_dudh, std::max(recs[k].linf_du, recs[k].linf_dh));
    }
    // default background is the mean of h in the first snapshot
    EnergyParams p;
    double mean = 0.0;
    for (double x : tr.snapshots.front().h) mean += x / g.size();
    p.h_background = mean;
    EXPECT_NEAR(energy_at(tr.snapshots.back(), p).E_s, recs.back().E_s, 1e-12 * recs.back().E_s);
    p.h_background = mean + 0.1;
    EXPECT_GT(energy_at(tr.snapshots.back(), p).E_s, recs.back().E_s);
    const auto gr = gronwall_diagnostic(recs);
    EXPECT_FALSE(gr.skipped);
    EXPECT_TRUE(std::isfinite(gr.K));
    EXPECT_EQ(energy_csv_header(), "t,E_s,Etilde_s,Ebb,M,Linf_du,Linf_dh,besov_du");
}

TEST(Gronwall, RecoversPlantedRate) {
    // E(t) = E0 exp(K M e^{K M}) with M = t
    const double K = 0.7;
    std::vector<EnergyRecord> recs;
    for (int k = 0; k <= 10; ++k) {
        EnergyRecord r;
        r.t = 0.1 * k;
        r.M = r.t;
        r.E_s = 2.0 * std::exp(K * r.M * std::exp(K * r.M));
        recs.push_back(r);
    }
    EXPECT_NEAR(gronwall_diagnostic(recs).K, K, 1e-12);
    recs[3].E_s = NAN;
    EXPECT_FALSE(gronwall_diagnostic(recs).bounded);
    EXPECT_THROW(gronwall_diagnostic({recs[0]}), std::invalid_argument);
}

TEST(Probes, DeterministicAndBounded) {
    ProbeParams p;
    p.n = 32;
    for (auto kind : {ProbeKind::KatoPonceCommutator, ProbeKind::LpProduct}) {
        const auto a = inequality_probe(kind, 3, 10, p), b = inequality_probe(kind, 3, 10, p);
        EXPECT_EQ(a.max_ratio, b.max_ratio);
        EXPECT_EQ(a.count, 10);
        EXPECT_GT(a.max_ratio, 0.0);
        EXPECT_TRUE(std::isfinite(a.max_ratio));
        EXPECT_LE(a.mean_ratio, a.max_ratio);
    }
}

TEST(Probes, ConstantsCommute) {
    const Grid g{2, 16, 2 * kPi};
    const Scalar one(g.size(), 1.0);
    const auto [l, r] = probe_sides(ProbeKind::KatoPonceCommutator, g, one, one, 1.5);
    EXPECT_LT(l, 1e-12);
    EXPECT_LT(r, 1e-12);
}
