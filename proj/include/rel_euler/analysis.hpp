#pragma once

// Littlewood-Paley blocks, Sobolev/Besov/Hoelder norms, energy functionals,
// the Gronwall diagnostic and the inequality probes.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rel_euler/fields.hpp"

namespace rel_euler::analysis {

// eta = 1 on r <= 1, 0 on r >= 2, C-infinity in between; zeta(r) = eta(r) - eta(2r).
double eta_cutoff(double r);
double zeta(double r);

struct DyadicRange {
    int jmin = 0, jmax = 0;  // blocks P_j, jmin <= j <= jmax
};
DyadicRange dyadic_range(const Grid& g);

Scalar lp_project(const Grid& g, const Scalar& f, int j);

// Integral norms with volume element dx^dim.
double l2_norm(const Grid& g, const Scalar& f);
double lp_norm(const Grid& g, const Scalar& f, double p);
double linf_norm(const Scalar& f);

struct NormResult {
    double value = 0.0;
    bool above_resolution = false;  // s beyond what the grid can represent meaningfully
};
// ||f||_{L2} + (sum_j 2^{2js} ||P_j f||^2)^{1/2}; homogeneous drops the L2 part.
NormResult sobolev_norm(const Grid& g, const Scalar& f, double s, bool homogeneous = false);
// Fourier-weighted variant with |xi|^{2s}.
NormResult sobolev_norm_weighted(const Grid& g, const Scalar& f, double s, bool homogeneous = false);
// (sum_j 2^{2js} ||P_j f||_inf^2)^{1/2}
NormResult besov_norm(const Grid& g, const Scalar& f, double s);
// max over dyadic separations along grid axes; a lower bound of the continuum seminorm.
double holder_seminorm(const Grid& g, const Scalar& f, double delta);
// Lambda^a f = (-Delta)^{a/2} f; the zero mode is dropped for a < 0.
Scalar fractional_laplacian(const Grid& g, const Scalar& f, double a);

// Ratio of the block-sum and weighted homogeneous norms for one frequency |xi| = k.
double lp_equivalence_constant(double k, double s);

// Norms of a family of scalars (components): root of the sum of squares.
double sobolev_norm_family(const Grid& g, const std::vector<const Scalar*>& fs, double s, bool homogeneous = false);
double besov_norm_family(const Grid& g, const std::vector<const Scalar*>& fs, double s);

struct EnergyParams {
    double s = 2.5;
    double s0 = 2.25;
    double s_star = 2.25;
    bool dealias = true;
    // h enters the energies as h - h_background; NaN: mean of h in the first snapshot
    double h_background = std::numeric_limits<double>::quiet_NaN();
};

struct EnergyRecord {
    double t = 0.0;
    double E_s = 0.0;
    double E_tilde = 0.0;
    double E_bb = 0.0;
    double M = 0.0;
    double linf_du = 0.0;   // ||du||_inf
    double linf_dh = 0.0;   // ||dh||_inf
    double linf_dudh = 0.0; // ||du, dh||_inf, the M integrand
    double besov_du = 0.0;  // ||du, dh||_{B^{s0-2}_{inf,2}}
};
std::vector<EnergyRecord> energy_functionals(const std::vector<FieldSet>& snaps, const EnergyParams& p = {});
// One record without the running integral.
EnergyRecord energy_at(const FieldSet& f, const EnergyParams& p = {});
std::string energy_csv_header();
std::string energy_csv_row(const EnergyRecord& r);

struct GronwallResult {
    double K = 0.0;
    bool bounded = true;
    bool skipped = false;
    std::string note;
};
GronwallResult gronwall_diagnostic(const std::vector<EnergyRecord>& recs);

enum class ProbeKind { KatoPonceCommutator, LpProduct };
struct ProbeParams {
    int dim = 2;
    int n = 128;
    double a = 0.0;  // 0: default exponent (1.5 commutator, 0.5 product)
    int bandwidth = 8;
    bool adversarial = false;
};
struct ProbeResult {
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    int count = 0;
};
ProbeResult inequality_probe(ProbeKind kind, std::uint64_t seed, int count, const ProbeParams& p = {});
// Both sides of one probe for given fields.
std::pair<double, double> probe_sides(ProbeKind kind, const Grid& g, const Scalar& f1, const Scalar& f2, double a);

}  // namespace rel_euler::analysis
