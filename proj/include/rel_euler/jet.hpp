#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rel_euler/identities.hpp"
#include "rel_euler/taylor.hpp"

namespace rel_euler::jet {

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

constexpr int kMaxJetOrder = 4;

// Truncated Taylor expansion of a fluid state about a space-time point.
struct SpaceTimeJet {
    int order = 0;
    double theta = 2.0;
    TaylorPoly p;
    std::array<TaylorPoly, 4> u;  // u^0..u^3
    TaylorPoly h, cs2, omega;
    bool constrained = false;
    std::uint64_t seed = 0;
};

// Fill the time coefficients of spatial data (p, u^1, u^2, u^3) from the
// symmetric hyperbolic system and derive h, c_s^2, Omega and u^0.
SpaceTimeJet complete_jet(const TaylorPoly& p_spatial, const std::array<TaylorPoly, 3>& u_spatial, double theta);

// Random spatial data: the u^i coefficients are uniform in [-amplitude, amplitude]
// divided by b!, the p coefficients the same relative to the base pressure.
SpaceTimeJet random_constrained_jet(std::uint64_t seed, int order, double amplitude, double theta,
                                    double base_density = 0.25);

// Same spatial data, with independent random time coefficients for p, u^1..u^3
// and a randomly shifted u^0 (negative control: neither a solution nor normalized).
SpaceTimeJet random_unconstrained_jet(std::uint64_t seed, int order, double amplitude, double theta,
                                      double base_density = 0.25);

// Largest Euler-system residual coefficient of degree <= order - 1.
double euler_residual(const SpaceTimeJet& j);

// Largest |u^a u_a + 1| coefficient.
double normalization_defect(const SpaceTimeJet& j);

struct JetResidual {
    std::string identity;
    std::string anchor;
    double max_rel_residual = 0.0;
    double l2_rel_residual = 0.0;
    int n_points = 0;
    int jet_order = 0;
    std::vector<double> component_rel;
    std::vector<std::string> component_labels;
};

calc::Fluid<TaylorPoly> make_fluid(const SpaceTimeJet& j);

// Auxiliary jets: a random one-form, and a u_minus jet for which
// P u_minus = e^{-h} W holds at the base point and to first order.
std::array<TaylorPoly, 4> random_one_form(std::uint64_t seed, int order, double amplitude);
std::array<TaylorPoly, 4> constrained_u_minus(calc::Fluid<TaylorPoly>& f, std::uint64_t seed, int order,
                                              double amplitude);

JetResidual eval_identity(const SpaceTimeJet& j, calc::Id id);

struct BatchParams {
    int order = 2;
    int count = 100;
    double amplitude = 0.1;
    double theta = 2.0;
    double base_density = 0.25;
    std::uint64_t seed = 0;
    bool constrained = true;  // false: negative-control jets
};
struct BatchSummary {
    std::string identity;
    std::string anchor;
    int jet_order = 0;
    int count = 0;
    double max_rel_residual = 0.0;
    double median_rel_residual = 0.0;
    double max_l2_rel_residual = 0.0;
    int n_points = 0;
};
// Jets use seeds seed, seed + 1, ..., seed + count - 1.
BatchSummary verify_batch(calc::Id id, const BatchParams& p);

}  // namespace rel_euler::jet
