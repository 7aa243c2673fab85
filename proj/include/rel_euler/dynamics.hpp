#pragma once

// Method-of-lines evolution of the symmetric hyperbolic system in U = (p, u^1, u^2, u^3).

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rel_euler/fields.hpp"

namespace rel_euler::dynamics {

struct HyperbolicState {
    Grid grid;
    double theta = 2.0;
    double t = 0.0;
    Scalar p;
    std::array<Scalar, 3> u;  // u^1, u^2, u^3
};

struct RunConfig {
    Grid grid;
    double cfl = 0.5;
    double t_max = 1.0;
    double fixed_dt = 0.0;       // > 0: constant step, cfl ignored
    int snapshot_every = 0;      // 0: first and last only
    int speed_every = 1;         // recompute the max characteristic speed every k steps
    std::uint64_t seed = 0;
    double theta = 2.0;
    bool dealias = true;
    double gradient_ceiling = 1e3;  // abort when |du|, |dh| exceed this
    long max_steps = 10000000;

    void validate() const;
};

using Mat4 = Eigen::Matrix4d;

// A^0..A^3 at one point.
std::array<Mat4, 4> assemble_flux_matrices(const Eigen::Vector4d& U, double theta);
// Eigenvalues of (A^0)^{-1} (n.A), ascending.
std::array<double, 4> characteristic_speeds(const Eigen::Vector4d& U, const Eigen::Vector3d& n, double theta);
double max_characteristic_speed(const HyperbolicState& s);

struct InadmissibleState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// dU/dt, returned in the same container (t unchanged).
HyperbolicState time_derivative(const HyperbolicState& s, bool dealias = true);
HyperbolicState rk4_step(const HyperbolicState& s, double dt, bool dealias = true);

FieldSet to_fieldset(const HyperbolicState& s);
HyperbolicState from_fieldset(const FieldSet& f);
// d/dt of (h, u^a) from d/dt of U at the state s.
FieldSet fieldset_rate(const HyperbolicState& s, const HyperbolicState& dU);

struct EulerResidual {
    Scalar rh;
    FourVector ru;
    double l2() const;    // root mean square over points and components
    double linf() const;
};
// Residuals of u.dh + c^2 div u and u.du^a + (m^{ak} + u^a u^k) d_k h, with
// spectral space derivatives and the supplied time derivatives.
EulerResidual euler_residual(const FieldSet& f, const FieldSet& dfdt, bool dealias = false);

struct DiagRow {
    double t, dt, max_speed, linf_du, linf_dh, l2_euler_residual;
    double normalization_defect, orthogonality_defect;  // |u.u + 1|, |u.w|
};
std::string diag_csv_header();
std::string diag_csv_row(const DiagRow& r);

struct Trajectory {
    std::vector<FieldSet> snapshots;
    std::vector<DiagRow> diagnostics;
    HyperbolicState last_valid;
    bool aborted = false;
    std::string abort_reason;
    long steps = 0;
};

Trajectory simulate(const HyperbolicState& s0, const RunConfig& cfg);

// Initial data.
HyperbolicState constant_state(const Grid& g, double theta, double rho, const std::array<double, 3>& u);
// Acoustic mode of the rest state: p = p0 (1 + a sin(k x^1)); right-moving if travelling.
HyperbolicState acoustic_wave(const Grid& g, double theta, double rho, double amplitude, int mode, bool travelling);
// Smooth random data: a few low Fourier modes in p and in all three velocity components.
HyperbolicState smooth_random(const Grid& g, double theta, double rho, double amplitude, std::uint64_t seed,
                              int max_mode = 2);

}  // namespace rel_euler::dynamics
