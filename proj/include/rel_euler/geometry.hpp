#pragma once

// Acoustical metric and its truncation, the space-time elliptic operator P,
// linear waves on a frozen metric with the modified Duhamel check, null
// geodesics, the null frame and its connection coefficients.
//
// Wave operator convention: box_g f = g^{ab} d_a d_b f, no Christoffel terms.

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rel_euler/fields.hpp"
#include "rel_euler/stfield.hpp"
#include "rel_euler/vorticity.hpp"

namespace rel_euler::geometry {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;
template <class T>
using Sym4 = std::array<std::array<T, 4>, 4>;

struct PointMetric {
    Mat4 lower, upper;
    double Omega = 1.0;
};
// u with upper indices, admissible h
PointMetric metric_at(double h, const Vec4& u, double theta);
// rest-state metric with sound speed c_s(h0)
Mat4 rest_metric_upper(double h0, double theta);

struct AcousticMetric {
    Grid grid;
    Sym4<Scalar> lower, upper;
    Scalar Omega;

    Mat4 upper_at(std::size_t j) const;
    Mat4 lower_at(std::size_t j) const;
};
AcousticMetric acoustic_metric(const FieldSet& f);

struct MetricCheck {
    double g00_defect = 0.0;      // max |g^{00} + 1|
    double inverse_defect = 0.0;  // max |g^{ab} g_{bc} - delta|
    bool lorentzian = true;       // spatial block of g^{ab} positive definite, det g^{ab} < 0
};
MetricCheck check_metric(const AcousticMetric& M);

// chi = 1 for |x - centre| <= r_in, 0 for |x - centre| >= r_out, smooth in between
Scalar smooth_bump(const Grid& g, double r_in, double r_out);
// bold g^{ab} = chi (g^{ab} - g0^{ab}) + g0^{ab}; the lower metric is recomputed by inversion.
AcousticMetric truncate_metric(const AcousticMetric& M, const Scalar& chi, const Mat4& g0_upper);

// Leading principal minors of P^{ab} = m^{ab} + 2 u^a u^b, closed forms and by determinants.
std::array<double, 4> minors(const Vec4& u);
std::array<double, 4> minors_determinant(const Vec4& u);

// ---- space-time elliptic operator P f = f - (m^{bc} + 2 u^b u^c) d_b d_c f on a periodic box

using StVector = std::array<StField, 4>;

StField apply_P(const StVector& u, const StField& f);

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;  // ||P x - b|| / ||b||
    std::vector<double> history;
};

struct NoConvergence : std::runtime_error {
    std::vector<double> history;
    NoConvergence(const std::string& m, std::vector<double> h) : std::runtime_error(m), history(std::move(h)) {}
};

// BiCGSTAB, preconditioned by the constant-coefficient P at the mean state (space-time FFT).
StField solve_P(const StVector& u, const StField& rhs, SolveStats* stats = nullptr, double tol = 1e-12,
                int max_iter = 400);

struct Split {
    StVector u_minus, u_plus;
    int max_iterations = 0;
    double max_residual = 0.0;
};
// P u_-^a = e^{-h} W^a, u_+ = u - u_-
Split elliptic_split(const vorticity::StState& s, const StVector& W, double tol = 1e-12);

// Smooth periodic velocity on a periodic layout: u^i band-limited in (t, x), u^0 from normalization.
StVector synthetic_velocity(std::shared_ptr<const StLayout> L, double amplitude, std::uint64_t seed, int band = 1);
// Band-limited random scalar on a periodic layout, unit RMS.
StField random_spacetime(std::shared_ptr<const StLayout> L, std::uint64_t seed, int band = 1);
// (int ||f(t)||^2_{H^a_x} dt)^{1/2} with weight (1 + |xi|^2)^{a/2}
double spacetime_sobolev(const StField& f, double a);

struct ManufacturedResult {
    double rel_l2_error = 0.0;
    SolveStats stats;
};
ManufacturedResult manufactured_solve(int dim, int n, int nt, double amplitude, std::uint64_t seed);

struct EllipConstant {
    double a = 0.0;
    double max_ratio = 0.0;  // max ||v||_{L2 H^a} / ||P v||_{L2 H^{a-2}}
};
std::vector<EllipConstant> ellip_constants(int dim, int n, int nt, int count, std::uint64_t seed,
                                           double amplitude = 0.3, const std::vector<double>& as = {0.0, 1.0, 2.0});

// ---- linear waves on a metric with g^{00} = -1, frozen in time

struct SpatialMetric {
    Grid grid;
    std::array<Scalar, 3> g0i;              // g^{0i}
    std::array<std::array<Scalar, 3>, 3> gij;  // g^{ij}
};
SpatialMetric spatial_part(const AcousticMetric& M);
SpatialMetric flat_metric(const Grid& g);
SpatialMetric uniform_metric(const Grid& g, const Mat4& upper);
double max_wave_speed(const SpatialMetric& M);

struct WaveSample {
    double t = 0.0;
    Scalar f, ft;
};
struct WaveConfig {
    double dt = 0.01;
    double T = 1.0;
    int sample_every = 1;
    bool dealias = false;
    double cfl_limit = 2.8;  // dt * speed * k_max
};
struct CflBreach : std::runtime_error {
    using std::runtime_error::runtime_error;
};
using Forcing = std::function<Scalar(double)>;

// box_g f = forcing, i.e. f_tt = 2 g^{0i} d_i f_t + g^{ij} d_ij f - forcing, RK4 on (f, f_t).
std::vector<WaveSample> linear_wave_solve(const SpatialMetric& M, const Scalar& f0, const Scalar& f1,
                                          const Forcing& forcing, const WaveConfig& cfg);
// int f_t^2 + g^{ij} d_i f d_j f
double wave_energy(const SpatialMetric& M, const Scalar& f, const Scalar& ft);

struct DuhamelSource {
    std::function<Scalar(double)> F, dF;  // F(t, .) and d_t F(t, .)
};
struct DuhamelResult {
    double residual = 0.0;          // ||box phi - (-d_t F + 2 g^{0i} d_i F)||, space-time L2
    double printed_residual = 0.0;  // ||box phi - g^{0a} d_a F||
    double rhs_norm = 0.0;
    double phi0 = 0.0;              // max |phi(0)|
    double phit0 = 0.0;             // max |phi_t(0) - F(0)|
    int steps = 0;
};
DuhamelResult duhamel_check(const SpatialMetric& M, const DuhamelSource& src, double T, int steps,
                            bool dealias = false);

// ---- null geodesics

struct MetricSampler {
    std::function<Mat4(const Vec4&)> upper;
    std::function<std::array<Mat4, 4>(const Vec4&)> d_upper;  // d_a g^{bc}
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();
};
MetricSampler constant_sampler(const Mat4& upper);
// Trigonometric interpolation of a metric frozen in time and periodic in space.
MetricSampler interpolated_sampler(const AcousticMetric& M, double t_min = -std::numeric_limits<double>::infinity(),
                                   double t_max = std::numeric_limits<double>::infinity());

struct GeodesicPoint {
    double s = 0.0;
    Vec4 x, xi;
    double H = 0.0;  // g^{ab} xi_a xi_b
};
struct GeodesicTrace {
    std::vector<GeodesicPoint> points;
    bool truncated = false;  // left the sampled time range
    bool projected = false;  // xi_0 was adjusted to make xi null
    double max_abs_H = 0.0;
};
// Hamiltonian flow of H = 1/2 g^{ab} xi_a xi_b, RK4 in the affine parameter.
GeodesicTrace null_geodesic_trace(const MetricSampler& M, const Vec4& x0, const Vec4& xi0, double ds, int steps);
std::string trace_csv(const GeodesicTrace& tr);

// ---- null frame for the surface x^3 - phi(t, x^1, x^2) = const

struct NullFrame {
    Vec4 l, lbar, e1, e2, n;  // n: future unit normal to t = const
    double phi_t = 0.0;       // from the null condition
    double dt_k = 0.0;        // <dt, dx3 - dphi>_g
    bool other_branch_negative = false;  // the discarded root gives <dt, k>_g < 0
};
NullFrame null_frame(const Mat4& upper, double phi1, double phi2);

struct FrameRelations {
    double ll = 0.0, lblb = 0.0, llb = 0.0, ee = 0.0, le = 0.0, lbe = 0.0, dtl = 0.0;
    double max() const;
};
FrameRelations frame_relations(const Mat4& lower, const NullFrame& f);

struct ConnectionCoefficients {
    std::array<std::array<Scalar, 2>, 2> chi, mu0;  // <D_{e_a} l, e_b>, <D_l e_a, e_b>
    Scalar l_ln_sigma;                              // 1/2 <D_l lbar, l>
};
// Frame fields on a collocation stack; values at the evaluation slice.
ConnectionCoefficients connection_coefficients(const vorticity::StState& s, const StField& phi);

}  // namespace rel_euler::geometry
