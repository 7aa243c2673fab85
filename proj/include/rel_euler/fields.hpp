#pragma once

// Periodic-grid fields, Minkowski index algebra, vort and the snapshot format.

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rel_euler/spectral.hpp"

namespace rel_euler {

using Scalar = std::vector<double>;
using FourVector = std::array<Scalar, 4>;

struct Grid {
    int dim = 1;  // spatial dimensions; fields are constant along the remaining axes
    int n = 64;
    double L = 6.283185307179586;

    void validate() const;
    std::size_t size() const;
    double dx() const { return L / n; }
    // spatial coordinates (x^1, x^2, x^3) of a flat index
    std::array<double, 3> coord(std::size_t idx) const;
    std::shared_ptr<const SpectralBox> box(int batch = 1) const;
    bool operator==(const Grid& o) const { return dim == o.dim && n == o.n && L == o.L; }
};

enum class Variance { Up, Down };

struct VectorField {
    FourVector c;
    Variance var = Variance::Up;
};

struct TensorField {
    std::array<std::array<Scalar, 4>, 4> c;
    std::array<Variance, 2> var{Variance::Up, Variance::Up};
};

// Raise or lower with m = diag(-1, 1, 1, 1); a no-op if already in the requested variance.
VectorField lower(const VectorField& v);
VectorField raise(const VectorField& v);
TensorField lower(const TensorField& t, int slot);
TensorField raise(const TensorField& t, int slot);

// State on the grid.  u carries upper indices.
struct FieldSet {
    Grid grid;
    double t = 0.0;
    double theta = 2.0;
    Scalar h;
    FourVector u;
};

struct FieldInvariants {
    double normalization_defect = 0.0;  // max |u^a u_a + 1|
    double min_u0 = 0.0;
};
FieldInvariants check_invariants(const FieldSet& f);

// d/dx^axis, axis in 1..3.  Axes beyond grid.dim give zero.
Scalar spectral_derivative(const Grid& g, const Scalar& f, int axis, bool dealias = false);
Scalar spectral_derivative(const Grid& g, const Scalar& f, int axis, int order, bool dealias);

// u = (sqrt(1 + |u_ring|^2), u_ring)
FourVector normalize_velocity(const std::array<Scalar, 3>& u_ring);

// vort^a(A) = -eps^{abcd} u_b d_c A_d for lower A; the time derivative of A
// is supplied by the caller.
FourVector vort(const Grid& g, const FourVector& A_lower, const FourVector& dtA_lower, const FourVector& u_upper,
                bool dealias = false);

// Contraction u_a v^a pointwise.
Scalar contract(const FourVector& u_upper, const FourVector& v_upper);

// |sum f^2 dV - sum |f_k|^2 L^dim| relative to the physical-space sum.
double parseval_defect(const Grid& g, const Scalar& f);

// Snapshot: one JSON header line, then raw little-endian f64 values field by field.
struct Snapshot {
    std::vector<int> dims;
    double L = 0.0;
    double t = 0.0;
    std::vector<std::string> names;
    std::vector<Scalar> data;
};
void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);
Snapshot to_snapshot(const FieldSet& f);
FieldSet from_snapshot(const Snapshot& s, double theta);

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rel_euler
