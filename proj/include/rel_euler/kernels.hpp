#pragma once

// Hot loops with an OpenMP version and a serial reference of each.

#include <array>
#include <cstddef>

namespace rel_euler::kernels {

// Caps OpenMP threads from REL_EULER_THREADS (if set); returns the cap in effect.
int apply_thread_env();
int max_threads();

void axpy(double a, const double* x, double* y, std::size_t n);
void multiply(const double* x, double* y, std::size_t n);
void scale(double a, double* y, std::size_t n);
void shift(double a, double* y, std::size_t n);
void axpy_serial(double a, const double* x, double* y, std::size_t n);
void multiply_serial(const double* x, double* y, std::size_t n);

// out[i*slice + j] = sum_k D[i*nt + k] in[k*slice + j]
void apply_slice_matrix(const double* D, int nt, std::size_t slice, const double* in, double* out);
void apply_slice_matrix_serial(const double* D, int nt, std::size_t slice, const double* in, double* out);

// Pointwise right-hand side of the symmetric hyperbolic system:
// dU/dt = -(A^0)^{-1} sum_i A^i d_i U with U = (p, u^1, u^2, u^3).
// U[c][j], dU[i][c][j] (i = spatial axis 0..2), out[c][j].  Returns the
// index of the first inadmissible point, or -1.
struct QhInput {
    std::array<const double*, 4> U;
    std::array<std::array<const double*, 4>, 3> dU;  // null pointers for absent axes
    double theta;
    std::size_t n;
};
long qh_rhs(const QhInput& in, std::array<double*, 4> out);
long qh_rhs_serial(const QhInput& in, std::array<double*, 4> out);

}  // namespace rel_euler::kernels
