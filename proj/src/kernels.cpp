#include "rel_euler/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "rel_euler/qh_system.hpp"

namespace rel_euler::kernels {

int apply_thread_env() {
    if (const char* s = std::getenv("REL_EULER_THREADS")) {
        try {
            const int n = std::stoi(s);
            if (n > 0) omp_set_num_threads(n);
        } catch (const std::exception&) {
        }
    }
    return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

namespace {
constexpr std::ptrdiff_t kParallelMin = 16384;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for simd if (m > kParallelMin)
    for (std::ptrdiff_t i = 0; i < m; ++i) y[i] += a * x[i];
}

void multiply(const double* x, double* y, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for simd if (m > kParallelMin)
    for (std::ptrdiff_t i = 0; i < m; ++i) y[i] *= x[i];
}

void scale(double a, double* y, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for simd if (m > kParallelMin)
    for (std::ptrdiff_t i = 0; i < m; ++i) y[i] *= a;
}

void shift(double a, double* y, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for simd if (m > kParallelMin)
    for (std::ptrdiff_t i = 0; i < m; ++i) y[i] += a;
}

void axpy_serial(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void multiply_serial(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] *= x[i];
}

void apply_slice_matrix(const double* D, int nt, std::size_t slice, const double* in, double* out) {
    const auto m = static_cast<std::ptrdiff_t>(slice);
#pragma omp parallel for if (m * nt > kParallelMin)
    for (std::ptrdiff_t j = 0; j < m; ++j)
        for (int i = 0; i < nt; ++i) {
            double s = 0.0;
            for (int k = 0; k < nt; ++k) s += D[i * nt + k] * in[k * slice + j];
            out[i * slice + j] = s;
        }
}

void apply_slice_matrix_serial(const double* D, int nt, std::size_t slice, const double* in, double* out) {
    for (int i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < slice; ++j) {
            double s = 0.0;
            for (int k = 0; k < nt; ++k) s += D[i * nt + k] * in[k * slice + j];
            out[i * slice + j] = s;
        }
}

namespace {

// returns false on an inadmissible point
bool qh_point(const QhInput& in, std::size_t j, std::array<double, 4>& x) {
    const double p = in.U[0][j];
    if (!(p > 0.0) || !std::isfinite(p)) return false;
    const double cs2 = in.theta * std::pow(p, (in.theta - 1.0) / in.theta);
    if (!(cs2 <= 1.0)) return false;
    auto m = qh::matrices<double>(p, {in.U[1][j], in.U[2][j], in.U[3][j]}, in.theta);
    std::array<double, 4> b{0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        if (!in.dU[i][0]) continue;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) b[r] += m.A[i + 1][r][c] * in.dU[i][c][j];
    }
    auto A = m.A[0];
    for (int k = 0; k < 4; ++k) {
        if (!(A[k][k] > 0.0)) return false;
        for (int r = k + 1; r < 4; ++r) {
            const double f = A[r][k] / A[k][k];
            for (int c = k; c < 4; ++c) A[r][c] -= f * A[k][c];
            b[r] -= f * b[k];
        }
    }
    for (int k = 3; k >= 0; --k) {
        double s = b[k];
        for (int c = k + 1; c < 4; ++c) s -= A[k][c] * x[c];
        x[k] = s / A[k][k];
    }
    for (double& v : x) v = -v;
    return true;
}

}  // namespace

long qh_rhs(const QhInput& in, std::array<double*, 4> out) {
    long bad = -1;
    const auto m = static_cast<std::ptrdiff_t>(in.n);
#pragma omp parallel for if (m > 4096)
    for (std::ptrdiff_t j = 0; j < m; ++j) {
        std::array<double, 4> x{};
        if (!qh_point(in, static_cast<std::size_t>(j), x)) {
#pragma omp critical(qh_bad)
            if (bad < 0 || j < bad) bad = j;
            continue;
        }
        for (int c = 0; c < 4; ++c) out[c][j] = x[c];
    }
    return bad;
}

long qh_rhs_serial(const QhInput& in, std::array<double*, 4> out) {
    for (std::size_t j = 0; j < in.n; ++j) {
        std::array<double, 4> x{};
        if (!qh_point(in, j, x)) return static_cast<long>(j);
        for (int c = 0; c < 4; ++c) out[c][j] = x[c];
    }
    return -1;
}

}  // namespace rel_euler::kernels
