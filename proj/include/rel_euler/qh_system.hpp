#pragma once

// Symmetric hyperbolic form A^a(U) d_a U = 0 for U = (p, u^1, u^2, u^3),
// templated over the scalar (double or TaylorPoly).

#include <array>
#include <cmath>
#include <type_traits>

namespace rel_euler::qh {

template <class T>
using Mat4 = std::array<std::array<T, 4>, 4>;

template <class T>
struct Matrices {
    std::array<Mat4<T>, 4> A;  // A[a][row][col]
};

// p -> (rho + p)^{-2} rho'(p), (rho + p)^{-1}
template <class T>
struct PressureCoefficients {
    T a;  // (rho+p)^{-2} / c_s^2
    T b;  // (rho+p)^{-1}
};

template <class T>
PressureCoefficients<T> pressure_coefficients(const T& p, double theta) {
    using std::pow;
    T rho = pow(p, 1.0 / theta);
    T cs2 = theta * pow(p, (theta - 1.0) / theta);
    if constexpr (std::is_same_v<T, double>) {
        const double b = 1.0 / (rho + p);
        return {b * b / cs2, b};
    } else {
        T inv = recip(rho + p);
        return {inv * inv * recip(cs2), inv};
    }
}

template <class T>
Matrices<T> matrices(const T& p, const std::array<T, 3>& u, double theta) {
    using std::sqrt;
    auto pc = pressure_coefficients(p, theta);
    T u0sq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + 1.0;
    T u0 = sqrt(u0sq);
    T iu0sq;
    if constexpr (std::is_same_v<T, double>) iu0sq = 1.0 / u0sq;
    else iu0sq = recip(u0sq);
    T iu0 = iu0sq * u0;
    std::array<T, 4> ua{u0, u[0], u[1], u[2]};
    // spatial block factor delta_jk - u^j u^k / (u^0)^2
    Mat4<T> blk{};
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            T v = -1.0 * (u[j] * u[k] * iu0sq);
            if (j == k) v = v + 1.0;
            blk[j][k] = v;
        }
    Matrices<T> m;
    for (int a = 0; a < 4; ++a) {
        Mat4<T>& A = m.A[a];
        A[0][0] = pc.a * ua[a];
        for (int j = 0; j < 3; ++j) {
            T c = (a == 0) ? pc.b * (u[j] * iu0) : ((a == j + 1) ? pc.b : 0.0 * pc.b);
            A[0][j + 1] = c;
            A[j + 1][0] = c;
            for (int k = 0; k < 3; ++k) A[j + 1][k + 1] = ua[a] * blk[j][k];
        }
    }
    return m;
}

}  // namespace rel_euler::qh
