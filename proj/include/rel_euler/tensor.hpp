#pragma once

#include <array>

namespace rel_euler::tensor {

// Minkowski metric diag(-1, 1, 1, 1); m_aa == m^aa.
constexpr double eta(int a) { return a == 0 ? -1.0 : 1.0; }

struct Perm {
    int b, c, d;
    int sign;  // sign of eps_{a b c d} (lower indices, eps_{0123} = 1)
};

// Levi-Civita symbol with all indices down.
int eps_lower(int a, int b, int c, int d);
// With all indices up: eps^{abcd} = -eps_{abcd}.
inline int eps_upper(int a, int b, int c, int d) { return -eps_lower(a, b, c, d); }

// The six completions (b, c, d) of a fixed first index a, with the lower sign.
const std::array<Perm, 6>& eps_tail(int a);

// All 24 index quadruples with their lower sign.
struct Quad {
    int a, b, c, d;
    int sign;
};
const std::array<Quad, 24>& eps_all();

}  // namespace rel_euler::tensor
