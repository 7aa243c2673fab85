#include "rel_euler/tensor.hpp"

#include <algorithm>

namespace rel_euler::tensor {

int eps_lower(int a, int b, int c, int d) {
    std::array<int, 4> p{a, b, c, d};
    for (int i = 0; i < 4; ++i)
        if (p[i] < 0 || p[i] > 3) return 0;
    int sign = 1;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            if (p[i] == p[j]) return 0;
            if (p[i] > p[j]) sign = -sign;
        }
    return sign;
}

namespace {

std::array<std::array<Perm, 6>, 4> build_tails() {
    std::array<std::array<Perm, 6>, 4> t{};
    for (int a = 0; a < 4; ++a) {
        int k = 0;
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    int s = eps_lower(a, b, c, d);
                    if (s != 0) t[a][k++] = Perm{b, c, d, s};
                }
    }
    return t;
}

std::array<Quad, 24> build_all() {
    std::array<Quad, 24> q{};
    int k = 0;
    for (int a = 0; a < 4; ++a)
        for (const Perm& p : eps_tail(a)) q[k++] = Quad{a, p.b, p.c, p.d, p.sign};
    return q;
}

}  // namespace

const std::array<Perm, 6>& eps_tail(int a) {
    static const auto tails = build_tails();
    return tails[a];
}

const std::array<Quad, 24>& eps_all() {
    static const auto all = build_all();
    return all;
}

}  // namespace rel_euler::tensor
