#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rel_euler/dynamics.hpp"
#include "rel_euler/kernels.hpp"

using namespace rel_euler;

namespace {

std::vector<double> randn(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (auto& x : v) x = nd(rng);
    return v;
}

template <bool Parallel>
void BM_axpy(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto x = randn(n, 1);
    auto y = randn(n, 2);
    for (auto _ : st) {
        if constexpr (Parallel) kernels::axpy(1e-9, x.data(), y.data(), n);
        else kernels::axpy_serial(1e-9, x.data(), y.data(), n);
        benchmark::DoNotOptimize(y.data());
    }
    st.SetBytesProcessed(st.iterations() * 3 * n * sizeof(double));
}

template <bool Parallel>
void BM_multiply(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    auto x = randn(n, 1);
    for (auto& v : x) v = 1.0 + 1e-12 * v;
    auto y = randn(n, 2);
    for (auto _ : st) {
        if constexpr (Parallel) kernels::multiply(x.data(), y.data(), n);
        else kernels::multiply_serial(x.data(), y.data(), n);
        benchmark::DoNotOptimize(y.data());
    }
    st.SetBytesProcessed(st.iterations() * 3 * n * sizeof(double));
}

template <bool Parallel>
void BM_slice_matrix(benchmark::State& st) {
    const int nt = 5;
    const auto slice = static_cast<std::size_t>(st.range(0));
    const auto D = randn(nt * nt, 3), in = randn(nt * slice, 4);
    std::vector<double> out(nt * slice);
    for (auto _ : st) {
        if constexpr (Parallel) kernels::apply_slice_matrix(D.data(), nt, slice, in.data(), out.data());
        else kernels::apply_slice_matrix_serial(D.data(), nt, slice, in.data(), out.data());
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_qh_rhs(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const Grid g{2, n, 6.283185307179586};
    const auto s = dynamics::smooth_random(g, 2.0, 0.25, 0.1, 1, 2);
    std::array<const Scalar*, 4> U{&s.p, &s.u[0], &s.u[1], &s.u[2]};
    std::array<std::array<Scalar, 4>, 3> dU;
    kernels::QhInput in;
    in.theta = 2.0;
    in.n = g.size();
    for (int c = 0; c < 4; ++c) in.U[c] = U[c]->data();
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 4; ++c) {
            if (i < 2) {
                dU[i][c] = spectral_derivative(g, *U[c], i + 1);
                in.dU[i][c] = dU[i][c].data();
            } else {
                in.dU[i][c] = nullptr;
            }
        }
    std::array<Scalar, 4> out;
    for (auto& o : out) o.resize(g.size());
    for (auto _ : st) {
        const std::array<double*, 4> o{out[0].data(), out[1].data(), out[2].data(), out[3].data()};
        const long bad = Parallel ? kernels::qh_rhs(in, o) : kernels::qh_rhs_serial(in, o);
        benchmark::DoNotOptimize(bad);
    }
    st.SetItemsProcessed(st.iterations() * g.size());
}

}  // namespace

BENCHMARK(BM_axpy<false>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_axpy<true>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_multiply<false>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_multiply<true>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_slice_matrix<false>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_slice_matrix<true>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_qh_rhs<false>)->Arg(64)->Arg(256);
BENCHMARK(BM_qh_rhs<true>)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
