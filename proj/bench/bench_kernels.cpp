// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "hexnet/channel.hpp"
#include "hexnet/color_code.hpp"
#include "hexnet/homology.hpp"
#include "hexnet/kernels.hpp"

using namespace hexnet;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

Matrix<float> filled(std::size_t r, std::size_t c, std::uint64_t salt) {
    Matrix<float> m(r, c);
    for (std::size_t i = 0; i < m.data.size(); ++i)
        m.data[i] = static_cast<float>((i * 2654435761ULL + salt) % 1000) / 1000.0f - 0.5f;
    return m;
}

void BM_AffineForward(benchmark::State& state) {
    const std::size_t B = 500, in = 72, out = 144;
    const auto x = filled(B, in, 1);
    const auto w = filled(out, in, 2);
    const auto b = filled(1, out, 3);
    Matrix<float> y;
    for (auto _ : state) {
        kernels::affine_forward<float>(exec_of(state), x, w.data, b.data, y);
        benchmark::DoNotOptimize(y.data.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * B));
}

void BM_AffineBackwardParams(benchmark::State& state) {
    const std::size_t B = 500, in = 72, out = 144;
    const auto x = filled(B, in, 4);
    const auto dy = filled(B, out, 5);
    std::vector<float> dw(out * in), db(out);
    for (auto _ : state) {
        kernels::affine_backward_params<float>(exec_of(state), dy, x, dw, db);
        benchmark::DoNotOptimize(dw.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * B));
}

void BM_Syndromes(benchmark::State& state) {
    const auto code = build_code({6, 6, 0});
    std::vector<BitVector> errors;
    for (std::uint64_t k = 0; k < 4096; ++k) errors.push_back(sample_error(code, {0.1, 1, 1}, k));
    std::vector<BitVector> s(errors.size());
    for (auto _ : state) {
        kernels::syndromes(exec_of(state), code, errors, s);
        benchmark::DoNotOptimize(s.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * errors.size()));
}

void BM_MakeBatch(benchmark::State& state) {
    const auto code = build_code({6, 6, 0});
    std::uint64_t first = 0;
    for (auto _ : state) {
        auto batch = make_batch(code, {0.08, 1, 1}, first, 500, InputMode::concat_estimate, exec_of(state));
        benchmark::DoNotOptimize(batch.labels.data());
        first += 500;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 500));
}

void BM_MldOracle(benchmark::State& state) {
    const auto code = build_code({3, 3, 0});
    const auto s = code.syndrome(sample_error(code, {0.08, 1, 1}, 0));
    for (auto _ : state) benchmark::DoNotOptimize(mld_oracle(code, s, 0.08, kMldMaxGroupLog2, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_AffineForward)->ArgName("parallel")->Arg(0)->Arg(1);
BENCHMARK(BM_AffineBackwardParams)->ArgName("parallel")->Arg(0)->Arg(1);
BENCHMARK(BM_Syndromes)->ArgName("parallel")->Arg(0)->Arg(1);
BENCHMARK(BM_MakeBatch)->ArgName("parallel")->Arg(0)->Arg(1);
BENCHMARK(BM_MldOracle)->ArgName("parallel")->Arg(0)->Arg(1);

BENCHMARK_MAIN();
