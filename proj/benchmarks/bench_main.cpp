#include <benchmark/benchmark.h>

#include <cmath>

#include "sepsys/bench/cases.hpp"
#include "sepsys/block_detect.hpp"
#include "sepsys/factor_detect.hpp"
#include "sepsys/sampling.hpp"
#include "sepsys/template_fit.hpp"

using namespace sepsys;

static void BM_LatinHypercube(benchmark::State& state)
{
    auto const dim = static_cast<std::size_t>(state.range(0));
    BoxDomain const box(std::vector<std::pair<double, double>>(dim, { -3.0, 3.0 }));
    std::uint64_t seed = 0;
    for (auto _ : state) { benchmark::DoNotOptimize(lhs_sample(box, 1000, ++seed)); }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_LatinHypercube)->Arg(2)->Arg(6)->Arg(18);

static void BM_BlockPartitionCase14(benchmark::State& state)
{
    auto const& spec = *find_case("14");
    std::uint64_t seed = 0;
    for (auto _ : state) { benchmark::DoNotOptimize(detect_minimal_blocks(spec.target(), spec.domain, Tolerance {}, ++seed)); }
}
BENCHMARK(BM_BlockPartitionCase14)->Unit(benchmark::kMillisecond);

static void BM_FactorDetectionCase7(benchmark::State& state)
{
    auto const& spec = *find_case("7");
    auto const blocks = detect_minimal_blocks(spec.target(), spec.domain, Tolerance {}, 1);
    std::uint64_t seed = 0;
    for (auto _ : state) { benchmark::DoNotOptimize(detect_factors(spec.target(), spec.domain, blocks, Tolerance {}, ++seed)); }
}
BENCHMARK(BM_FactorDetectionCase7)->Unit(benchmark::kMillisecond);

static void BM_SequenceFit(benchmark::State& state)
{
    auto const in = lhs_sample(BoxDomain({ { -3.0, 3.0 } }), 200, 5).points;
    Eigen::VectorXd y(in.rows());
    for (Eigen::Index i = 0; i < in.rows(); ++i) { y[i] = std::sin(2.0 * in(i, 0) + 0.3); }
    OptConfig opt;
    for (auto _ : state) {
        ++opt.seed;
        benchmark::DoNotOptimize(sequence_fit(in, y, { 0 }, FitConfig {}, opt));
    }
}
BENCHMARK(BM_SequenceFit)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
