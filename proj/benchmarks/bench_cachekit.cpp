#include <benchmark/benchmark.h>

#include "cachekit/bounds.hpp"
#include "cachekit/entropy_lp.hpp"
#include "cachekit/proof.hpp"
#include "cachekit/schemes.hpp"

using namespace cachekit;

static void bench_set_families(benchmark::State& state)
{
    NetworkConfig cfg = make_config(static_cast<int>(state.range(0)),
                                    static_cast<int>(state.range(1)));
    for (auto _ : state) {
        for (int i = 1; i <= cfg.n_files; ++i)
            benchmark::DoNotOptimize(case2_head_sets(cfg, i));
        for (int j = 2 * cfg.n_files; j <= cfg.n_users; ++j)
            benchmark::DoNotOptimize(case2_tail_sets(cfg, j));
    }
}
BENCHMARK(bench_set_families)->Args({8, 20})->Args({4, 12});

static void bench_exact_segments(benchmark::State& state)
{
    NetworkConfig cfg = make_config(static_cast<int>(state.range(0)),
                                    static_cast<int>(state.range(1)));
    for (auto _ : state)
        benchmark::DoNotOptimize(exact_segments(cfg));
}
BENCHMARK(bench_exact_segments)->Args({3, 4})->Args({5, 8});

static void bench_elemental_generation(benchmark::State& state)
{
    NetworkConfig cfg = make_config(2, 4);
    GroundSet gs = build_ground_set(cfg, demand_family(cfg, CaseTag::two));
    for (auto _ : state)
        benchmark::DoNotOptimize(elemental_inequalities(gs));
}
BENCHMARK(bench_elemental_generation);

static void bench_theorem1_chain(benchmark::State& state)
{
    NetworkConfig cfg = make_config(4, 6);
    for (auto _ : state) {
        ProofChain chain = build_theorem1_chain(cfg);
        benchmark::DoNotOptimize(verify_chain(chain));
    }
}
BENCHMARK(bench_theorem1_chain);

static void bench_chen_simulation(benchmark::State& state)
{
    NetworkConfig cfg = make_config(3, 4);
    Demand d = demand_family(cfg, CaseTag::one).front();
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate(cfg, SchemeKind::chen, {}, d, 64, 1));
}
BENCHMARK(bench_chen_simulation);

static void bench_lp_small(benchmark::State& state)
{
    NetworkConfig cfg = make_config(2, 3);
    LpProblem lp =
        build_lp(build_ground_set(cfg, demand_family(cfg, CaseTag::two)));
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_min_rate(lp, rat(1, 3)));
}
BENCHMARK(bench_lp_small)->Unit(benchmark::kMillisecond)->Iterations(3);

BENCHMARK_MAIN();
