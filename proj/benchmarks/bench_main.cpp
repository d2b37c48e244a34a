#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "graspctl/closure.hpp"
#include "graspctl/harness.hpp"
#include "graspctl/plant.hpp"
#include "graspctl/simplex.hpp"

namespace {

using namespace graspctl;

std::vector<Contact> ring(int n) {
    std::vector<Contact> cs;
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n;
        Contact c;
        c.position = {0.03 * std::cos(a), 0.03 * std::sin(a), 0.0};
        c.rotation = Rotation3::from_normal({-std::cos(a), -std::sin(a), 0.0});
        cs.push_back(c);
    }
    return cs;
}

void BM_IsForceClosure(benchmark::State& state) {
    const auto cs = ring(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(is_force_closure(cs));
}
BENCHMARK(BM_IsForceClosure)->Arg(2)->Arg(3)->Arg(4);

void BM_ResistanceOracle(benchmark::State& state) {
    const auto cs = ring(2);
    for (auto _ : state) benchmark::DoNotOptimize(resistance_oracle(cs, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ResistanceOracle)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_SolveLpDense(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    LinearProgram lp(n);
    for (int j = 0; j < n; ++j) lp.objective[j] = u(rng);
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(n);
        for (double& v : row) v = u(rng);
        lp.add_row(row, RowSense::LessEqual, 1.0);
    }
    for (auto _ : state) benchmark::DoNotOptimize(solve_lp(lp));
}
BENCHMARK(BM_SolveLpDense)->Arg(8)->Arg(16)->Arg(32);

void BM_PlantControlPeriod(benchmark::State& state) {
    const ObjectSpec obj = tape_roll();
    Plant plant(obj, {}, {}, 0.5 * obj.width - 0.001, 0.5 * obj.width - 0.001);
    const ControlCommand cmd{0.5 * obj.width - 0.001, 0.5 * obj.width - 0.001};
    for (auto _ : state) {
        plant.advance(cmd, 0.01);
        benchmark::DoNotOptimize(plant.state());
    }
}
BENCHMARK(BM_PlantControlPeriod);

void BM_RunTrial(benchmark::State& state) {
    const ScenarioSpec s = experiment_a_scenario(wooden_cuboid(), 0.008, ControllerKind::Force);
    for (auto _ : state) benchmark::DoNotOptimize(run_trial(s));
}
BENCHMARK(BM_RunTrial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
