#include <benchmark/benchmark.h>

#include <cmath>

#include "mra/attention.hpp"
#include "mra/generators.hpp"
#include "mra/matvec.hpp"

namespace {

mra::AttentionInputs make_inputs(std::size_t n) {
  mra::GeneratorSpec gs;
  gs.kind = mra::GeneratorKind::gaussian;
  gs.n = n;
  gs.d = 32;
  gs.seed = 17;
  mra::GeneratedInputs gi = mra::generate(gs);
  return {gi.Q, gi.K, gi.V, 1.0 / std::sqrt(32.0), 0.0};
}

void BM_exact_attention(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  mra::AttentionInputs in = make_inputs(n);
  for (auto _ : state) {
    mra::ExactAttentionOutput out = mra::exact_attention(in);
    benchmark::DoNotOptimize(out.Z.data.data());
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_exact_attention)->Range(256, 4096)->Complexity();

void BM_approx_attention(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  mra::AttentionInputs in = make_inputs(n);
  mra::ResolutionSchedule sched;
  sched.scales = {32, 1};
  sched.budgets = {2 * (n / 32)};  // linear block budget
  for (auto _ : state) {
    mra::ApproxOutput out = mra::approx_attention(in, sched, mra::PlanVariant::full);
    benchmark::DoNotOptimize(out.Z_hat.data.data());
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_approx_attention)->Range(256, 8192)->Complexity();

void BM_plan_construction(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  mra::AttentionInputs in = make_inputs(n);
  mra::Pyramid pq = mra::build_pyramid(in.Q, 32);
  mra::Pyramid pk = mra::build_pyramid(in.K, 32);
  mra::ResolutionSchedule sched;
  sched.scales = {32, 1};
  sched.budgets = {2 * (n / 32)};
  for (auto _ : state) {
    mra::Plan plan = mra::construct_plan(pq, pk, sched, in.logit_scale, mra::PlanVariant::full);
    benchmark::DoNotOptimize(plan.entries.data());
  }
}
BENCHMARK(BM_plan_construction)->Range(256, 8192);

}  // namespace

BENCHMARK_MAIN();
