#include <benchmark/benchmark.h>

#include "timeset/graph.hpp"
#include "timeset/rng.hpp"

namespace {

timeset::TimelineGraph random_dag(std::uint64_t seed, int n, double edge_prob) {
  timeset::Rng rng(seed);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  timeset::TimelineGraph g;
  for (int i = 0; i < n; ++i) {
    timeset::Event ev;
    ev.id = "n" + std::to_string(i);
    ev.index = i + 1;
    ev.mention = ev.id;
    ev.span = {static_cast<std::size_t>(i * 2), static_cast<std::size_t>(i * 2 + 1)};
    g.add_event(ev);
  }
  const auto threshold = static_cast<std::uint64_t>(edge_prob * 18446744073709551615.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.next() <= threshold) {
        g.add_edge("n" + std::to_string(order[i]), "n" + std::to_string(order[j]));
      }
    }
  }
  return g;
}

void BM_TransitiveClosure(benchmark::State& state) {
  const auto g = random_dag(7, static_cast<int>(state.range(0)), 0.15);
  for (auto _ : state) {
    benchmark::DoNotOptimize(timeset::transitive_closure(g));
  }
}
BENCHMARK(BM_TransitiveClosure)->Arg(8)->Arg(32)->Arg(128);

void BM_ExpandCoex(benchmark::State& state) {
  auto g = random_dag(11, static_cast<int>(state.range(0)), 0.1);
  const auto ids = g.event_ids();
  for (std::size_t i = 0; i + 1 < ids.size(); i += 3) {
    g.add_coex(ids[i], ids[i + 1]);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(timeset::expand_coex(g));
  }
}
BENCHMARK(BM_ExpandCoex)->Arg(32)->Arg(128);

void BM_Layering(benchmark::State& state) {
  const auto g = random_dag(13, static_cast<int>(state.range(0)), 0.15);
  for (auto _ : state) {
    benchmark::DoNotOptimize(timeset::layering(g));
  }
}
BENCHMARK(BM_Layering)->Arg(8)->Arg(64);

void BM_DetectCycles(benchmark::State& state) {
  const auto g = random_dag(17, static_cast<int>(state.range(0)), 0.15);
  for (auto _ : state) {
    benchmark::DoNotOptimize(timeset::detect_cycles(g));
  }
}
BENCHMARK(BM_DetectCycles)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
