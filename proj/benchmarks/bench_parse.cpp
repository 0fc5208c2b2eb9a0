#include <benchmark/benchmark.h>

#include <string>

#include "timeset/markers.hpp"
#include "timeset/standoff.hpp"

namespace {

struct Fixture {
  std::string text;
  std::string annotation;

  explicit Fixture(int n_events) {
    text = "Bench doc\nMonday, March 3, 2014\n\n";
    for (int i = 1; i <= n_events; ++i) {
      const std::string word = "happened" + std::to_string(i);
      if (text.back() != '\n') text += ' ';
      const auto begin = text.size();
      text += word + " and then more words follow here";
      annotation += "T" + std::to_string(i) + "\tEvent " + std::to_string(begin) + " " +
                    std::to_string(begin + word.size()) + "\t" + word + "\n";
      if (i > 1) {
        annotation += "R" + std::to_string(i - 1) + "\tAFTER Arg1:T" + std::to_string(i) +
                      " Arg2:T" + std::to_string(i - 1) + "\n";
      }
    }
  }
};

void BM_ParseStandoff(benchmark::State& state) {
  const Fixture fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(timeset::parse_standoff(fixture.annotation, fixture.text));
  }
}
BENCHMARK(BM_ParseStandoff)->Arg(8)->Arg(64);

void BM_RenderMarkers(benchmark::State& state) {
  const Fixture fixture(static_cast<int>(state.range(0)));
  const auto graph = timeset::parse_standoff(fixture.annotation, fixture.text);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        timeset::render_markers(fixture.text, graph, timeset::MarkerStyle::Eid));
  }
}
BENCHMARK(BM_RenderMarkers)->Arg(8)->Arg(64);

}  // namespace
