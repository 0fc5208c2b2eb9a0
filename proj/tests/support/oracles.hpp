#pragma once

// Independent oracles for property tests. These deliberately avoid the
// library's graph machinery: reachability is recomputed with a naive
// recursive DFS over raw edge lists, quartiles with plain sorting.

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "timeset/graph.hpp"

namespace timeset::testing {

// All-pairs path existence by naive DFS over an explicit edge list.
std::set<std::pair<std::string, std::string>> brute_force_reachability(
    const std::vector<std::string>& nodes,
    const std::set<std::pair<std::string, std::string>>& edges);

// Random DAG on `n` nodes: edges sampled with probability `edge_prob` and
// oriented along a shuffled node order, so the result is acyclic by
// construction.
timeset::TimelineGraph random_dag(std::uint64_t seed, int n, double edge_prob);

// Random graph that may contain cycles.
timeset::TimelineGraph random_digraph(std::uint64_t seed, int n, double edge_prob,
                                      double coex_prob = 0.0);

// Quartile oracle: sort and linearly interpolate.
double sorted_quantile(std::vector<double> values, double q);

}  // namespace timeset::testing
