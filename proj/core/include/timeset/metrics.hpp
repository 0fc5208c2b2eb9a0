#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "timeset/graph.hpp"

namespace timeset {

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const PrecisionRecallF1&, const PrecisionRecallF1&) = default;
};

PrecisionRecallF1 prf_from_counts(std::size_t intersection, std::size_t predicted,
                                  std::size_t gold);

struct TemporalAwarenessOptions {
  // Count COEX pairs as normalized unordered labeled items in the closure
  // intersection (the alternative convention scores before-pairs only).
  bool include_coex = true;
};

// Closure-based scoring: the gold graph is COEX-expanded and both graphs are
// replaced by their transitive closures; precision and recall are set
// intersections over labeled pair items. Both closures empty scores (1,1,1);
// an empty predicted closure has precision 0.
PrecisionRecallF1 temporal_awareness(const TimelineGraph& gold, const TimelineGraph& pred,
                                     const TemporalAwarenessOptions& opts = {});
PrecisionRecallF1 temporal_awareness_pairs(const ClosurePairSet& gold,
                                           const ClosurePairSet& pred,
                                           const TemporalAwarenessOptions& opts = {});

// Reference scorer in the transitive-reduction style of the older shared
// tasks, for comparison only. Requires acyclic inputs.
PrecisionRecallF1 temporal_awareness_reduced(const TimelineGraph& gold,
                                             const TimelineGraph& pred);

struct DocScore {
  std::string doc_id;
  PrecisionRecallF1 prf;
};

struct MetricReport {
  std::vector<DocScore> per_document;
  PrecisionRecallF1 macro;  // unweighted mean over documents
  std::map<std::string, std::string> group;
};

struct ScoredDocument {
  std::string doc_id;
  const TimelineGraph* gold = nullptr;
  const TimelineGraph* pred = nullptr;
};

MetricReport corpus_pairwise_f1(const std::vector<ScoredDocument>& docs,
                                const TemporalAwarenessOptions& opts = {});

// Dice coefficient over coreference-canonicalized event sets; empty vs empty
// scores 1.
double dice_span_f1(const std::set<std::string>& events_a,
                    const std::set<std::string>& events_b,
                    const std::map<std::string, std::string>& coref_map = {});

// Benchmark metrics. Predictions are nullopt on abstention.
double accuracy(const std::vector<std::optional<std::string>>& predictions,
                const std::vector<std::string>& gold);
double micro_f1(const std::vector<std::optional<std::string>>& predictions,
                const std::vector<std::string>& gold);

// Exact set equality against the best-matching annotator answer set.
double exact_match_best(const std::set<std::string>& prediction,
                        const std::vector<std::set<std::string>>& annotator_sets);
double exact_match_best_avg(
    const std::vector<std::set<std::string>>& predictions,
    const std::vector<std::vector<std::set<std::string>>>& gold_sets);

struct AggregateStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  std::size_t count = 0;
};

// Quartiles by linear interpolation.
AggregateStats aggregate_stats(const std::vector<double>& values);

}  // namespace timeset
