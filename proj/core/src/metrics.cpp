#include "timeset/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "timeset/errors.hpp"

namespace timeset {

PrecisionRecallF1 prf_from_counts(std::size_t intersection, std::size_t predicted,
                                  std::size_t gold) {
  PrecisionRecallF1 out;
  if (predicted == 0 && gold == 0) return {1.0, 1.0, 1.0};
  out.precision = predicted == 0
                      ? 0.0
                      : static_cast<double>(intersection) / static_cast<double>(predicted);
  out.recall =
      gold == 0 ? 0.0 : static_cast<double>(intersection) / static_cast<double>(gold);
  out.f1 = (out.precision + out.recall) == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

namespace {

std::size_t intersection_size(const EdgeSet& a, const EdgeSet& b) {
  std::size_t n = 0;
  for (const auto& item : a) {
    if (b.count(item)) ++n;
  }
  return n;
}

}  // namespace

PrecisionRecallF1 temporal_awareness_pairs(const ClosurePairSet& gold,
                                           const ClosurePairSet& pred,
                                           const TemporalAwarenessOptions& opts) {
  std::size_t inter = intersection_size(gold.before_pairs, pred.before_pairs);
  std::size_t gold_n = gold.before_pairs.size();
  std::size_t pred_n = pred.before_pairs.size();
  if (opts.include_coex) {
    inter += intersection_size(gold.coex_pairs, pred.coex_pairs);
    gold_n += gold.coex_pairs.size();
    pred_n += pred.coex_pairs.size();
  }
  return prf_from_counts(inter, pred_n, gold_n);
}

PrecisionRecallF1 temporal_awareness(const TimelineGraph& gold, const TimelineGraph& pred,
                                     const TemporalAwarenessOptions& opts) {
  const auto gold_closure = transitive_closure(expand_coex(gold));
  const auto pred_closure = transitive_closure(pred);
  return temporal_awareness_pairs(gold_closure, pred_closure, opts);
}

namespace {

// Transitive reduction of a closed pair set (unique for DAGs): an edge stays
// when no intermediate vertex connects its endpoints.
EdgeSet reduce_closure(const EdgeSet& closure) {
  EdgeSet reduced;
  for (const auto& [u, v] : closure) {
    bool redundant = false;
    for (const auto& [x, w] : closure) {
      if (x != u || w == v) continue;
      if (closure.count({w, v})) {
        redundant = true;
        break;
      }
    }
    if (!redundant) reduced.emplace(u, v);
  }
  return reduced;
}

}  // namespace

PrecisionRecallF1 temporal_awareness_reduced(const TimelineGraph& gold,
                                             const TimelineGraph& pred) {
  const auto gold_expanded = expand_coex(gold);
  if (!detect_cycles(gold_expanded).empty() || !detect_cycles(pred).empty()) {
    fail(ErrorKind::CyclicGraph, "reduction-based scoring requires acyclic graphs");
  }
  const auto gold_closure = transitive_closure(gold_expanded);
  const auto pred_closure = transitive_closure(pred);
  const auto gold_reduced = reduce_closure(gold_closure.before_pairs);
  const auto pred_reduced = reduce_closure(pred_closure.before_pairs);

  if (pred_reduced.empty() && gold_reduced.empty()) return {1.0, 1.0, 1.0};
  PrecisionRecallF1 out;
  out.precision = pred_reduced.empty()
                      ? 0.0
                      : static_cast<double>(intersection_size(pred_reduced,
                                                              gold_closure.before_pairs)) /
                            static_cast<double>(pred_reduced.size());
  out.recall = gold_reduced.empty()
                   ? 0.0
                   : static_cast<double>(intersection_size(gold_reduced,
                                                           pred_closure.before_pairs)) /
                         static_cast<double>(gold_reduced.size());
  out.f1 = (out.precision + out.recall) == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

MetricReport corpus_pairwise_f1(const std::vector<ScoredDocument>& docs,
                                const TemporalAwarenessOptions& opts) {
  if (docs.empty()) fail(ErrorKind::FormatError, "corpus_pairwise_f1 needs >= 1 document");
  MetricReport report;
  double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
  for (const auto& doc : docs) {
    const auto prf = temporal_awareness(*doc.gold, *doc.pred, opts);
    report.per_document.push_back({doc.doc_id, prf});
    sum_p += prf.precision;
    sum_r += prf.recall;
    sum_f += prf.f1;
  }
  const auto n = static_cast<double>(docs.size());
  report.macro = {sum_p / n, sum_r / n, sum_f / n};
  return report;
}

double dice_span_f1(const std::set<std::string>& events_a,
                    const std::set<std::string>& events_b,
                    const std::map<std::string, std::string>& coref_map) {
  auto canonical = [&](const std::set<std::string>& events) {
    std::set<std::string> out;
    for (const auto& id : events) {
      auto it = coref_map.find(id);
      out.insert(it == coref_map.end() ? id : it->second);
    }
    return out;
  };
  const auto a = canonical(events_a);
  const auto b = canonical(events_b);
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& id : a) {
    if (b.count(id)) ++inter;
  }
  return 2.0 * static_cast<double>(inter) / static_cast<double>(a.size() + b.size());
}

double accuracy(const std::vector<std::optional<std::string>>& predictions,
                const std::vector<std::string>& gold) {
  if (predictions.size() != gold.size() || gold.empty()) {
    fail(ErrorKind::FormatError, "accuracy needs aligned, non-empty predictions");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predictions[i] && *predictions[i] == gold[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

double micro_f1(const std::vector<std::optional<std::string>>& predictions,
                const std::vector<std::string>& gold) {
  if (predictions.size() != gold.size() || gold.empty()) {
    fail(ErrorKind::FormatError, "micro_f1 needs aligned, non-empty predictions");
  }
  std::size_t true_positive = 0;
  std::size_t predicted = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!predictions[i]) continue;
    ++predicted;
    if (*predictions[i] == gold[i]) ++true_positive;
  }
  if (predicted == 0) return 0.0;
  const double p = static_cast<double>(true_positive) / static_cast<double>(predicted);
  const double r = static_cast<double>(true_positive) / static_cast<double>(gold.size());
  return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double exact_match_best(const std::set<std::string>& prediction,
                        const std::vector<std::set<std::string>>& annotator_sets) {
  if (annotator_sets.empty()) {
    fail(ErrorKind::FormatError, "exact_match_best needs >= 1 annotator set");
  }
  for (const auto& gold : annotator_sets) {
    if (prediction == gold) return 1.0;
  }
  return 0.0;
}

double exact_match_best_avg(
    const std::vector<std::set<std::string>>& predictions,
    const std::vector<std::vector<std::set<std::string>>>& gold_sets) {
  if (predictions.size() != gold_sets.size() || predictions.empty()) {
    fail(ErrorKind::FormatError, "exact_match_best_avg needs aligned inputs");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    total += exact_match_best(predictions[i], gold_sets[i]);
  }
  return total / static_cast<double>(predictions.size());
}

AggregateStats aggregate_stats(const std::vector<double>& values) {
  if (values.empty()) fail(ErrorKind::FormatError, "aggregate_stats needs >= 1 value");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    if (sorted.size() == 1) return sorted[0];
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  AggregateStats stats;
  stats.q1 = quantile(0.25);
  stats.median = quantile(0.5);
  stats.q3 = quantile(0.75);
  stats.iqr = stats.q3 - stats.q1;
  stats.count = sorted.size();
  return stats;
}

}  // namespace timeset
