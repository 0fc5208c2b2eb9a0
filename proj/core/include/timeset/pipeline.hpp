#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "timeset/adapters.hpp"
#include "timeset/client.hpp"
#include "timeset/corpus.hpp"
#include "timeset/formulations.hpp"
#include "timeset/metrics.hpp"

namespace timeset {

// One JSON config file drives the whole validate -> generate -> run ->
// score -> aggregate -> report pipeline. Seeds are always explicit.
struct RunConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path templates_dir = "templates";
  std::filesystem::path output_dir = "out";
  BackendConfig backend;
  std::string model = "oracle";  // grouping key in reports

  std::vector<Formulation> formulations{Formulation::Nli, Formulation::Pairwise,
                                        Formulation::Mrc, Formulation::Timeline};
  std::vector<std::string> template_ids;  // empty: every plain template
  std::vector<TemplateFlavor> flavors{TemplateFlavor::Plain};
  MarkerStyle representation = MarkerStyle::Eid;
  std::vector<int> shots{0};
  std::uint64_t seed = 0;
  std::uint64_t tie_seed = 0;
  std::size_t budget = 4096;
  std::map<std::string, int> max_new_tokens{
      {"nli", 16}, {"pairwise", 16}, {"mrc", 128}, {"timeline", 512}};
  bool include_coex = true;

  // Benchmark-dataset mode: when `dataset` is set, generate/run/score work on
  // the external dataset instead of the TimeSET-format corpus.
  std::string dataset;
  std::filesystem::path dataset_dir;
  std::vector<int> dataset_shots{0};
  std::string eval_split = "test";

  // Breakdown bin edges; empty means corpus-quartile bins.
  std::vector<int> word_bin_edges;
  std::vector<int> event_bin_edges;
};

RunConfig run_config_from_json(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& config);

struct ValidationIssue {
  std::string doc_id;
  std::string kind;  // cycle / disconnected / title-zone / parse error kinds
  std::string message;
};

struct ValidationReport {
  int documents_checked = 0;
  int svgs_written = 0;
  std::vector<ValidationIssue> issues;
};

ValidationReport stage_validate(const RunConfig& config);

struct StageSummary {
  std::map<std::string, int> counts;  // per formulation / dataset
};

StageSummary stage_generate(const RunConfig& config);
StageSummary stage_run(const RunConfig& config);
StageSummary stage_score(const RunConfig& config);

// Per-document score row joined with its grouping keys.
struct ScoreRow {
  std::string doc_id;
  std::string formulation;
  std::string template_id;
  std::string flavor;
  std::string representation;
  int n_demos = 0;
  std::string model;
  std::string era;
  std::string word_bin;
  std::string event_bin;
  int n_events = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

std::vector<ScoreRow> read_score_rows(const std::filesystem::path& scores_jsonl);

struct GroupSummary {
  std::string group;  // value of the group_by key
  AggregateStats stats;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
};

// Collapses rows to one data point per (template, n_demos) combination, then
// aggregates per group; group_by in {overall, formulation, model, template,
// n_demos, representation, flavor, era, word_bin, event_bin}.
std::vector<GroupSummary> aggregate_rows(const std::vector<ScoreRow>& rows,
                                         const std::string& group_by);

StageSummary stage_aggregate(const RunConfig& config, const std::string& group_by);
StageSummary stage_report(const RunConfig& config, const std::string& group_by);

struct IaaReport {
  double dice = 0.0;  // pooled over documents
  PrecisionRecallF1 ta_all;     // macro over documents
  PrecisionRecallF1 ta_common;  // restricted to events both annotators marked
  int documents = 0;
};

// Inter-annotator agreement between two corpora of the same documents.
// coref_path (optional, "" to skip) holds {"doc_id": {"a": {id: cluster},
// "b": {id: cluster}}}; unmapped events canonicalize to their mention text.
IaaReport compute_iaa(const std::filesystem::path& corpus_a,
                      const std::filesystem::path& corpus_b,
                      const std::filesystem::path& coref_path);

// Updates out/manifest.json: config snapshot, code version, content hash and
// counts per stage. Hashes change iff stage outputs changed.
void update_manifest(const RunConfig& config, const std::string& stage,
                     const StageSummary& summary);

}  // namespace timeset
