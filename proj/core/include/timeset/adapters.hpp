#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "timeset/templates.hpp"

namespace timeset {

enum class BenchmarkDataset { TemporalNli, Matres, TdDiscourse, Torque };

const char* to_string(BenchmarkDataset dataset);
BenchmarkDataset benchmark_dataset_from_string(const std::string& name);

// One benchmark query in the shape its bound formulation renders:
// TemporalNLI -> NLI, MATRES/TDDiscourse -> Pairwise, TORQUE -> MRC.
struct BenchmarkInstance {
  BenchmarkDataset dataset = BenchmarkDataset::Matres;
  std::string id;
  std::string split;  // train / dev / test
  Formulation formulation = Formulation::Pairwise;
  std::string context;

  // Pairwise payload.
  std::string arg1;
  std::string arg2;
  std::vector<std::string> label_set;  // dataset answer vocabulary
  // NLI payload.
  std::string hypothesis;
  // MRC payload.
  std::string question;

  std::string gold_label;  // NLI / Pairwise
  std::vector<std::set<std::string>> gold_answer_sets;  // TORQUE, >= 1 set
};

// MATRES layout: annotation dir holding aquaint.txt / timebank.txt /
// platinum.txt rows `DOCID<TAB>verb1<TAB>verb2<TAB>eiid1<TAB>eiid2<TAB>LABEL`
// (eiid accepted with or without the "ei" prefix) plus a TimeML source dir
// with DOCID.tml files. aquaint+timebank form the training pool with a
// seeded 20% document-level dev carve-out; platinum is the test split.
struct MatresPaths {
  std::filesystem::path annotation_dir;
  std::filesystem::path source_dir;  // .tml files
};
std::vector<BenchmarkInstance> load_matres(const MatresPaths& paths,
                                           std::uint64_t seed = 0);

// TDDiscourse (TDDMan only): TDDManTrain/Dev/Test.tsv rows
// `DOCID<TAB>eid1<TAB>eid2<TAB>LABEL` with labels {a,b,i,ii,s} or the full
// names; the original split is preserved. Sources are the same TimeML files.
struct TdDiscoursePaths {
  std::filesystem::path annotation_dir;
  std::filesystem::path source_dir;
};
std::vector<BenchmarkInstance> load_tddiscourse(const TdDiscoursePaths& paths);

// TemporalNLI recast data: {train,dev,test}.jsonl rows
// {"context":..., "hypothesis":..., "label": "entailed"|"not-entailed"}.
// Duplicate (context, hypothesis) rows are dropped.
std::vector<BenchmarkInstance> load_temporal_nli(const std::filesystem::path& dir);

// TORQUE: train.json / dev.json, each a JSON array of
// {"passage":..., "question_answer_pairs":[{"question":...,
//   "answer": {"spans": [...]}} | {"answers": [{"spans": [...]}, ...]}]}.
// The train set is carved 80/20 into train/dev by passage; the original dev
// file becomes the reporting split ("test").
struct TorquePaths {
  std::filesystem::path train_file;
  std::filesystem::path dev_file;
};
std::vector<BenchmarkInstance> load_torque(const TorquePaths& paths,
                                           std::uint64_t seed = 0);

// Interchange JSON line {dataset, id, context, query, gold, split}.
std::string to_interchange_json(const BenchmarkInstance& instance);
BenchmarkInstance benchmark_instance_from_json(const std::string& line);

// Renders an instance with a template of its bound formulation; dataset
// label sets replace the template's own choice vocabulary. Demonstrations
// are rendered fully (context + gold answer) before the query.
std::string render_benchmark_prompt(
    const BenchmarkInstance& instance, const PromptTemplate& tmpl,
    const std::vector<const BenchmarkInstance*>& demos = {});

// Gold target in this template's answer format (demo targets, oracle runs).
std::string benchmark_gold_answer(const BenchmarkInstance& instance,
                                  const PromptTemplate& tmpl);

struct BenchmarkPrediction {
  std::optional<std::string> label;    // NLI / Pairwise; nullopt = abstain
  std::set<std::string> answer_set;    // TORQUE
};

BenchmarkPrediction parse_benchmark_completion(const BenchmarkInstance& instance,
                                               const PromptTemplate& tmpl,
                                               const std::string& completion);

// Dataset-bound metric: accuracy (TemporalNLI), micro-F1 (MATRES,
// TDDiscourse), best-over-annotations exact match (TORQUE).
double score_benchmark(const std::vector<BenchmarkInstance>& instances,
                       const std::vector<BenchmarkPrediction>& predictions);

}  // namespace timeset
