// Command-line front end for the timeline evaluation pipeline:
//   validate -> generate -> run -> score -> aggregate -> report, plus iaa.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "timeset/errors.hpp"
#include "timeset/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string corpus_dir;
  std::string templates_dir;
  std::string output_dir;
  std::string backend_kind;
  std::string endpoint;
  std::string cache_path;
  std::string representation;
  std::string dataset;
  std::string dataset_dir;
  std::string model;
  std::vector<int> shots;
  std::vector<std::string> formulations;
  std::vector<std::string> template_ids;
  std::int64_t seed = -1;
  std::int64_t tie_seed = -1;
  std::int64_t budget = -1;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON run configuration");
  cmd->add_option("--corpus", args.corpus_dir, "corpus directory (manifest.jsonl + txt/ann)");
  cmd->add_option("--templates", args.templates_dir, "template asset directory");
  cmd->add_option("--out", args.output_dir, "output directory");
  cmd->add_option("--backend", args.backend_kind, "backend kind: http|replay|oracle|stub-fixed");
  cmd->add_option("--endpoint", args.endpoint, "http backend endpoint URL");
  cmd->add_option("--cache", args.cache_path, "completion cache file (JSONL)");
  cmd->add_option("--representation", args.representation, "event representation: eid|star|structured");
  cmd->add_option("--shots", args.shots, "demonstration counts, e.g. --shots 0 1 2");
  cmd->add_option("--formulations", args.formulations, "subset of nli pairwise mrc timeline");
  cmd->add_option("--template-ids", args.template_ids, "explicit template ids");
  cmd->add_option("--seed", args.seed, "generation seed");
  cmd->add_option("--tie-seed", args.tie_seed, "majority-vote tie-break seed");
  cmd->add_option("--budget", args.budget, "prompt length budget in length units");
  cmd->add_option("--dataset", args.dataset, "benchmark dataset: temporal_nli|matres|tddiscourse|torque");
  cmd->add_option("--dataset-dir", args.dataset_dir, "benchmark dataset root");
  cmd->add_option("--model", args.model, "model name recorded in score rows");
}

timeset::RunConfig resolve_config(const CommonArgs& args) {
  timeset::RunConfig config;
  if (!args.config_path.empty()) config = timeset::load_run_config(args.config_path);
  if (!args.corpus_dir.empty()) config.corpus_dir = args.corpus_dir;
  if (!args.templates_dir.empty()) config.templates_dir = args.templates_dir;
  if (!args.output_dir.empty()) config.output_dir = args.output_dir;
  if (!args.backend_kind.empty()) {
    config.backend.kind = timeset::backend_kind_from_string(args.backend_kind);
  }
  if (!args.endpoint.empty()) config.backend.endpoint = args.endpoint;
  if (!args.cache_path.empty()) config.backend.cache_path = args.cache_path;
  if (!args.representation.empty()) {
    config.representation = timeset::marker_style_from_string(args.representation);
  }
  if (!args.shots.empty()) config.shots = args.shots;
  if (!args.formulations.empty()) {
    config.formulations.clear();
    for (const auto& name : args.formulations) {
      config.formulations.push_back(timeset::formulation_from_string(name));
    }
  }
  if (!args.template_ids.empty()) config.template_ids = args.template_ids;
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
  if (args.tie_seed >= 0) config.tie_seed = static_cast<std::uint64_t>(args.tie_seed);
  if (args.budget >= 0) config.budget = static_cast<std::size_t>(args.budget);
  if (!args.dataset.empty()) config.dataset = args.dataset;
  if (!args.dataset_dir.empty()) config.dataset_dir = args.dataset_dir;
  if (!args.model.empty()) config.model = args.model;
  return config;
}

void print_counts(const timeset::StageSummary& summary) {
  for (const auto& [key, value] : summary.counts) {
    std::printf("  %-32s %d\n", key.c_str(), value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"timeline construction evaluation harness"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string group_by = "formulation";
  std::string corpus_a, corpus_b, coref_path;

  auto* validate = app.add_subcommand("validate", "check gold annotation and draw timelines");
  add_common_options(validate, args);

  auto* generate = app.add_subcommand("generate", "write prompt instances");
  add_common_options(generate, args);

  auto* run = app.add_subcommand("run", "send prompts to the backend, parse completions");
  add_common_options(run, args);

  auto* score = app.add_subcommand("score", "assemble predicted timelines and score them");
  add_common_options(score, args);

  auto* aggregate = app.add_subcommand("aggregate", "median/IQR statistics per group");
  add_common_options(aggregate, args);
  aggregate->add_option("--group-by", group_by,
                        "overall|formulation|model|template|n_demos|representation|flavor|era|word_bin|event_bin");

  auto* report = app.add_subcommand("report", "CSV + SVG boxplots per group");
  add_common_options(report, args);
  report->add_option("--group-by", group_by, "grouping key (see aggregate)");

  auto* iaa = app.add_subcommand("iaa", "inter-annotator agreement between two corpora");
  add_common_options(iaa, args);
  iaa->add_option("--corpus-a", corpus_a, "first annotator's corpus")->required();
  iaa->add_option("--corpus-b", corpus_b, "second annotator's corpus")->required();
  iaa->add_option("--coref", coref_path, "coreference map JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = resolve_config(args);
    if (validate->parsed()) {
      const auto result = timeset::stage_validate(config);
      std::printf("checked %d documents, wrote %d SVGs, %zu issue(s)\n",
                  result.documents_checked, result.svgs_written, result.issues.size());
      for (const auto& issue : result.issues) {
        std::printf("  [%s] %s: %s\n", issue.kind.c_str(), issue.doc_id.c_str(),
                    issue.message.c_str());
      }
      return result.issues.empty() ? 0 : 2;
    }
    if (generate->parsed()) {
      std::printf("generate:\n");
      print_counts(timeset::stage_generate(config));
      return 0;
    }
    if (run->parsed()) {
      std::printf("run:\n");
      print_counts(timeset::stage_run(config));
      return 0;
    }
    if (score->parsed()) {
      std::printf("score:\n");
      print_counts(timeset::stage_score(config));
      return 0;
    }
    if (aggregate->parsed()) {
      std::printf("aggregate by %s:\n", group_by.c_str());
      print_counts(timeset::stage_aggregate(config, group_by));
      return 0;
    }
    if (report->parsed()) {
      std::printf("report by %s:\n", group_by.c_str());
      print_counts(timeset::stage_report(config, group_by));
      return 0;
    }
    if (iaa->parsed()) {
      const auto result = timeset::compute_iaa(corpus_a, corpus_b, coref_path);
      std::printf("documents: %d\n", result.documents);
      std::printf("dice: %.4f\n", result.dice);
      std::printf("temporal awareness (all events):    p=%.4f r=%.4f f1=%.4f\n",
                  result.ta_all.precision, result.ta_all.recall, result.ta_all.f1);
      std::printf("temporal awareness (common events): p=%.4f r=%.4f f1=%.4f\n",
                  result.ta_common.precision, result.ta_common.recall, result.ta_common.f1);
      return 0;
    }
  } catch (const timeset::TimesetError& e) {
    nlohmann::json diag{{"error", timeset::to_string(e.kind())}, {"message", e.what()}};
    std::cerr << diag.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json diag{{"error", "Unhandled"}, {"message", e.what()}};
    std::cerr << diag.dump() << "\n";
    return 1;
  }
  return 0;
}
