#include "timeset/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "timeset/errors.hpp"
#include "timeset/interpret.hpp"
#include "timeset/rng.hpp"
#include "timeset/standoff.hpp"
#include "timeset/svg.hpp"

namespace timeset {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::filesystem::path& path, ErrorKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kind, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::ConfigError, "cannot write " + path.string());
  out << content;
}

std::vector<std::string> read_jsonl(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "cannot read " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string csv_cell(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += "\"";
  return quoted;
}

std::string fmt6(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

}  // namespace

RunConfig run_config_from_json(const std::string& json_text) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ConfigError, std::string("bad config json: ") + e.what());
  }
  RunConfig config;
  auto path_field = [&](const char* key, std::filesystem::path& out) {
    if (obj.contains(key)) out = obj[key].get<std::string>();
  };
  path_field("corpus_dir", config.corpus_dir);
  path_field("templates_dir", config.templates_dir);
  path_field("output_dir", config.output_dir);
  path_field("dataset_dir", config.dataset_dir);

  if (obj.contains("backend")) {
    const auto& backend = obj["backend"];
    config.backend.kind =
        backend_kind_from_string(backend.value("kind", std::string("oracle")));
    config.backend.endpoint = backend.value("endpoint", std::string());
    config.backend.model = backend.value("model", std::string());
    config.backend.auth_env = backend.value("auth_env", std::string());
    config.backend.max_in_flight = backend.value("max_in_flight", 4);
    config.backend.timeout_s = backend.value("timeout_s", 30.0);
    config.backend.cache_path = backend.value("cache_path", std::string());
    config.backend.fixed_completion = backend.value("fixed_completion", std::string());
    if (backend.contains("retry")) {
      config.backend.retry.max_attempts = backend["retry"].value("max_attempts", 3);
      config.backend.retry.backoff_base_s =
          backend["retry"].value("backoff_base_s", 0.25);
    }
  }
  if (obj.contains("model")) config.model = obj["model"].get<std::string>();
  if (obj.contains("formulations")) {
    config.formulations.clear();
    for (const auto& name : obj["formulations"]) {
      config.formulations.push_back(formulation_from_string(name.get<std::string>()));
    }
  }
  if (obj.contains("template_ids")) {
    config.template_ids = obj["template_ids"].get<std::vector<std::string>>();
  }
  if (obj.contains("flavors")) {
    config.flavors.clear();
    for (const auto& name : obj["flavors"]) {
      config.flavors.push_back(flavor_from_string(name.get<std::string>()));
    }
  }
  if (obj.contains("representation")) {
    config.representation =
        marker_style_from_string(obj["representation"].get<std::string>());
  }
  if (obj.contains("shots")) config.shots = obj["shots"].get<std::vector<int>>();
  if (obj.contains("seed")) config.seed = obj["seed"].get<std::uint64_t>();
  if (obj.contains("tie_seed")) config.tie_seed = obj["tie_seed"].get<std::uint64_t>();
  if (obj.contains("budget")) config.budget = obj["budget"].get<std::size_t>();
  if (obj.contains("max_new_tokens")) {
    for (const auto& [key, value] : obj["max_new_tokens"].items()) {
      config.max_new_tokens[key] = value.get<int>();
    }
  }
  if (obj.contains("include_coex")) config.include_coex = obj["include_coex"].get<bool>();
  if (obj.contains("dataset")) config.dataset = obj["dataset"].get<std::string>();
  if (obj.contains("dataset_shots")) {
    config.dataset_shots = obj["dataset_shots"].get<std::vector<int>>();
  }
  if (obj.contains("eval_split")) config.eval_split = obj["eval_split"].get<std::string>();
  if (obj.contains("word_bin_edges")) {
    config.word_bin_edges = obj["word_bin_edges"].get<std::vector<int>>();
  }
  if (obj.contains("event_bin_edges")) {
    config.event_bin_edges = obj["event_bin_edges"].get<std::vector<int>>();
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(read_file(path, ErrorKind::ConfigError));
}

std::string run_config_to_json(const RunConfig& config) {
  nlohmann::json obj;
  obj["corpus_dir"] = config.corpus_dir.string();
  obj["templates_dir"] = config.templates_dir.string();
  obj["output_dir"] = config.output_dir.string();
  obj["backend"] = {{"kind", to_string(config.backend.kind)},
                    {"endpoint", config.backend.endpoint},
                    {"model", config.backend.model},
                    {"auth_env", config.backend.auth_env},
                    {"max_in_flight", config.backend.max_in_flight},
                    {"timeout_s", config.backend.timeout_s},
                    {"cache_path", config.backend.cache_path},
                    {"fixed_completion", config.backend.fixed_completion},
                    {"retry",
                     {{"max_attempts", config.backend.retry.max_attempts},
                      {"backoff_base_s", config.backend.retry.backoff_base_s}}}};
  obj["model"] = config.model;
  nlohmann::json formulations = nlohmann::json::array();
  for (auto f : config.formulations) formulations.push_back(to_string(f));
  obj["formulations"] = formulations;
  obj["template_ids"] = config.template_ids;
  nlohmann::json flavors = nlohmann::json::array();
  for (auto f : config.flavors) flavors.push_back(to_string(f));
  obj["flavors"] = flavors;
  obj["representation"] = to_string(config.representation);
  obj["shots"] = config.shots;
  obj["seed"] = config.seed;
  obj["tie_seed"] = config.tie_seed;
  obj["budget"] = config.budget;
  obj["max_new_tokens"] = config.max_new_tokens;
  obj["include_coex"] = config.include_coex;
  obj["dataset"] = config.dataset;
  obj["dataset_dir"] = config.dataset_dir.string();
  obj["dataset_shots"] = config.dataset_shots;
  obj["eval_split"] = config.eval_split;
  obj["word_bin_edges"] = config.word_bin_edges;
  obj["event_bin_edges"] = config.event_bin_edges;
  return obj.dump(2);
}

// --- validate ----------------------------------------------------------------

ValidationReport stage_validate(const RunConfig& config) {
  ValidationReport report;
  const auto manifest_path = config.corpus_dir / "manifest.jsonl";
  if (!std::filesystem::exists(manifest_path)) {
    fail(ErrorKind::MissingPair, "no manifest.jsonl under " + config.corpus_dir.string());
  }

  const auto svg_dir = config.output_dir / "validate";
  std::filesystem::create_directories(svg_dir);

  for (const auto& line : read_jsonl(manifest_path)) {
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      report.issues.push_back({"", "ManifestError", e.what()});
      continue;
    }
    const auto id = row.value("id", std::string());
    ++report.documents_checked;
    DocumentRecord doc;
    try {
      doc = make_document(id, row.value("title", std::string()),
                          row.value("dct", std::string("1970-01-01")),
                          row.value("topic", std::string()),
                          row.value("split", std::string("test")),
                          read_file(config.corpus_dir / (id + ".txt"), ErrorKind::MissingPair),
                          read_file(config.corpus_dir / (id + ".ann"), ErrorKind::MissingPair));
    } catch (const TimesetError& e) {
      report.issues.push_back({id, to_string(e.kind()), e.what()});
      continue;
    }

    const auto expanded = expand_coex(doc.graph);
    for (const auto& cycle : detect_cycles(expanded)) {
      std::string vertices;
      for (const auto& v : cycle) {
        if (!vertices.empty()) vertices += " -> ";
        vertices += v;
      }
      report.issues.push_back({id, "CyclicGraph", "cycle after COEX expansion: " + vertices});
    }
    if (!doc.graph.weakly_connected()) {
      report.issues.push_back(
          {id, "Disconnected", "events are not weakly connected through edges and coex links"});
    }
    const auto zone = doc.title_zone();
    for (const auto& [event_id, ev] : doc.graph.events()) {
      if (ev.span.begin < zone.end) {
        report.issues.push_back(
            {id, "TitleZone", event_id + " (" + ev.mention + ") overlaps the title line"});
      }
    }

    write_file(svg_dir / (id + ".svg"), render_timeline_svg(doc));
    ++report.svgs_written;
  }

  nlohmann::json diag = nlohmann::json::array();
  for (const auto& issue : report.issues) {
    diag.push_back({{"doc_id", issue.doc_id}, {"kind", issue.kind}, {"message", issue.message}});
  }
  write_file(config.output_dir / "validate_report.json", diag.dump(2) + "\n");
  return report;
}

// --- shared helpers ----------------------------------------------------------

namespace {

std::vector<const PromptTemplate*> selected_templates(const RunConfig& config,
                                                      const TemplateSet& templates,
                                                      Formulation formulation) {
  std::vector<const PromptTemplate*> out;
  if (!config.template_ids.empty()) {
    for (const auto& id : config.template_ids) {
      if (templates.has(formulation, id)) out.push_back(&templates.get(formulation, id));
    }
    return out;
  }
  for (auto flavor : config.flavors) {
    for (const auto* t : templates.select(formulation, flavor)) out.push_back(t);
  }
  std::sort(out.begin(), out.end(),
            [](const PromptTemplate* a, const PromptTemplate* b) { return a->id < b->id; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int max_tokens_for(const RunConfig& config, Formulation formulation) {
  const auto it = config.max_new_tokens.find(to_string(formulation));
  if (it != config.max_new_tokens.end()) return it->second;
  return 128;
}

struct CorpusIndex {
  std::vector<DocumentRecord> docs;
  std::map<std::string, const DocumentRecord*> by_id;
  std::vector<const DocumentRecord*> dev;

  explicit CorpusIndex(const std::filesystem::path& dir) : docs(load_corpus(dir)) {
    for (const auto& doc : docs) {
      by_id[doc.id] = &doc;
      if (doc.split == "dev") dev.push_back(&doc);
    }
  }
};

bool benchmark_mode(const RunConfig& config) { return !config.dataset.empty(); }

std::vector<BenchmarkInstance> load_benchmark(const RunConfig& config) {
  const auto dataset = benchmark_dataset_from_string(config.dataset);
  switch (dataset) {
    case BenchmarkDataset::Matres:
      return load_matres({config.dataset_dir / "annotations", config.dataset_dir / "docs"},
                         config.seed);
    case BenchmarkDataset::TdDiscourse:
      return load_tddiscourse(
          {config.dataset_dir / "annotations", config.dataset_dir / "docs"});
    case BenchmarkDataset::TemporalNli:
      return load_temporal_nli(config.dataset_dir);
    case BenchmarkDataset::Torque:
      return load_torque(
          {config.dataset_dir / "train.json", config.dataset_dir / "dev.json"},
          config.seed);
  }
  fail(ErrorKind::ConfigError, "unhandled dataset");
}

}  // namespace

// --- generate ----------------------------------------------------------------

namespace {

StageSummary generate_timeset(const RunConfig& config) {
  StageSummary summary;
  const CorpusIndex corpus(config.corpus_dir);
  const auto templates = TemplateSet::load(config.templates_dir);

  for (auto formulation : config.formulations) {
    std::string jsonl;
    int count = 0;
    int skipped_budget = 0;
    int skipped_small = 0;
    for (const auto* tmpl : selected_templates(config, templates, formulation)) {
      for (int n_demos : config.shots) {
        GenerationOptions opts;
        opts.representation = config.representation;
        opts.n_demos = n_demos;
        opts.seed = config.seed;
        opts.budget = config.budget;
        opts.skip_over_budget = true;
        for (const auto& doc : corpus.docs) {
          if ((formulation == Formulation::Nli || formulation == Formulation::Pairwise) &&
              doc.graph.event_count() < 2) {
            ++skipped_small;
            continue;
          }
          auto instances = generate_instances(doc, *tmpl, opts, corpus.dev);
          const auto expected = [&]() -> std::size_t {
            const auto n = doc.graph.event_count();
            switch (formulation) {
              case Formulation::Nli: return n * (n - 1) * 3;
              case Formulation::Pairwise: return n * (n - 1);
              case Formulation::Mrc: return 3 * n;
              case Formulation::Timeline: return 1;
            }
            return 0;
          }();
          skipped_budget += static_cast<int>(expected - instances.size());
          for (const auto& instance : instances) {
            jsonl += to_json_line(instance);
            jsonl += "\n";
            ++count;
          }
        }
      }
    }
    write_file(config.output_dir / "instances" / (std::string(to_string(formulation)) + ".jsonl"),
               jsonl);
    summary.counts[to_string(formulation)] = count;
    if (skipped_budget > 0) {
      summary.counts[std::string(to_string(formulation)) + "_skipped_budget"] = skipped_budget;
    }
    if (skipped_small > 0) {
      summary.counts[std::string(to_string(formulation)) + "_skipped_too_few_events"] =
          skipped_small;
    }
  }
  return summary;
}

StageSummary generate_benchmark(const RunConfig& config) {
  StageSummary summary;
  const auto all = load_benchmark(config);
  const auto templates = TemplateSet::load(config.templates_dir);
  const auto formulation = all.empty() ? Formulation::Pairwise : all.front().formulation;

  std::vector<const BenchmarkInstance*> demo_pool;
  std::vector<const BenchmarkInstance*> eval;
  for (const auto& instance : all) {
    if (instance.split == "train") demo_pool.push_back(&instance);
    if (instance.split == config.eval_split) eval.push_back(&instance);
  }

  std::string jsonl;
  int count = 0;
  int skipped_budget = 0;
  for (const auto* tmpl : selected_templates(config, templates, formulation)) {
    for (int n_demos : config.dataset_shots) {
      for (const auto* instance : eval) {
        Rng rng(fnv1a64_mix(config.seed, config.dataset + "|" + instance->id + "|" +
                                             std::to_string(n_demos)));
        std::vector<const BenchmarkInstance*> demos;
        if (n_demos > 0) {
          if (static_cast<int>(demo_pool.size()) < n_demos) {
            fail(ErrorKind::InsufficientDevDocs,
                 "need " + std::to_string(n_demos) + " train instances for demos");
          }
          for (auto idx : rng.sample_indices(demo_pool.size(),
                                             static_cast<std::size_t>(n_demos))) {
            demos.push_back(demo_pool[idx]);
          }
        }
        const auto prompt = render_benchmark_prompt(*instance, *tmpl, demos);
        if (default_length_units(prompt) > config.budget) {
          ++skipped_budget;
          continue;
        }
        nlohmann::json row;
        row["key"] = instance->id + "|" + tmpl->id + "|d" + std::to_string(n_demos);
        row["template_id"] = tmpl->id;
        row["n_demos"] = n_demos;
        row["prompt"] = prompt;
        row["gold_answer"] = benchmark_gold_answer(*instance, *tmpl);
        row["instance"] = nlohmann::json::parse(to_interchange_json(*instance));
        jsonl += row.dump();
        jsonl += "\n";
        ++count;
      }
    }
  }
  write_file(config.output_dir / "instances" / "benchmark.jsonl", jsonl);
  summary.counts["benchmark"] = count;
  if (skipped_budget > 0) summary.counts["benchmark_skipped_budget"] = skipped_budget;
  return summary;
}

}  // namespace

StageSummary stage_generate(const RunConfig& config) {
  auto summary =
      benchmark_mode(config) ? generate_benchmark(config) : generate_timeset(config);
  update_manifest(config, "generate", summary);
  return summary;
}

// --- run ----------------------------------------------------------------------

namespace {

std::unique_ptr<Backend> build_backend(const RunConfig& config,
                                       const std::map<std::string, std::string>& oracle_answers) {
  std::unique_ptr<Backend> backend;
  if (config.backend.kind == BackendKind::Oracle) {
    backend = make_oracle_backend(oracle_answers);
  } else {
    backend = make_backend(config.backend);
  }
  if (!config.backend.cache_path.empty() && config.backend.kind != BackendKind::Replay) {
    backend = make_caching_backend(std::move(backend), config.backend.cache_path);
  }
  return backend;
}

StageSummary run_timeset(const RunConfig& config) {
  StageSummary summary;
  const CorpusIndex corpus(config.corpus_dir);
  const auto templates = TemplateSet::load(config.templates_dir);

  for (auto formulation : config.formulations) {
    const auto instances_path =
        config.output_dir / "instances" / (std::string(to_string(formulation)) + ".jsonl");
    if (!std::filesystem::exists(instances_path)) continue;

    std::vector<PromptInstance> instances;
    for (const auto& line : read_jsonl(instances_path)) {
      instances.push_back(prompt_instance_from_json(line));
    }

    std::map<std::string, std::string> oracle_answers;
    std::vector<GenerationRequest> requests;
    for (const auto& instance : instances) {
      oracle_answers[instance.instance_id] = instance.gold_answer;
      GenerationRequest request;
      request.id = instance.instance_id;
      request.prompt = instance.prompt;
      request.max_new_tokens = max_tokens_for(config, formulation);
      requests.push_back(std::move(request));
    }

    auto backend = build_backend(config, oracle_answers);
    const auto batch = generate_batch(*backend, requests, config.backend.max_in_flight);

    std::map<std::string, const GenerationResponse*> by_id;
    for (const auto& response : batch.responses) by_id[response.id] = &response;

    std::string jsonl;
    int ok = 0, abstain = 0;
    for (const auto& instance : instances) {
      const auto it = by_id.find(instance.instance_id);
      if (it == by_id.end()) continue;  // failed request, retried on rerun
      const auto& tmpl = templates.get(instance.formulation, instance.template_id);
      const auto* doc = corpus.by_id.at(instance.doc_id);
      const auto record = parse_completion(instance, tmpl, *doc, it->second->completion);
      (record.status == ParseStatus::Ok ? ok : abstain) += 1;
      jsonl += to_json_line(record);
      jsonl += "\n";
    }
    write_file(config.output_dir / "predictions" /
                   (std::string(to_string(formulation)) + ".jsonl"),
               jsonl);
    summary.counts[std::string(to_string(formulation)) + "_ok"] = ok;
    summary.counts[std::string(to_string(formulation)) + "_abstain"] = abstain;
    if (!batch.failures.empty()) {
      summary.counts[std::string(to_string(formulation)) + "_failed"] =
          static_cast<int>(batch.failures.size());
    }
  }
  return summary;
}

StageSummary run_benchmark(const RunConfig& config) {
  StageSummary summary;
  const auto instances_path = config.output_dir / "instances" / "benchmark.jsonl";
  const auto rows = read_jsonl(instances_path);

  std::map<std::string, std::string> oracle_answers;
  std::vector<GenerationRequest> requests;
  std::vector<nlohmann::json> parsed_rows;
  for (const auto& line : rows) {
    auto row = nlohmann::json::parse(line);
    const auto key = row.at("key").get<std::string>();
    oracle_answers[key] = row.at("gold_answer").get<std::string>();
    GenerationRequest request;
    request.id = key;
    request.prompt = row.at("prompt").get<std::string>();
    request.max_new_tokens = max_tokens_for(
        config, benchmark_instance_from_json(row.at("instance").dump()).formulation);
    requests.push_back(std::move(request));
    parsed_rows.push_back(std::move(row));
  }

  auto backend = build_backend(config, oracle_answers);
  const auto batch = generate_batch(*backend, requests, config.backend.max_in_flight);
  std::map<std::string, const GenerationResponse*> by_id;
  for (const auto& response : batch.responses) by_id[response.id] = &response;

  std::string jsonl;
  int answered = 0;
  for (const auto& row : parsed_rows) {
    const auto key = row.at("key").get<std::string>();
    const auto it = by_id.find(key);
    if (it == by_id.end()) continue;
    nlohmann::json record;
    record["key"] = key;
    record["completion"] = it->second->completion;
    jsonl += record.dump();
    jsonl += "\n";
    ++answered;
  }
  write_file(config.output_dir / "predictions" / "benchmark.jsonl", jsonl);
  summary.counts["benchmark_answered"] = answered;
  if (!batch.failures.empty()) {
    summary.counts["benchmark_failed"] = static_cast<int>(batch.failures.size());
  }
  return summary;
}

}  // namespace

StageSummary stage_run(const RunConfig& config) {
  auto summary = benchmark_mode(config) ? run_benchmark(config) : run_timeset(config);
  update_manifest(config, "run", summary);
  return summary;
}

// --- score ---------------------------------------------------------------------

namespace {

std::vector<int> quartile_edges(std::vector<int> values) {
  std::sort(values.begin(), values.end());
  if (values.empty()) return {};
  auto at = [&](double q) {
    const auto idx = static_cast<std::size_t>(q * static_cast<double>(values.size() - 1));
    return values[idx];
  };
  std::vector<int> edges{at(0.25), at(0.5), at(0.75)};
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges.erase(std::remove(edges.begin(), edges.end(), values.front()), edges.end());
  return edges;
}

std::string bin_label(const std::string& prefix, int value, const std::vector<int>& edges) {
  if (edges.empty()) return prefix + "all";
  int lo = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (value < edges[i]) {
      return prefix + std::to_string(lo) + "-" + std::to_string(edges[i] - 1);
    }
    lo = edges[i];
  }
  return prefix + std::to_string(lo) + "+";
}

const std::vector<std::string>& score_columns() {
  static const std::vector<std::string> columns{
      "doc_id",   "formulation", "template_id", "flavor",   "representation",
      "n_demos",  "model",       "era",         "word_bin", "event_bin",
      "n_events", "precision",   "recall",      "f1"};
  return columns;
}

StageSummary score_timeset(const RunConfig& config) {
  StageSummary summary;
  const CorpusIndex corpus(config.corpus_dir);
  const auto templates = TemplateSet::load(config.templates_dir);

  std::vector<int> word_edges = config.word_bin_edges;
  std::vector<int> event_edges = config.event_bin_edges;
  if (word_edges.empty()) {
    std::vector<int> words;
    for (const auto& doc : corpus.docs) words.push_back(doc.word_count);
    word_edges = quartile_edges(words);
  }
  if (event_edges.empty()) {
    std::vector<int> events;
    for (const auto& doc : corpus.docs) {
      events.push_back(static_cast<int>(doc.graph.event_count()));
    }
    event_edges = quartile_edges(events);
  }

  std::string jsonl;
  std::string csv;
  {
    std::string header;
    for (const auto& column : score_columns()) {
      if (!header.empty()) header += ",";
      header += column;
    }
    csv = header + "\n";
  }
  int row_count = 0;

  const TemporalAwarenessOptions ta_opts{config.include_coex};

  for (auto formulation : config.formulations) {
    const auto instances_path =
        config.output_dir / "instances" / (std::string(to_string(formulation)) + ".jsonl");
    const auto predictions_path =
        config.output_dir / "predictions" / (std::string(to_string(formulation)) + ".jsonl");
    if (!std::filesystem::exists(instances_path) ||
        !std::filesystem::exists(predictions_path)) {
      continue;
    }
    std::vector<PromptInstance> instances;
    for (const auto& line : read_jsonl(instances_path)) {
      instances.push_back(prompt_instance_from_json(line));
    }
    std::map<std::string, PredictionRecord> records;
    for (const auto& line : read_jsonl(predictions_path)) {
      auto record = prediction_record_from_json(line);
      records[record.instance_id] = std::move(record);
    }

    // Group per (doc, template, n_demos); representation and flavor are fixed
    // per instance already.
    using GroupKey = std::tuple<std::string, std::string, int>;
    std::map<GroupKey, std::vector<const PromptInstance*>> groups;
    for (const auto& instance : instances) {
      groups[{instance.doc_id, instance.template_id, instance.n_demos}].push_back(&instance);
    }

    for (const auto& [key, group_instances] : groups) {
      const auto& [doc_id, template_id, n_demos] = key;
      const auto* doc = corpus.by_id.at(doc_id);
      std::vector<std::pair<const PromptInstance*, const PredictionRecord*>> joined;
      for (const auto* instance : group_instances) {
        auto it = records.find(instance->instance_id);
        if (it != records.end()) joined.emplace_back(instance, &it->second);
      }
      if (joined.empty()) continue;
      const auto predicted = assemble_graph(*doc, joined, config.tie_seed);
      const auto prf = temporal_awareness(doc->graph, predicted, ta_opts);

      ScoreRow row;
      row.doc_id = doc_id;
      row.formulation = to_string(formulation);
      row.template_id = template_id;
      row.flavor = to_string(group_instances.front()->flavor);
      row.representation = to_string(group_instances.front()->representation);
      row.n_demos = n_demos;
      row.model = config.model;
      row.era = to_string(doc->era);
      row.word_bin = bin_label("w", doc->word_count, word_edges);
      row.event_bin = bin_label("e", static_cast<int>(doc->graph.event_count()), event_edges);
      row.n_events = static_cast<int>(doc->graph.event_count());
      row.precision = prf.precision;
      row.recall = prf.recall;
      row.f1 = prf.f1;

      nlohmann::json obj;
      obj["doc_id"] = row.doc_id;
      obj["formulation"] = row.formulation;
      obj["template_id"] = row.template_id;
      obj["flavor"] = row.flavor;
      obj["representation"] = row.representation;
      obj["n_demos"] = row.n_demos;
      obj["model"] = row.model;
      obj["era"] = row.era;
      obj["word_bin"] = row.word_bin;
      obj["event_bin"] = row.event_bin;
      obj["n_events"] = row.n_events;
      obj["precision"] = row.precision;
      obj["recall"] = row.recall;
      obj["f1"] = row.f1;
      jsonl += obj.dump();
      jsonl += "\n";

      csv += csv_cell(row.doc_id) + "," + row.formulation + "," + row.template_id + "," +
             row.flavor + "," + row.representation + "," + std::to_string(row.n_demos) +
             "," + csv_cell(row.model) + "," + row.era + "," + row.word_bin + "," +
             row.event_bin + "," + std::to_string(row.n_events) + "," +
             fmt6(row.precision) + "," + fmt6(row.recall) + "," + fmt6(row.f1) + "\n";
      ++row_count;
    }
  }

  write_file(config.output_dir / "scores.jsonl", jsonl);
  write_file(config.output_dir / "scores.csv", csv);
  summary.counts["score_rows"] = row_count;
  return summary;
}

StageSummary score_benchmark_stage(const RunConfig& config) {
  StageSummary summary;
  const auto templates = TemplateSet::load(config.templates_dir);

  std::map<std::string, std::string> completions;
  for (const auto& line :
       read_jsonl(config.output_dir / "predictions" / "benchmark.jsonl")) {
    const auto row = nlohmann::json::parse(line);
    completions[row.at("key").get<std::string>()] = row.at("completion").get<std::string>();
  }

  struct Group {
    std::vector<BenchmarkInstance> instances;
    std::vector<BenchmarkPrediction> predictions;
  };
  std::map<std::pair<std::string, int>, Group> groups;
  std::string dataset_name;

  for (const auto& line : read_jsonl(config.output_dir / "instances" / "benchmark.jsonl")) {
    const auto row = nlohmann::json::parse(line);
    const auto key = row.at("key").get<std::string>();
    auto it = completions.find(key);
    if (it == completions.end()) continue;
    auto instance = benchmark_instance_from_json(row.at("instance").dump());
    dataset_name = to_string(instance.dataset);
    const auto& tmpl =
        templates.get(instance.formulation, row.at("template_id").get<std::string>());
    auto& group = groups[{row.at("template_id").get<std::string>(),
                          row.at("n_demos").get<int>()}];
    group.predictions.push_back(parse_benchmark_completion(instance, tmpl, it->second));
    group.instances.push_back(std::move(instance));
  }

  const std::map<std::string, std::string> metric_names{
      {"temporal_nli", "accuracy"},
      {"matres", "micro_f1"},
      {"tddiscourse", "micro_f1"},
      {"torque", "exact_match"}};

  std::string csv = "dataset,template_id,n_demos,metric,value\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [key, group] : groups) {
    const double value = score_benchmark(group.instances, group.predictions);
    csv += dataset_name + "," + key.first + "," + std::to_string(key.second) + "," +
           metric_names.at(dataset_name) + "," + fmt6(value) + "\n";
    rows.push_back({{"dataset", dataset_name},
                    {"template_id", key.first},
                    {"n_demos", key.second},
                    {"metric", metric_names.at(dataset_name)},
                    {"value", value}});
  }
  write_file(config.output_dir / "benchmark_scores.csv", csv);
  write_file(config.output_dir / "benchmark_scores.json", rows.dump(2) + "\n");
  summary.counts["benchmark_groups"] = static_cast<int>(groups.size());
  return summary;
}

}  // namespace

StageSummary stage_score(const RunConfig& config) {
  auto summary =
      benchmark_mode(config) ? score_benchmark_stage(config) : score_timeset(config);
  update_manifest(config, "score", summary);
  return summary;
}

// --- aggregate / report ----------------------------------------------------------

std::vector<ScoreRow> read_score_rows(const std::filesystem::path& scores_jsonl) {
  std::vector<ScoreRow> rows;
  for (const auto& line : read_jsonl(scores_jsonl)) {
    const auto obj = nlohmann::json::parse(line);
    ScoreRow row;
    row.doc_id = obj.at("doc_id").get<std::string>();
    row.formulation = obj.at("formulation").get<std::string>();
    row.template_id = obj.at("template_id").get<std::string>();
    row.flavor = obj.at("flavor").get<std::string>();
    row.representation = obj.at("representation").get<std::string>();
    row.n_demos = obj.at("n_demos").get<int>();
    row.model = obj.at("model").get<std::string>();
    row.era = obj.at("era").get<std::string>();
    row.word_bin = obj.at("word_bin").get<std::string>();
    row.event_bin = obj.at("event_bin").get<std::string>();
    row.n_events = obj.at("n_events").get<int>();
    row.precision = obj.at("precision").get<double>();
    row.recall = obj.at("recall").get<double>();
    row.f1 = obj.at("f1").get<double>();
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string group_value(const ScoreRow& row, const std::string& group_by) {
  if (group_by == "overall") return "all";
  if (group_by == "formulation") return row.formulation;
  if (group_by == "model") return row.model;
  if (group_by == "template") return row.template_id;
  if (group_by == "n_demos") return std::to_string(row.n_demos);
  if (group_by == "representation") return row.representation;
  if (group_by == "flavor") return row.flavor;
  if (group_by == "era") return row.era;
  if (group_by == "word_bin") return row.word_bin;
  if (group_by == "event_bin") return row.event_bin;
  fail(ErrorKind::ConfigError, "unknown group_by key: " + group_by);
}

}  // namespace

std::vector<GroupSummary> aggregate_rows(const std::vector<ScoreRow>& rows,
                                         const std::string& group_by) {
  if (rows.empty()) fail(ErrorKind::FormatError, "no score rows to aggregate");

  // One data point per (group, template, n_demos): the corpus macro-average.
  struct Accumulator {
    double sum = 0.0;
    int n = 0;
  };
  std::map<std::tuple<std::string, std::string, std::string, int>, Accumulator> points;
  for (const auto& row : rows) {
    auto& acc = points[{group_value(row, group_by), row.formulation + "/" + row.template_id,
                        row.template_id, row.n_demos}];
    acc.sum += row.f1;
    acc.n += 1;
  }

  std::map<std::string, std::vector<double>> by_group;
  for (const auto& [key, acc] : points) {
    by_group[std::get<0>(key)].push_back(acc.sum / acc.n);
  }

  std::vector<GroupSummary> out;
  for (const auto& [group, values] : by_group) {
    GroupSummary summary;
    summary.group = group;
    summary.stats = aggregate_stats(values);
    const double lo_fence = summary.stats.q1 - 1.5 * summary.stats.iqr;
    const double hi_fence = summary.stats.q3 + 1.5 * summary.stats.iqr;
    summary.whisker_lo = summary.stats.q3;
    summary.whisker_hi = summary.stats.q1;
    bool any = false;
    for (double v : values) {
      if (v < lo_fence || v > hi_fence) continue;
      if (!any) {
        summary.whisker_lo = summary.whisker_hi = v;
        any = true;
      } else {
        summary.whisker_lo = std::min(summary.whisker_lo, v);
        summary.whisker_hi = std::max(summary.whisker_hi, v);
      }
    }
    out.push_back(std::move(summary));
  }
  return out;
}

namespace {

std::string aggregate_csv(const std::vector<GroupSummary>& groups) {
  std::string csv = "group,count,median,q1,q3,iqr,whisker_lo,whisker_hi\n";
  for (const auto& g : groups) {
    csv += csv_cell(g.group) + "," + std::to_string(g.stats.count) + "," +
           fmt6(g.stats.median) + "," + fmt6(g.stats.q1) + "," + fmt6(g.stats.q3) + "," +
           fmt6(g.stats.iqr) + "," + fmt6(g.whisker_lo) + "," + fmt6(g.whisker_hi) + "\n";
  }
  return csv;
}

nlohmann::json aggregate_json(const std::vector<GroupSummary>& groups) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& g : groups) {
    rows.push_back({{"group", g.group},
                    {"count", g.stats.count},
                    {"median", g.stats.median},
                    {"q1", g.stats.q1},
                    {"q3", g.stats.q3},
                    {"iqr", g.stats.iqr},
                    {"whisker_lo", g.whisker_lo},
                    {"whisker_hi", g.whisker_hi}});
  }
  return rows;
}

}  // namespace

StageSummary stage_aggregate(const RunConfig& config, const std::string& group_by) {
  StageSummary summary;
  const auto rows = read_score_rows(config.output_dir / "scores.jsonl");
  const auto groups = aggregate_rows(rows, group_by);
  write_file(config.output_dir / ("aggregate_" + group_by + ".csv"), aggregate_csv(groups));
  write_file(config.output_dir / ("aggregate_" + group_by + ".json"),
             aggregate_json(groups).dump(2) + "\n");
  summary.counts["groups"] = static_cast<int>(groups.size());
  update_manifest(config, "aggregate", summary);
  return summary;
}

StageSummary stage_report(const RunConfig& config, const std::string& group_by) {
  StageSummary summary;
  const auto rows = read_score_rows(config.output_dir / "scores.jsonl");
  const auto groups = aggregate_rows(rows, group_by);

  std::vector<BoxplotBox> boxes;
  for (const auto& g : groups) {
    boxes.push_back({g.group, g.stats.q1, g.stats.median, g.stats.q3, g.whisker_lo,
                     g.whisker_hi, g.stats.count});
  }
  write_file(config.output_dir / "report" / (group_by + ".svg"),
             render_boxplot_svg("pairwise F1 by " + group_by, boxes));
  write_file(config.output_dir / "report" / (group_by + ".csv"), aggregate_csv(groups));
  summary.counts["groups"] = static_cast<int>(groups.size());
  update_manifest(config, "report", summary);
  return summary;
}

// --- IAA -----------------------------------------------------------------------

namespace {

TimelineGraph canonical_graph(const DocumentRecord& doc,
                              const std::map<std::string, std::string>& idmap) {
  auto canonical = [&](const std::string& id) {
    auto it = idmap.find(id);
    if (it != idmap.end()) return it->second;
    return doc.graph.event(id).mention;  // default: same word, same event
  };
  TimelineGraph out;
  int index = 1;
  for (const auto& id : doc.graph.event_ids()) {
    const auto name = canonical(id);
    if (!out.has_event(name)) {
      Event ev;
      ev.id = name;
      ev.mention = name;
      ev.index = index++;
      ev.span = {static_cast<std::size_t>(index * 2), static_cast<std::size_t>(index * 2 + 1)};
      out.add_event(ev);
    }
  }
  for (const auto& [a, b] : doc.graph.edges()) {
    const auto ca = canonical(a);
    const auto cb = canonical(b);
    if (ca != cb) out.add_edge(ca, cb);
  }
  for (const auto& [a, b] : doc.graph.coex_links()) {
    const auto ca = canonical(a);
    const auto cb = canonical(b);
    if (ca != cb) out.add_coex(ca, cb);
  }
  return out;
}

ClosurePairSet filter_pairs(const ClosurePairSet& pairs, const std::set<std::string>& keep) {
  ClosurePairSet out;
  for (const auto& [a, b] : pairs.before_pairs) {
    if (keep.count(a) && keep.count(b)) out.before_pairs.emplace(a, b);
  }
  for (const auto& [a, b] : pairs.coex_pairs) {
    if (keep.count(a) && keep.count(b)) out.coex_pairs.emplace(a, b);
  }
  return out;
}

}  // namespace

IaaReport compute_iaa(const std::filesystem::path& corpus_a,
                      const std::filesystem::path& corpus_b,
                      const std::filesystem::path& coref_path) {
  const auto docs_a = load_corpus(corpus_a);
  const auto docs_b = load_corpus(corpus_b);
  std::map<std::string, const DocumentRecord*> b_by_id;
  for (const auto& doc : docs_b) b_by_id[doc.id] = &doc;

  nlohmann::json coref;
  if (!coref_path.empty() && std::filesystem::exists(coref_path)) {
    coref = nlohmann::json::parse(read_file(coref_path, ErrorKind::ConfigError));
  }

  IaaReport report;
  std::set<std::string> pooled_a, pooled_b;
  double sum_all_p = 0, sum_all_r = 0, sum_all_f = 0;
  double sum_common_p = 0, sum_common_r = 0, sum_common_f = 0;

  for (const auto& doc_a : docs_a) {
    const auto it = b_by_id.find(doc_a.id);
    if (it == b_by_id.end()) continue;
    const auto& doc_b = *it->second;

    std::map<std::string, std::string> map_a, map_b;
    if (coref.contains(doc_a.id)) {
      const auto& entry = coref[doc_a.id];
      if (entry.contains("a")) {
        map_a = entry["a"].get<std::map<std::string, std::string>>();
      }
      if (entry.contains("b")) {
        map_b = entry["b"].get<std::map<std::string, std::string>>();
      }
    }

    const auto graph_a = canonical_graph(doc_a, map_a);
    const auto graph_b = canonical_graph(doc_b, map_b);

    std::set<std::string> events_a, events_b;
    for (const auto& [id, ev] : graph_a.events()) {
      events_a.insert(id);
      pooled_a.insert(doc_a.id + "/" + id);
    }
    for (const auto& [id, ev] : graph_b.events()) {
      events_b.insert(id);
      pooled_b.insert(doc_a.id + "/" + id);
    }

    const auto closure_a = transitive_closure(expand_coex(graph_a));
    const auto closure_b = transitive_closure(expand_coex(graph_b));

    const auto all = temporal_awareness_pairs(closure_a, closure_b);
    sum_all_p += all.precision;
    sum_all_r += all.recall;
    sum_all_f += all.f1;

    std::set<std::string> common;
    for (const auto& id : events_a) {
      if (events_b.count(id)) common.insert(id);
    }
    const auto common_prf = temporal_awareness_pairs(filter_pairs(closure_a, common),
                                                     filter_pairs(closure_b, common));
    sum_common_p += common_prf.precision;
    sum_common_r += common_prf.recall;
    sum_common_f += common_prf.f1;
    ++report.documents;
  }

  if (report.documents == 0) {
    fail(ErrorKind::MissingPair, "the two corpora share no document ids");
  }
  report.dice = dice_span_f1(pooled_a, pooled_b);
  const auto n = static_cast<double>(report.documents);
  report.ta_all = {sum_all_p / n, sum_all_r / n, sum_all_f / n};
  report.ta_common = {sum_common_p / n, sum_common_r / n, sum_common_f / n};
  return report;
}

// --- manifest --------------------------------------------------------------------

void update_manifest(const RunConfig& config, const std::string& stage,
                     const StageSummary& summary) {
  const auto manifest_path = config.output_dir / "manifest.json";
  nlohmann::json manifest;
  if (std::filesystem::exists(manifest_path)) {
    manifest = nlohmann::json::parse(read_file(manifest_path, ErrorKind::ConfigError),
                                     nullptr, false);
    if (manifest.is_discarded()) manifest = nlohmann::json::object();
  }
  manifest["version"] = kVersion;
  manifest["config"] = nlohmann::json::parse(run_config_to_json(config));

  // Content hashes over every stage output currently on disk.
  std::vector<std::filesystem::path> files;
  if (std::filesystem::exists(config.output_dir)) {
    for (const auto& entry : std::filesystem::recursive_directory_iterator(config.output_dir)) {
      if (!entry.is_regular_file()) continue;
      if (entry.path().filename() == "manifest.json") continue;
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  nlohmann::json outputs;
  for (const auto& file : files) {
    const auto rel = std::filesystem::relative(file, config.output_dir).generic_string();
    outputs[rel] = to_hex(fnv1a64(read_file(file, ErrorKind::ConfigError)));
  }

  nlohmann::json stage_entry;
  stage_entry["counts"] = summary.counts;
  manifest["stages"][stage] = stage_entry;
  manifest["outputs"] = outputs;
  write_file(manifest_path, manifest.dump(2) + "\n");
}

}  // namespace timeset
