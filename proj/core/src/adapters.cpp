#include "timeset/adapters.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "timeset/errors.hpp"
#include "timeset/interpret.hpp"
#include "timeset/metrics.hpp"
#include "timeset/rng.hpp"

namespace timeset {

const char* to_string(BenchmarkDataset dataset) {
  switch (dataset) {
    case BenchmarkDataset::TemporalNli: return "temporal_nli";
    case BenchmarkDataset::Matres: return "matres";
    case BenchmarkDataset::TdDiscourse: return "tddiscourse";
    case BenchmarkDataset::Torque: return "torque";
  }
  return "matres";
}

BenchmarkDataset benchmark_dataset_from_string(const std::string& name) {
  if (name == "temporal_nli") return BenchmarkDataset::TemporalNli;
  if (name == "matres") return BenchmarkDataset::Matres;
  if (name == "tddiscourse") return BenchmarkDataset::TdDiscourse;
  if (name == "torque") return BenchmarkDataset::Torque;
  fail(ErrorKind::ConfigError, "not a benchmark dataset: " + name);
}

namespace {

std::string read_file_or(const std::filesystem::path& path, ErrorKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kind, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_tab(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string trim_copy(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// --- Minimal TimeML reader -------------------------------------------------

struct TmlEvent {
  std::string eid;
  std::string surface;
  std::size_t begin = 0;  // byte offsets into the detagged text
  std::size_t end = 0;
};

struct TmlDocument {
  std::string text;
  std::map<std::string, TmlEvent> events;          // by eid
  std::map<std::string, std::string> eiid_to_eid;  // MAKEINSTANCE mapping
};

std::string decode_entities(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
      if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
      if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
      if (s.compare(i, 6, "&quot;") == 0) { out += '"'; i += 6; continue; }
      if (s.compare(i, 6, "&apos;") == 0) { out += '\''; i += 6; continue; }
    }
    out += s[i++];
  }
  return out;
}

std::string attribute(const std::string& tag, const std::string& name) {
  const auto key = name + "=\"";
  const auto pos = tag.find(key);
  if (pos == std::string::npos) return {};
  const auto end = tag.find('"', pos + key.size());
  if (end == std::string::npos) return {};
  return tag.substr(pos + key.size(), end - pos - key.size());
}

TmlDocument parse_tml(const std::string& raw, const std::string& where) {
  TmlDocument doc;

  for (std::size_t pos = 0;;) {
    pos = raw.find("<MAKEINSTANCE", pos);
    if (pos == std::string::npos) break;
    const auto end = raw.find('>', pos);
    if (end == std::string::npos) break;
    const auto tag = raw.substr(pos, end - pos);
    const auto eiid = attribute(tag, "eiid");
    const auto eid = attribute(tag, "eventID");
    if (!eiid.empty() && !eid.empty()) doc.eiid_to_eid[eiid] = eid;
    pos = end + 1;
  }

  auto text_start = raw.find("<TEXT>");
  auto text_end = raw.find("</TEXT>");
  std::string body;
  if (text_start != std::string::npos && text_end != std::string::npos) {
    body = raw.substr(text_start + 6, text_end - text_start - 6);
  } else {
    body = raw;  // plain or pre-stripped source
  }

  std::string current_eid;
  std::size_t event_begin = 0;
  for (std::size_t i = 0; i < body.size();) {
    if (body[i] == '<') {
      const auto close = body.find('>', i);
      if (close == std::string::npos) break;
      const auto tag = body.substr(i + 1, close - i - 1);
      if (tag.rfind("EVENT", 0) == 0) {
        current_eid = attribute(tag, "eid");
        event_begin = doc.text.size();
      } else if (tag == "/EVENT") {
        if (!current_eid.empty()) {
          TmlEvent ev;
          ev.eid = current_eid;
          ev.begin = event_begin;
          ev.end = doc.text.size();
          ev.surface = doc.text.substr(ev.begin, ev.end - ev.begin);
          doc.events[ev.eid] = ev;
          current_eid.clear();
        }
      }
      i = close + 1;
    } else {
      std::size_t next = body.find('<', i);
      if (next == std::string::npos) next = body.size();
      doc.text += decode_entities(body.substr(i, next - i));
      i = next;
    }
  }
  if (doc.events.empty()) {
    fail(ErrorKind::MissingSource, where + ": no EVENT tags found");
  }
  return doc;
}

// Sentence byte ranges; boundaries after [.?!]+ whitespace runs.
std::vector<std::pair<std::size_t, std::size_t>> sentence_ranges(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      std::size_t j = i + 1;
      while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?' ||
                                 text[j] == '"' || text[j] == '\'')) {
        ++j;
      }
      if (j >= text.size() || std::isspace(static_cast<unsigned char>(text[j]))) {
        out.emplace_back(start, j);
        while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        start = j;
        i = j == 0 ? 0 : j - 1;
      }
    }
  }
  if (start < text.size()) out.emplace_back(start, text.size());
  if (out.empty()) out.emplace_back(0, text.size());
  return out;
}

std::size_t sentence_of(const std::vector<std::pair<std::size_t, std::size_t>>& sents,
                        std::size_t offset) {
  for (std::size_t i = 0; i < sents.size(); ++i) {
    if (offset >= sents[i].first && offset < sents[i].second) return i;
  }
  return sents.size() - 1;
}

// Sentence window covering both events, with exactly the two queried events
// marked [e1]/[e2] by textual order.
struct PairContext {
  std::string context;
  std::string arg1;  // marked surface of the row's first event
  std::string arg2;
};

PairContext pair_context_from_tml(const TmlDocument& doc, const TmlEvent& first,
                                  const TmlEvent& second) {
  const auto sents = sentence_ranges(doc.text);
  const auto s1 = sentence_of(sents, first.begin);
  const auto s2 = sentence_of(sents, second.begin);
  const auto lo = std::min(s1, s2);
  const auto hi = std::max(s1, s2);
  const std::size_t window_begin = sents[lo].first;
  const std::size_t window_end = sents[hi].second;

  const TmlEvent* textual_first = first.begin <= second.begin ? &first : &second;
  const TmlEvent* textual_second = textual_first == &first ? &second : &first;

  auto wrap = [](const TmlEvent& ev, int display) {
    return "[e" + std::to_string(display) + "]" + ev.surface + "[/e" +
           std::to_string(display) + "]";
  };

  PairContext out;
  out.context = doc.text.substr(window_begin, textual_first->begin - window_begin);
  out.context += wrap(*textual_first, 1);
  out.context += doc.text.substr(textual_first->end,
                                 textual_second->begin - textual_first->end);
  out.context += wrap(*textual_second, 2);
  out.context += doc.text.substr(textual_second->end, window_end - textual_second->end);

  const int first_display = textual_first == &first ? 1 : 2;
  out.arg1 = wrap(first, first_display);
  out.arg2 = wrap(second, first_display == 1 ? 2 : 1);
  return out;
}

class TmlCache {
 public:
  explicit TmlCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const TmlDocument& get(const std::string& doc_id) {
    auto it = cache_.find(doc_id);
    if (it != cache_.end()) return it->second;
    const auto path = dir_ / (doc_id + ".tml");
    if (!std::filesystem::exists(path)) {
      fail(ErrorKind::MissingSource, "no source document " + path.string());
    }
    auto parsed = parse_tml(read_file_or(path, ErrorKind::MissingSource), doc_id);
    return cache_.emplace(doc_id, std::move(parsed)).first->second;
  }

 private:
  std::filesystem::path dir_;
  std::map<std::string, TmlDocument> cache_;
};

std::vector<std::string> read_lines(const std::filesystem::path& path, ErrorKind kind) {
  std::vector<std::string> lines;
  std::string content = read_file_or(path, kind);
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim_copy(line).empty()) lines.push_back(line);
  }
  return lines;
}

// Seeded document-level carve-out: ceil(20%) of sorted ids become dev.
std::set<std::string> dev_carveout(const std::set<std::string>& doc_ids,
                                   std::uint64_t seed) {
  std::vector<std::string> sorted(doc_ids.begin(), doc_ids.end());
  const std::size_t n_dev = (sorted.size() + 4) / 5;
  Rng rng(fnv1a64_mix(seed, "dev-carveout"));
  std::set<std::string> dev;
  for (const auto idx : rng.sample_indices(sorted.size(), n_dev)) {
    dev.insert(sorted[idx]);
  }
  return dev;
}

}  // namespace

std::vector<BenchmarkInstance> load_matres(const MatresPaths& paths, std::uint64_t seed) {
  static const std::set<std::string> kLabels{"BEFORE", "AFTER", "EQUAL", "VAGUE"};
  TmlCache sources(paths.source_dir);

  struct Row {
    std::string doc_id, eiid1, eiid2, label, pool;
  };
  std::vector<Row> rows;
  std::set<std::string> train_pool_docs;

  for (const auto* file : {"aquaint.txt", "timebank.txt", "platinum.txt"}) {
    const auto path = paths.annotation_dir / file;
    if (!std::filesystem::exists(path)) {
      fail(ErrorKind::MissingSource, "missing annotation file " + path.string());
    }
    for (const auto& line : read_lines(path, ErrorKind::MissingSource)) {
      const auto fields = split_tab(line);
      if (fields.size() != 6) {
        fail(ErrorKind::FormatError, std::string(file) + ": expected 6 fields: " + line);
      }
      auto normalize_eiid = [](std::string id) {
        if (id.rfind("ei", 0) != 0) id = "ei" + id;
        return id;
      };
      Row row{fields[0], normalize_eiid(fields[3]), normalize_eiid(fields[4]),
              trim_copy(fields[5]), file};
      if (!kLabels.count(row.label)) {
        fail(ErrorKind::FormatError, std::string(file) + ": unknown label " + row.label);
      }
      if (row.pool != "platinum.txt") train_pool_docs.insert(row.doc_id);
      rows.push_back(std::move(row));
    }
  }

  const auto dev_docs = dev_carveout(train_pool_docs, seed);
  std::vector<BenchmarkInstance> out;
  for (const auto& row : rows) {
    const auto& tml = sources.get(row.doc_id);
    auto resolve = [&](const std::string& eiid) -> const TmlEvent& {
      auto eid_it = tml.eiid_to_eid.find(eiid);
      const std::string eid =
          eid_it != tml.eiid_to_eid.end() ? eid_it->second : eiid;
      auto ev_it = tml.events.find(eid);
      if (ev_it == tml.events.end()) {
        fail(ErrorKind::MissingSource, row.doc_id + ": no event for " + eiid);
      }
      return ev_it->second;
    };
    const auto& e1 = resolve(row.eiid1);
    const auto& e2 = resolve(row.eiid2);
    const auto ctx = pair_context_from_tml(tml, e1, e2);

    BenchmarkInstance instance;
    instance.dataset = BenchmarkDataset::Matres;
    instance.formulation = Formulation::Pairwise;
    instance.id = row.doc_id + ":" + row.eiid1 + ":" + row.eiid2;
    instance.context = ctx.context;
    instance.arg1 = ctx.arg1;
    instance.arg2 = ctx.arg2;
    instance.label_set = {"AFTER", "BEFORE", "EQUAL", "VAGUE"};
    instance.gold_label = row.label;
    if (row.pool == "platinum.txt") {
      instance.split = "test";
    } else {
      instance.split = dev_docs.count(row.doc_id) ? "dev" : "train";
    }
    out.push_back(std::move(instance));
  }
  return out;
}

std::vector<BenchmarkInstance> load_tddiscourse(const TdDiscoursePaths& paths) {
  static const std::map<std::string, std::string> kCodes{
      {"a", "AFTER"},        {"b", "BEFORE"},      {"i", "INCLUDE"},
      {"ii", "INCLUDED"},    {"s", "SIMULTANEOUS"}, {"AFTER", "AFTER"},
      {"BEFORE", "BEFORE"},  {"INCLUDE", "INCLUDE"}, {"INCLUDED", "INCLUDED"},
      {"SIMULTANEOUS", "SIMULTANEOUS"}};
  TmlCache sources(paths.source_dir);

  std::vector<BenchmarkInstance> out;
  const std::vector<std::pair<std::string, std::string>> files{
      {"TDDManTrain.tsv", "train"}, {"TDDManDev.tsv", "dev"}, {"TDDManTest.tsv", "test"}};
  for (const auto& [file, split] : files) {
    const auto path = paths.annotation_dir / file;
    if (!std::filesystem::exists(path)) {
      fail(ErrorKind::MissingSource, "missing annotation file " + path.string());
    }
    for (const auto& line : read_lines(path, ErrorKind::MissingSource)) {
      const auto fields = split_tab(line);
      if (fields.size() != 4) {
        fail(ErrorKind::FormatError, file + ": expected 4 fields: " + line);
      }
      const auto code = kCodes.find(trim_copy(fields[3]));
      if (code == kCodes.end()) {
        fail(ErrorKind::FormatError, file + ": unknown label " + fields[3]);
      }
      const auto& tml = sources.get(fields[0]);
      auto find_event = [&](const std::string& eid) -> const TmlEvent& {
        auto it = tml.events.find(eid);
        if (it == tml.events.end()) {
          fail(ErrorKind::MissingSource, fields[0] + ": no event " + eid);
        }
        return it->second;
      };
      const auto& e1 = find_event(fields[1]);
      const auto& e2 = find_event(fields[2]);
      const auto ctx = pair_context_from_tml(tml, e1, e2);

      BenchmarkInstance instance;
      instance.dataset = BenchmarkDataset::TdDiscourse;
      instance.formulation = Formulation::Pairwise;
      instance.id = fields[0] + ":" + fields[1] + ":" + fields[2];
      instance.split = split;
      instance.context = ctx.context;
      instance.arg1 = ctx.arg1;
      instance.arg2 = ctx.arg2;
      instance.label_set = {"BEFORE", "AFTER", "SIMULTANEOUS", "INCLUDE", "INCLUDED"};
      instance.gold_label = code->second;
      out.push_back(std::move(instance));
    }
  }
  return out;
}

std::vector<BenchmarkInstance> load_temporal_nli(const std::filesystem::path& dir) {
  std::vector<BenchmarkInstance> out;
  std::set<std::pair<std::string, std::string>> seen;
  bool any_file = false;
  for (const auto* split : {"train", "dev", "test"}) {
    const auto path = dir / (std::string(split) + ".jsonl");
    if (!std::filesystem::exists(path)) continue;
    any_file = true;
    int line_no = 0;
    for (const auto& line : read_lines(path, ErrorKind::MissingSource)) {
      ++line_no;
      const auto row = nlohmann::json::parse(line, nullptr, false);
      if (row.is_discarded() || !row.contains("context") || !row.contains("hypothesis") ||
          !row.contains("label")) {
        fail(ErrorKind::FormatError,
             path.string() + " line " + std::to_string(line_no) + ": malformed row");
      }
      const auto context = row["context"].get<std::string>();
      const auto hypothesis = row["hypothesis"].get<std::string>();
      if (!seen.emplace(context, hypothesis).second) continue;

      const auto raw_label = row["label"].get<std::string>();
      std::string label;
      if (raw_label == "entailed" || raw_label == "entailment") {
        label = "ENTAILMENT";
      } else if (raw_label == "not-entailed" || raw_label == "not entailment" ||
                 raw_label == "not_entailment") {
        label = "NOT_ENTAILMENT";
      } else {
        fail(ErrorKind::FormatError, path.string() + ": unknown label " + raw_label);
      }

      BenchmarkInstance instance;
      instance.dataset = BenchmarkDataset::TemporalNli;
      instance.formulation = Formulation::Nli;
      instance.id = std::string(split) + ":" + std::to_string(out.size());
      instance.split = split;
      instance.context = context;
      instance.hypothesis = hypothesis;
      instance.gold_label = label;
      instance.label_set = {"ENTAILMENT", "NOT_ENTAILMENT"};
      out.push_back(std::move(instance));
    }
  }
  if (!any_file) {
    fail(ErrorKind::MissingSource, "no {train,dev,test}.jsonl under " + dir.string());
  }
  return out;
}

namespace {

std::vector<std::set<std::string>> torque_answer_sets(const nlohmann::json& qa,
                                                      const std::string& where) {
  std::vector<std::set<std::string>> sets;
  auto spans_of = [](const nlohmann::json& answer) {
    std::set<std::string> spans;
    for (const auto& span : answer.at("spans")) spans.insert(span.get<std::string>());
    return spans;
  };
  if (qa.contains("answers") && qa["answers"].is_array()) {
    for (const auto& answer : qa["answers"]) sets.push_back(spans_of(answer));
  } else if (qa.contains("answer")) {
    sets.push_back(spans_of(qa["answer"]));
  }
  if (sets.empty()) {
    fail(ErrorKind::FormatError, where + ": question without annotator answers");
  }
  return sets;
}

}  // namespace

std::vector<BenchmarkInstance> load_torque(const TorquePaths& paths, std::uint64_t seed) {
  std::vector<BenchmarkInstance> out;

  auto load_file = [&](const std::filesystem::path& path, bool is_train) {
    nlohmann::json data;
    try {
      data = nlohmann::json::parse(read_file_or(path, ErrorKind::MissingSource));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::FormatError, path.string() + ": " + e.what());
    }
    if (!data.is_array()) {
      fail(ErrorKind::FormatError, path.string() + ": expected a JSON array of passages");
    }

    // 80/20 passage-level carve-out of the train file.
    std::set<std::string> dev_passages;
    if (is_train) {
      std::set<std::string> ids;
      for (std::size_t i = 0; i < data.size(); ++i) ids.insert(std::to_string(i));
      dev_passages = dev_carveout(ids, seed);
    }

    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& passage = data[i];
      const auto where = path.string() + " passage " + std::to_string(i);
      if (!passage.contains("passage") || !passage.contains("question_answer_pairs")) {
        fail(ErrorKind::FormatError, where + ": malformed passage");
      }
      std::string split = "test";
      if (is_train) split = dev_passages.count(std::to_string(i)) ? "dev" : "train";
      int q = 0;
      for (const auto& qa : passage["question_answer_pairs"]) {
        BenchmarkInstance instance;
        instance.dataset = BenchmarkDataset::Torque;
        instance.formulation = Formulation::Mrc;
        instance.id = (is_train ? "train:" : "dev:") + std::to_string(i) + ":" +
                      std::to_string(q++);
        instance.split = split;
        instance.context = passage["passage"].get<std::string>();
        instance.question = qa.at("question").get<std::string>();
        instance.gold_answer_sets = torque_answer_sets(qa, where);
        out.push_back(std::move(instance));
      }
    }
  };

  load_file(paths.train_file, true);
  load_file(paths.dev_file, false);
  return out;
}

std::string to_interchange_json(const BenchmarkInstance& instance) {
  nlohmann::json out;
  out["dataset"] = to_string(instance.dataset);
  out["id"] = instance.id;
  out["split"] = instance.split;
  out["context"] = instance.context;
  nlohmann::json query;
  switch (instance.formulation) {
    case Formulation::Nli:
      query["hypothesis"] = instance.hypothesis;
      break;
    case Formulation::Pairwise:
      query["arg1"] = instance.arg1;
      query["arg2"] = instance.arg2;
      query["label_set"] = instance.label_set;
      break;
    default:
      query["question"] = instance.question;
      break;
  }
  out["query"] = query;
  nlohmann::json gold;
  if (instance.dataset == BenchmarkDataset::Torque) {
    gold = nlohmann::json::array();
    for (const auto& set : instance.gold_answer_sets) gold.push_back(set);
  } else {
    gold = instance.gold_label;
  }
  out["gold"] = gold;
  return out.dump();
}

BenchmarkInstance benchmark_instance_from_json(const std::string& line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::FormatError, std::string("bad interchange json: ") + e.what());
  }
  BenchmarkInstance instance;
  instance.dataset = benchmark_dataset_from_string(obj.at("dataset").get<std::string>());
  instance.id = obj.at("id").get<std::string>();
  instance.split = obj.at("split").get<std::string>();
  instance.context = obj.at("context").get<std::string>();
  const auto& query = obj.at("query");
  switch (instance.dataset) {
    case BenchmarkDataset::TemporalNli:
      instance.formulation = Formulation::Nli;
      instance.hypothesis = query.at("hypothesis").get<std::string>();
      instance.label_set = {"ENTAILMENT", "NOT_ENTAILMENT"};
      instance.gold_label = obj.at("gold").get<std::string>();
      break;
    case BenchmarkDataset::Matres:
    case BenchmarkDataset::TdDiscourse:
      instance.formulation = Formulation::Pairwise;
      instance.arg1 = query.at("arg1").get<std::string>();
      instance.arg2 = query.at("arg2").get<std::string>();
      instance.label_set = query.at("label_set").get<std::vector<std::string>>();
      instance.gold_label = obj.at("gold").get<std::string>();
      break;
    case BenchmarkDataset::Torque:
      instance.formulation = Formulation::Mrc;
      instance.question = query.at("question").get<std::string>();
      for (const auto& set : obj.at("gold")) {
        instance.gold_answer_sets.push_back(set.get<std::set<std::string>>());
      }
      break;
  }
  return instance;
}

namespace {

std::map<std::string, std::string> benchmark_slots(const BenchmarkInstance& instance,
                                                   const std::string& target) {
  std::map<std::string, std::string> slots;
  slots["target"] = target;
  switch (instance.formulation) {
    case Formulation::Nli:
      slots["premise"] = instance.context;
      slots["hypothesis"] = instance.hypothesis;
      break;
    case Formulation::Pairwise: {
      slots["context"] = instance.context;
      slots["arg1"] = instance.arg1;
      slots["arg2"] = instance.arg2;
      std::string choices;
      for (const auto& label : instance.label_set) {
        if (!choices.empty()) choices += "\n";
        choices += "- " + label;
      }
      slots["choices"] = choices;
      break;
    }
    default:
      slots["context"] = instance.context;
      slots["question"] = instance.question;
      slots["marker"] = "";
      break;
  }
  return slots;
}

}  // namespace

std::string benchmark_gold_answer(const BenchmarkInstance& instance,
                                  const PromptTemplate& tmpl) {
  switch (instance.dataset) {
    case BenchmarkDataset::TemporalNli:
      return tmpl.answers.at(instance.gold_label);
    case BenchmarkDataset::Matres:
    case BenchmarkDataset::TdDiscourse:
      return instance.gold_label;
    case BenchmarkDataset::Torque: {
      const auto& first = instance.gold_answer_sets.front();
      if (first.empty()) return tmpl.empty_answer;
      std::string out;
      for (const auto& span : first) {
        if (!out.empty()) out += ", ";
        out += span;
      }
      return out;
    }
  }
  return {};
}

std::string render_benchmark_prompt(const BenchmarkInstance& instance,
                                    const PromptTemplate& tmpl,
                                    const std::vector<const BenchmarkInstance*>& demos) {
  if (tmpl.formulation != instance.formulation) {
    fail(ErrorKind::ConfigError,
         tmpl.id + " does not match the dataset's bound formulation");
  }
  std::string prompt;
  for (const auto* demo : demos) {
    if (!prompt.empty()) prompt += "\n\n";
    prompt += render_template(tmpl.body,
                              benchmark_slots(*demo, benchmark_gold_answer(*demo, tmpl)));
  }
  if (!prompt.empty()) prompt += "\n\n";
  prompt += render_template(tmpl.body, benchmark_slots(instance, ""));
  return prompt;
}

namespace {

std::set<std::string> split_span_items(const std::string& completion) {
  std::set<std::string> out;
  std::string current;
  auto push = [&] {
    auto item = trim_copy(current);
    while (!item.empty() && (item.front() == '-' || item.front() == '*')) {
      item.erase(item.begin());
      item = trim_copy(item);
    }
    while (!item.empty() && (item.back() == '.' || item.back() == ',')) item.pop_back();
    item = trim_copy(item);
    if (!item.empty()) out.insert(item);
    current.clear();
  };
  for (char c : completion) {
    if (c == ',' || c == '\n' || c == ';') {
      push();
    } else {
      current += c;
    }
  }
  push();
  return out;
}

}  // namespace

BenchmarkPrediction parse_benchmark_completion(const BenchmarkInstance& instance,
                                               const PromptTemplate& tmpl,
                                               const std::string& completion) {
  BenchmarkPrediction prediction;
  switch (instance.dataset) {
    case BenchmarkDataset::TemporalNli: {
      if (auto entail = parse_nli(completion, tmpl)) {
        prediction.label = *entail ? "ENTAILMENT" : "NOT_ENTAILMENT";
      }
      break;
    }
    case BenchmarkDataset::Matres:
    case BenchmarkDataset::TdDiscourse:
      prediction.label = match_vocabulary(completion, instance.label_set);
      break;
    case BenchmarkDataset::Torque: {
      auto items = split_span_items(completion);
      items.erase(tmpl.empty_answer);
      prediction.answer_set = std::move(items);
      break;
    }
  }
  return prediction;
}

double score_benchmark(const std::vector<BenchmarkInstance>& instances,
                       const std::vector<BenchmarkPrediction>& predictions) {
  if (instances.size() != predictions.size() || instances.empty()) {
    fail(ErrorKind::FormatError, "score_benchmark needs aligned, non-empty inputs");
  }
  const auto dataset = instances.front().dataset;
  for (const auto& instance : instances) {
    if (instance.dataset != dataset) {
      fail(ErrorKind::MixedFormulations, "instances mix datasets");
    }
  }
  switch (dataset) {
    case BenchmarkDataset::TemporalNli: {
      std::vector<std::optional<std::string>> pred;
      std::vector<std::string> gold;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        pred.push_back(predictions[i].label);
        gold.push_back(instances[i].gold_label);
      }
      return accuracy(pred, gold);
    }
    case BenchmarkDataset::Matres:
    case BenchmarkDataset::TdDiscourse: {
      std::vector<std::optional<std::string>> pred;
      std::vector<std::string> gold;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        pred.push_back(predictions[i].label);
        gold.push_back(instances[i].gold_label);
      }
      return micro_f1(pred, gold);
    }
    case BenchmarkDataset::Torque: {
      std::vector<std::set<std::string>> pred;
      std::vector<std::vector<std::set<std::string>>> gold;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        pred.push_back(predictions[i].answer_set);
        gold.push_back(instances[i].gold_answer_sets);
      }
      return exact_match_best_avg(pred, gold);
    }
  }
  return 0.0;
}

}  // namespace timeset
