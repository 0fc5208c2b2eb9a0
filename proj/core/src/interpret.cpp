#include "timeset/interpret.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#include "json.hpp"
#include "timeset/errors.hpp"
#include "timeset/rng.hpp"

namespace timeset {

const char* to_string(ParseStatus status) {
  return status == ParseStatus::Ok ? "ok" : "abstain";
}

namespace {
std::string lowercase_for_match(std::string_view text);
}  // namespace

std::optional<std::string> match_vocabulary(const std::string& completion,
                                            const std::vector<std::string>& vocabulary) {
  const auto haystack = lowercase_for_match(completion);
  std::optional<std::string> best;
  std::size_t best_pos = std::string::npos;
  for (const auto& surface : vocabulary) {
    const auto pos = haystack.find(lowercase_for_match(surface));
    if (pos == std::string::npos) continue;
    if (pos < best_pos || (pos == best_pos && best && surface.size() > best->size())) {
      best_pos = pos;
      best = surface;
    }
  }
  return best;
}

namespace {

std::string lowercase_for_match(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}


struct MentionIndex {
  std::map<std::string, int> first_by_mention;  // repeated mentions: lowest index

  explicit MentionIndex(const DocumentRecord& doc) {
    for (const auto& [id, ev] : doc.graph.events()) {
      auto it = first_by_mention.find(ev.mention);
      if (it == first_by_mention.end() || ev.index < it->second) {
        first_by_mention[ev.mention] = ev.index;
      }
    }
  }
};

bool valid_index(const DocumentRecord& doc, int index) {
  return index >= 1 && index <= static_cast<int>(doc.graph.event_count());
}

// [e<N>] occurrences, skipping closing [/e<N>] tags.
std::vector<int> extract_eid_indices(const std::string& text) {
  std::vector<int> out;
  for (std::size_t i = 0; i + 2 < text.size(); ++i) {
    if (text[i] != '[' || text[i + 1] != 'e') continue;
    std::size_t j = i + 2;
    int value = 0;
    bool digits = false;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      value = value * 10 + (text[j] - '0');
      digits = true;
      ++j;
    }
    if (digits && j < text.size() && text[j] == ']') out.push_back(value);
  }
  return out;
}

// self.event<N> / event<N> references in code-style completions.
std::vector<int> extract_event_var_indices(const std::string& text) {
  std::vector<int> out;
  const std::string token = "event";
  std::size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string::npos) {
    const std::size_t digits_at = pos + token.size();
    std::size_t j = digits_at;
    int value = 0;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      value = value * 10 + (text[j] - '0');
      ++j;
    }
    // Require a standalone identifier: no alpha right before or after.
    const bool before_ok =
        pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
    if (j > digits_at && before_ok &&
        (j >= text.size() || !std::isalnum(static_cast<unsigned char>(text[j])))) {
      out.push_back(value);
    }
    pos = j;
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Normalizes one list item down to a bare mention: strips bullets, marker
// decorations and trailing punctuation.
std::string normalize_item(std::string item) {
  item = trim(item);
  while (!item.empty() && (item.front() == '-' || item.front() == '*')) {
    item.erase(item.begin());
    item = trim(item);
  }
  if (item.rfind("[EVENT]", 0) == 0) item = item.substr(7);
  // [e1]mention[/e1] -> mention
  if (!item.empty() && item.front() == '[') {
    const auto close = item.find(']');
    if (close != std::string::npos) item = item.substr(close + 1);
  }
  const auto open = item.find('[');
  if (open != std::string::npos) item = item.substr(0, open);
  while (!item.empty() && item.back() == '*') item.pop_back();
  while (!item.empty() && item.front() == '*') item.erase(item.begin());
  item = trim(item);
  while (!item.empty() && (item.back() == '.' || item.back() == ',')) item.pop_back();
  return trim(item);
}

std::vector<std::string> split_items(const std::string& text) {
  std::vector<std::string> items;
  std::string current;
  for (char c : text) {
    if (c == ',' || c == '\n' || c == ';') {
      items.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  items.push_back(current);
  return items;
}

std::set<int> match_mentions(const std::string& text, const DocumentRecord& doc) {
  const MentionIndex mentions(doc);
  std::set<int> out;
  for (const auto& raw : split_items(text)) {
    const auto item = normalize_item(raw);
    if (item.empty()) continue;
    auto it = mentions.first_by_mention.find(item);
    if (it != mentions.first_by_mention.end()) out.insert(it->second);
  }
  return out;
}

}  // namespace

std::optional<bool> parse_nli(const std::string& completion, const PromptTemplate& tmpl) {
  const auto& affirmative = tmpl.answers.at("ENTAILMENT");
  const auto& negative = tmpl.answers.at("NOT_ENTAILMENT");
  const auto match = match_vocabulary(completion, {affirmative, negative});
  if (!match) return std::nullopt;
  return *match == affirmative;
}

std::optional<RelationLabel> parse_pairwise(const std::string& completion,
                                            const PromptTemplate& tmpl) {
  std::vector<std::string> vocabulary;
  for (const auto& [surface, canonical] : tmpl.parse_map) vocabulary.push_back(surface);
  const auto match = match_vocabulary(completion, vocabulary);
  if (!match) return std::nullopt;
  return relation_from_string(tmpl.parse_map.at(*match));
}

std::set<int> parse_mrc(const std::string& completion, const DocumentRecord& doc) {
  std::set<int> out;
  for (int index : extract_eid_indices(completion)) {
    if (valid_index(doc, index)) out.insert(index);
  }
  if (!out.empty()) return out;
  return match_mentions(completion, doc);
}

std::optional<std::vector<std::vector<int>>> parse_timeline(const std::string& completion,
                                                            const DocumentRecord& doc) {
  struct RawLayer {
    int k = 0;
    std::string text;
  };
  std::vector<RawLayer> raw;

  std::size_t start = 0;
  while (start <= completion.size()) {
    auto end = completion.find('\n', start);
    if (end == std::string::npos) end = completion.size();
    std::string line = trim(completion.substr(start, end - start));
    start = end + 1;
    // Layer headers look like "T3:", "T3 :", "T3 = [...]", possibly inline.
    bool header = false;
    if (line.size() >= 2 && line[0] == 'T' &&
        std::isdigit(static_cast<unsigned char>(line[1]))) {
      std::size_t j = 1;
      int k = 0;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) {
        k = k * 10 + (line[j] - '0');
        ++j;
      }
      while (j < line.size() && line[j] == ' ') ++j;
      if (j < line.size() && (line[j] == ':' || line[j] == '=')) {
        raw.push_back({k, line.substr(j + 1)});
        header = true;
      }
    }
    if (!header && !raw.empty() && !line.empty()) {
      raw.back().text += "\n" + line;
    }
    if (end == completion.size()) break;
  }
  if (raw.empty()) return std::nullopt;

  std::map<int, std::vector<int>> by_k;
  std::set<int> placed;
  // Either every layer names events by index or we fall back to mentions.
  bool any_ids = false;
  for (const auto& layer : raw) {
    if (!extract_eid_indices(layer.text).empty() ||
        !extract_event_var_indices(layer.text).empty()) {
      any_ids = true;
      break;
    }
  }
  for (const auto& layer : raw) {
    std::vector<int> indices;
    if (any_ids) {
      for (int idx : extract_eid_indices(layer.text)) indices.push_back(idx);
      if (indices.empty()) {
        for (int idx : extract_event_var_indices(layer.text)) indices.push_back(idx);
      }
    } else {
      for (int idx : match_mentions(layer.text, doc)) indices.push_back(idx);
    }
    auto& bucket = by_k[layer.k];
    for (int idx : indices) {
      if (valid_index(doc, idx) && placed.insert(idx).second) bucket.push_back(idx);
    }
  }

  std::vector<std::vector<int>> layers;
  for (auto& [k, bucket] : by_k) {
    if (bucket.empty()) continue;
    std::sort(bucket.begin(), bucket.end());
    layers.push_back(std::move(bucket));
  }
  if (layers.empty()) return std::nullopt;
  return layers;
}

PredictionRecord parse_completion(const PromptInstance& instance,
                                  const PromptTemplate& tmpl,
                                  const DocumentRecord& doc,
                                  const std::string& completion) {
  PredictionRecord record;
  record.instance_id = instance.instance_id;
  record.completion = completion;
  switch (instance.formulation) {
    case Formulation::Nli: {
      if (auto entail = parse_nli(completion, tmpl)) {
        record.status = ParseStatus::Ok;
        record.payload.kind = AnswerPayload::Kind::Binary;
        record.payload.entail = *entail;
      }
      break;
    }
    case Formulation::Pairwise: {
      if (auto relation = parse_pairwise(completion, tmpl)) {
        record.status = ParseStatus::Ok;
        record.payload.kind = AnswerPayload::Kind::Relation;
        record.payload.relation = *relation;
      }
      break;
    }
    case Formulation::Mrc: {
      record.status = ParseStatus::Ok;
      record.payload.kind = AnswerPayload::Kind::EventSet;
      record.payload.events = parse_mrc(completion, doc);
      break;
    }
    case Formulation::Timeline: {
      if (auto layers = parse_timeline(completion, doc)) {
        record.status = ParseStatus::Ok;
        record.payload.kind = AnswerPayload::Kind::Layers;
        record.payload.layers = *layers;
      }
      break;
    }
  }
  return record;
}

namespace {

enum VoteSlot { kBefore = 0, kAfter = 1, kCoex = 2 };

struct VoteTable {
  // Pair keys are normalized to (low index, high index); the direction is
  // folded into the label relative to that order.
  std::map<std::pair<int, int>, std::array<int, 3>> votes;

  void add(int x, int y, RelationLabel rel) {
    if (x == y) return;
    if (x > y) {
      std::swap(x, y);
      rel = inverse(rel);
    }
    auto& counts = votes[{x, y}];
    switch (rel) {
      case RelationLabel::Before: ++counts[kBefore]; break;
      case RelationLabel::After: ++counts[kAfter]; break;
      case RelationLabel::Coex: ++counts[kCoex]; break;
      case RelationLabel::None: break;
    }
  }
};

}  // namespace

TimelineGraph assemble_graph(
    const DocumentRecord& doc,
    const std::vector<std::pair<const PromptInstance*, const PredictionRecord*>>& records,
    std::uint64_t seed) {
  std::optional<Formulation> formulation;
  for (const auto& [instance, record] : records) {
    if (instance->doc_id != doc.id) {
      fail(ErrorKind::MixedFormulations,
           "record for " + instance->doc_id + " mixed into " + doc.id);
    }
    if (formulation && *formulation != instance->formulation) {
      fail(ErrorKind::MixedFormulations,
           "records mix formulations for document " + doc.id);
    }
    formulation = instance->formulation;
  }

  VoteTable table;
  for (const auto& [instance, record] : records) {
    if (record->status != ParseStatus::Ok) continue;
    const auto& query = instance->query;
    const auto& payload = record->payload;
    switch (instance->formulation) {
      case Formulation::Nli:
        if (!payload.entail) break;  // a negation names no alternative
        switch (query.relation) {
          case RelationLabel::After:  // "a started after b" => b before a
            table.add(query.b, query.a, RelationLabel::Before);
            break;
          case RelationLabel::Before:
            table.add(query.a, query.b, RelationLabel::Before);
            break;
          case RelationLabel::Coex:
            table.add(query.a, query.b, RelationLabel::Coex);
            break;
          default:
            break;
        }
        break;
      case Formulation::Pairwise:
        if (payload.relation != RelationLabel::None) {
          table.add(query.a, query.b, payload.relation);
        }
        break;
      case Formulation::Mrc:
        for (int answered : payload.events) {
          switch (query.relation) {
            case RelationLabel::Before:  // answered happened before the anchor
              table.add(answered, query.a, RelationLabel::Before);
              break;
            case RelationLabel::After:
              table.add(query.a, answered, RelationLabel::Before);
              break;
            case RelationLabel::Coex:
              table.add(query.a, answered, RelationLabel::Coex);
              break;
            default:
              break;
          }
        }
        break;
      case Formulation::Timeline:
        for (std::size_t i = 0; i < payload.layers.size(); ++i) {
          for (std::size_t j = i; j < payload.layers.size(); ++j) {
            for (int x : payload.layers[i]) {
              for (int y : payload.layers[j]) {
                if (x == y) continue;
                if (i == j) {
                  if (x < y) table.add(x, y, RelationLabel::Coex);
                } else {
                  table.add(x, y, RelationLabel::Before);
                }
              }
            }
          }
        }
        break;
    }
  }

  TimelineGraph graph;
  for (const auto& [id, ev] : doc.graph.events()) graph.add_event(ev);

  for (const auto& [pair, counts] : table.votes) {
    const int top = std::max({counts[kBefore], counts[kAfter], counts[kCoex]});
    if (top == 0) continue;
    std::vector<int> winners;
    for (int slot : {kBefore, kAfter, kCoex}) {
      if (counts[slot] == top) winners.push_back(slot);
    }
    int chosen = winners.front();
    if (winners.size() > 1) {
      Rng rng(fnv1a64_mix(seed ^ 0x7c9a0367u, doc.id + ":" +
                                                  std::to_string(pair.first) + "-" +
                                                  std::to_string(pair.second)));
      chosen = winners[rng.below(winners.size())];
    }
    const Event* low = doc.graph.find_by_index(pair.first);
    const Event* high = doc.graph.find_by_index(pair.second);
    if (low == nullptr || high == nullptr) continue;
    switch (chosen) {
      case kBefore: graph.add_edge(low->id, high->id); break;
      case kAfter: graph.add_edge(high->id, low->id); break;
      case kCoex: graph.add_coex(low->id, high->id); break;
    }
  }
  return graph;
}

std::string to_json_line(const PredictionRecord& record) {
  nlohmann::json out;
  out["instance_id"] = record.instance_id;
  out["completion"] = record.completion;
  out["status"] = to_string(record.status);
  if (record.status == ParseStatus::Ok) {
    nlohmann::json payload;
    switch (record.payload.kind) {
      case AnswerPayload::Kind::Binary:
        payload["kind"] = "binary";
        payload["entail"] = record.payload.entail;
        break;
      case AnswerPayload::Kind::Relation:
        payload["kind"] = "relation";
        payload["relation"] = timeset::to_string(record.payload.relation);
        break;
      case AnswerPayload::Kind::EventSet:
        payload["kind"] = "event_set";
        payload["events"] = record.payload.events;
        break;
      case AnswerPayload::Kind::Layers:
        payload["kind"] = "layers";
        payload["layers"] = record.payload.layers;
        break;
    }
    out["payload"] = payload;
  }
  return out.dump();
}

PredictionRecord prediction_record_from_json(const std::string& line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::FormatError, std::string("bad prediction json: ") + e.what());
  }
  PredictionRecord record;
  record.instance_id = obj.at("instance_id").get<std::string>();
  record.completion = obj.at("completion").get<std::string>();
  const auto status = obj.at("status").get<std::string>();
  record.status = status == "ok" ? ParseStatus::Ok : ParseStatus::Abstain;
  if (record.status == ParseStatus::Ok) {
    const auto& payload = obj.at("payload");
    const auto kind = payload.at("kind").get<std::string>();
    if (kind == "binary") {
      record.payload.kind = AnswerPayload::Kind::Binary;
      record.payload.entail = payload.at("entail").get<bool>();
    } else if (kind == "relation") {
      record.payload.kind = AnswerPayload::Kind::Relation;
      record.payload.relation =
          relation_from_string(payload.at("relation").get<std::string>());
    } else if (kind == "event_set") {
      record.payload.kind = AnswerPayload::Kind::EventSet;
      record.payload.events = payload.at("events").get<std::set<int>>();
    } else if (kind == "layers") {
      record.payload.kind = AnswerPayload::Kind::Layers;
      record.payload.layers = payload.at("layers").get<std::vector<std::vector<int>>>();
    } else {
      fail(ErrorKind::FormatError, "bad payload kind " + kind);
    }
  }
  return record;
}

}  // namespace timeset
