#include "timeset/templates.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "timeset/errors.hpp"

namespace timeset {

const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::Nli: return "nli";
    case Formulation::Pairwise: return "pairwise";
    case Formulation::Mrc: return "mrc";
    case Formulation::Timeline: return "timeline";
  }
  return "nli";
}

Formulation formulation_from_string(const std::string& name) {
  if (name == "nli") return Formulation::Nli;
  if (name == "pairwise") return Formulation::Pairwise;
  if (name == "mrc") return Formulation::Mrc;
  if (name == "timeline") return Formulation::Timeline;
  fail(ErrorKind::ConfigError, "not a formulation: " + name);
}

const char* to_string(TemplateFlavor f) {
  switch (f) {
    case TemplateFlavor::Plain: return "plain";
    case TemplateFlavor::Cot: return "cot";
    case TemplateFlavor::Code: return "code";
  }
  return "plain";
}

TemplateFlavor flavor_from_string(const std::string& name) {
  if (name == "plain") return TemplateFlavor::Plain;
  if (name == "cot") return TemplateFlavor::Cot;
  if (name == "code") return TemplateFlavor::Code;
  fail(ErrorKind::ConfigError, "not a template flavor: " + name);
}

std::string PromptTemplate::choices_block() const {
  std::string out;
  for (const auto& [surface, description] : choices) {
    if (!out.empty()) out += "\n";
    out += "- " + surface;
    if (!description.empty()) out += ": " + description;
  }
  return out;
}

namespace {

// Slot names a template body may legitimately reference.
const std::set<std::string>& known_slots() {
  static const std::set<std::string> slots{
      "context", "premise", "hypothesis", "question", "choices",
      "events",  "cot",     "target",     "arg1",     "arg2",
      "marker",  "a",       "b",          "x",
  };
  return slots;
}

bool is_slot_char(char c) {
  return (c >= 'a' && c <= 'z') || c == '_' || (c >= '0' && c <= '9');
}

}  // namespace

std::string render_template(const std::string& body,
                            const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(body.size());
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] != '{') {
      out += body[i++];
      continue;
    }
    std::size_t j = i + 1;
    while (j < body.size() && is_slot_char(body[j])) ++j;
    if (j < body.size() && body[j] == '}' && j > i + 1) {
      const std::string name = body.substr(i + 1, j - i - 1);
      if (auto it = slots.find(name); it != slots.end()) {
        out += it->second;
        i = j + 1;
        continue;
      }
      if (known_slots().count(name)) {
        fail(ErrorKind::MissingSlot, "no value for {" + name + "}");
      }
    }
    out += body[i++];
  }
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ConfigError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::map<std::string, std::string> string_map(const nlohmann::json& obj) {
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : obj.items()) out[key] = value.get<std::string>();
  return out;
}

void validate_template(const PromptTemplate& t) {
  const auto need = [&](bool ok, const std::string& what) {
    if (!ok) {
      fail(ErrorKind::ConfigError, t.id + ": template sidecar missing " + what);
    }
  };
  switch (t.formulation) {
    case Formulation::Nli:
      need(t.answers.count("ENTAILMENT") && t.answers.count("NOT_ENTAILMENT"),
           "ENTAILMENT/NOT_ENTAILMENT answers");
      need(t.hypothesis.count("BEFORE") && t.hypothesis.count("AFTER") &&
               t.hypothesis.count("COEX"),
           "hypothesis patterns");
      break;
    case Formulation::Pairwise:
      for (const char* canonical : {"BEFORE", "AFTER", "COEX", "NONE"}) {
        need(t.labels.count(canonical) > 0,
             std::string("label surface for ") + canonical);
      }
      need(!t.parse_map.empty(), "parse map");
      need(!t.choices.empty(), "choices");
      break;
    case Formulation::Mrc:
      need(t.questions.count("BEFORE") && t.questions.count("AFTER") &&
               t.questions.count("COEX"),
           "question patterns");
      break;
    case Formulation::Timeline:
      break;
  }
  if (t.flavor == TemplateFlavor::Cot &&
      t.formulation != Formulation::Mrc && t.formulation != Formulation::Timeline) {
    fail(ErrorKind::ConfigError, t.id + ": cot flavor is only for mrc/timeline");
  }
  if (t.flavor == TemplateFlavor::Code && t.formulation != Formulation::Timeline) {
    fail(ErrorKind::ConfigError, t.id + ": code flavor is only for timeline");
  }
}

}  // namespace

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  TemplateSet set;
  for (const auto* name : {"nli", "pairwise", "mrc", "timeline"}) {
    const auto formulation_dir = dir / name;
    if (!std::filesystem::exists(formulation_dir)) continue;
    const auto formulation = formulation_from_string(name);

    nlohmann::json sidecar;
    const auto sidecar_path = formulation_dir / "labels.json";
    try {
      sidecar = nlohmann::json::parse(read_file(sidecar_path));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::ConfigError, sidecar_path.string() + ": " + e.what());
    }

    for (const auto& [id, meta] : sidecar.items()) {
      PromptTemplate t;
      t.id = id;
      t.formulation = formulation;
      t.flavor = flavor_from_string(meta.value("flavor", "plain"));
      t.body = read_file(formulation_dir / (id + ".txt"));
      while (!t.body.empty() && t.body.back() == '\n') t.body.pop_back();
      if (meta.contains("answers")) t.answers = string_map(meta["answers"]);
      if (meta.contains("hypothesis")) t.hypothesis = string_map(meta["hypothesis"]);
      if (meta.contains("labels")) t.labels = string_map(meta["labels"]);
      if (meta.contains("parse")) t.parse_map = string_map(meta["parse"]);
      if (meta.contains("questions")) t.questions = string_map(meta["questions"]);
      if (meta.contains("empty_answer")) {
        t.empty_answer = meta["empty_answer"].get<std::string>();
      }
      if (meta.contains("choices")) {
        for (const auto& choice : meta["choices"]) {
          t.choices.emplace_back(choice[0].get<std::string>(),
                                 choice.size() > 1 ? choice[1].get<std::string>() : "");
        }
      }
      validate_template(t);
      set.templates_.emplace(std::make_pair(formulation, id), std::move(t));
    }
  }
  if (set.templates_.empty()) {
    fail(ErrorKind::ConfigError, "no templates under " + dir.string());
  }
  return set;
}

const PromptTemplate& TemplateSet::get(Formulation f, const std::string& id) const {
  auto it = templates_.find({f, id});
  if (it == templates_.end()) {
    fail(ErrorKind::ConfigError,
         std::string("no template ") + id + " for " + to_string(f));
  }
  return it->second;
}

bool TemplateSet::has(Formulation f, const std::string& id) const {
  return templates_.count({f, id}) > 0;
}

std::vector<const PromptTemplate*> TemplateSet::select(
    Formulation f, std::optional<TemplateFlavor> flavor) const {
  std::vector<const PromptTemplate*> out;
  for (const auto& [key, t] : templates_) {
    if (key.first != f) continue;
    if (flavor && t.flavor != *flavor) continue;
    out.push_back(&t);
  }
  return out;
}

}  // namespace timeset
