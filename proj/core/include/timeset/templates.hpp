#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace timeset {

// The four ways a document-timeline pair is cast into prompts.
enum class Formulation { Nli, Pairwise, Mrc, Timeline };

const char* to_string(Formulation f);
Formulation formulation_from_string(const std::string& name);

enum class TemplateFlavor { Plain, Cot, Code };

const char* to_string(TemplateFlavor f);
TemplateFlavor flavor_from_string(const std::string& name);

// One template asset: body text with {slot} placeholders plus the sidecar
// vocabulary that maps canonical labels to this template's surface words.
struct PromptTemplate {
  std::string id;
  Formulation formulation = Formulation::Nli;
  TemplateFlavor flavor = TemplateFlavor::Plain;
  std::string body;

  // NLI: canonical {ENTAILMENT, NOT_ENTAILMENT} -> answer surface, and
  // relation name -> hypothesis pattern with {a}/{b} slots.
  std::map<std::string, std::string> answers;
  std::map<std::string, std::string> hypothesis;

  // Pairwise: canonical relation -> surface (total over BEFORE/AFTER/COEX/
  // NONE), surface -> canonical for parsing, and the rendered choice list.
  std::map<std::string, std::string> labels;
  std::map<std::string, std::string> parse_map;
  std::vector<std::pair<std::string, std::string>> choices;  // surface, description

  // MRC: relation name -> question pattern with an {x} slot.
  std::map<std::string, std::string> questions;
  std::string empty_answer = "None";

  std::string choices_block() const;
};

// Substitutes {slot} placeholders in a single pass; inserted values are never
// rescanned. A placeholder naming a known slot that was not provided raises
// MissingSlot; unknown brace tokens (e.g. code syntax) pass through.
std::string render_template(const std::string& body,
                            const std::map<std::string, std::string>& slots);

// Loads `templates/<formulation>/<id>.txt` plus the per-formulation
// `labels.json` sidecar.
class TemplateSet {
 public:
  static TemplateSet load(const std::filesystem::path& dir);

  const PromptTemplate& get(Formulation f, const std::string& id) const;
  bool has(Formulation f, const std::string& id) const;

  // Templates of one formulation, optionally restricted to a flavor,
  // ordered by id.
  std::vector<const PromptTemplate*> select(
      Formulation f, std::optional<TemplateFlavor> flavor = std::nullopt) const;

  std::size_t size() const { return templates_.size(); }

 private:
  std::map<std::pair<Formulation, std::string>, PromptTemplate> templates_;
};

}  // namespace timeset
