#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "timeset/corpus.hpp"
#include "timeset/markers.hpp"
#include "timeset/templates.hpp"

namespace timeset {

// What one instance asks about, in document-level event indices.
struct QueryPayload {
  enum class Kind { PairRelation, Pair, EventRelation, Document };
  Kind kind = Kind::Document;
  int a = 0;
  int b = 0;
  RelationLabel relation = RelationLabel::None;

  friend bool operator==(const QueryPayload&, const QueryPayload&) = default;
};

// Gold target (and, on the prediction side, parsed output) of one instance.
struct AnswerPayload {
  enum class Kind { Binary, Relation, EventSet, Layers };
  Kind kind = Kind::Binary;
  bool entail = false;
  RelationLabel relation = RelationLabel::None;
  std::set<int> events;
  std::vector<std::vector<int>> layers;

  friend bool operator==(const AnswerPayload&, const AnswerPayload&) = default;
};

// One renderable query unit.
struct PromptInstance {
  std::string instance_id;
  std::string doc_id;
  Formulation formulation = Formulation::Nli;
  std::string template_id;
  TemplateFlavor flavor = TemplateFlavor::Plain;
  MarkerStyle representation = MarkerStyle::Eid;
  int n_demos = 0;
  std::vector<std::string> demo_doc_ids;
  QueryPayload query;
  std::string prompt;
  AnswerPayload gold;
  std::string gold_answer;  // gold payload in this template's answer format
  std::uint64_t seed = 0;
};

std::size_t default_length_units(std::string_view text);  // ceil(codepoints / 4)

struct GenerationOptions {
  MarkerStyle representation = MarkerStyle::Eid;
  int n_demos = 0;
  std::uint64_t seed = 0;
  std::size_t budget = 4096;
  std::function<std::size_t(std::string_view)> length_fn;  // default_length_units
  bool skip_over_budget = false;  // generators throw BudgetExceeded otherwise

  std::size_t measure(std::string_view text) const {
    return length_fn ? length_fn(text) : default_length_units(text);
  }
};

// Demonstration documents for one query: sampled without replacement from the
// dev split, never the query document, reproducible from the seed.
std::vector<std::string> select_demonstrations(
    const std::vector<const DocumentRecord*>& dev_docs, int n_demos,
    std::uint64_t seed, const std::string& exclude_doc_id = "");

// One sentence per direct gold edge / coex link, in textual-index order.
std::string generate_cot_rationale(const DocumentRecord& doc, MarkerStyle style);

// Gold layering as 1-based event indices.
std::vector<std::vector<int>> gold_layers(const DocumentRecord& doc);

// "T1:\n- item\n..." (plain/cot) or "T1 = [self.event3]" lines (code).
std::string serialize_layers(const DocumentRecord& doc,
                             const std::vector<std::vector<int>>& layers,
                             MarkerStyle style, TemplateFlavor flavor);

// Per-formulation instance generators. NLI yields n(n-1)*3 instances,
// Pairwise n(n-1), MRC 3n, Timeline exactly 1. dev_docs supply
// demonstrations when n_demos > 0.
std::vector<PromptInstance> generate_nli(const DocumentRecord& doc,
                                         const PromptTemplate& tmpl,
                                         const GenerationOptions& opts,
                                         const std::vector<const DocumentRecord*>& dev_docs = {});
std::vector<PromptInstance> generate_pairwise(const DocumentRecord& doc,
                                              const PromptTemplate& tmpl,
                                              const GenerationOptions& opts,
                                              const std::vector<const DocumentRecord*>& dev_docs = {});
std::vector<PromptInstance> generate_mrc(const DocumentRecord& doc,
                                         const PromptTemplate& tmpl,
                                         const GenerationOptions& opts,
                                         const std::vector<const DocumentRecord*>& dev_docs = {});
PromptInstance generate_timeline(const DocumentRecord& doc,
                                 const PromptTemplate& tmpl,
                                 const GenerationOptions& opts,
                                 const std::vector<const DocumentRecord*>& dev_docs = {});

std::vector<PromptInstance> generate_instances(
    const DocumentRecord& doc, const PromptTemplate& tmpl,
    const GenerationOptions& opts,
    const std::vector<const DocumentRecord*>& dev_docs = {});

// JSON-lines persistence.
std::string to_json_line(const PromptInstance& instance);
PromptInstance prompt_instance_from_json(const std::string& line);

}  // namespace timeset
