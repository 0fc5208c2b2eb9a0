#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "timeset/corpus.hpp"
#include "timeset/formulations.hpp"

namespace timeset {

enum class ParseStatus { Ok, Abstain };

const char* to_string(ParseStatus status);

struct PredictionRecord {
  std::string instance_id;
  std::string completion;
  ParseStatus status = ParseStatus::Abstain;
  AnswerPayload payload;  // meaningful only when status == Ok
};

// Case-insensitive string match: earliest occurrence wins, longer surfaces
// break position ties. Returns the matched vocabulary entry.
std::optional<std::string> match_vocabulary(const std::string& completion,
                                            const std::vector<std::string>& vocabulary);

std::optional<bool> parse_nli(const std::string& completion, const PromptTemplate& tmpl);
std::optional<RelationLabel> parse_pairwise(const std::string& completion,
                                            const PromptTemplate& tmpl);

// [e<N>] indices first; if the completion carries none, fall back to exact
// surface-mention matching of comma/newline-separated items. Unknown items
// are dropped, duplicates collapsed. Empty sets are legal answers.
std::set<int> parse_mrc(const std::string& completion, const DocumentRecord& doc);

// Lines "T<k>:" (or "T<k> = [...]" in code prompts) open layers; items are
// resolved like parse_mrc. Returns layers in ascending k; nullopt when no
// layer line parses.
std::optional<std::vector<std::vector<int>>> parse_timeline(const std::string& completion,
                                                            const DocumentRecord& doc);

PredictionRecord parse_completion(const PromptInstance& instance,
                                  const PromptTemplate& tmpl,
                                  const DocumentRecord& doc,
                                  const std::string& completion);

// Majority vote per event pair with seeded uniform tie-breaking. All records
// must belong to `doc` and one formulation (MixedFormulations otherwise).
TimelineGraph assemble_graph(
    const DocumentRecord& doc,
    const std::vector<std::pair<const PromptInstance*, const PredictionRecord*>>& records,
    std::uint64_t seed);

std::string to_json_line(const PredictionRecord& record);
PredictionRecord prediction_record_from_json(const std::string& line);

}  // namespace timeset
