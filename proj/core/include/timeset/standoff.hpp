#pragma once

#include <string_view>
#include <vector>

#include "timeset/graph.hpp"

namespace timeset {

// brat standoff subset, tab-separated, UTF-8, offsets in Unicode scalar
// values:
//   T<n>\t<Event|Entity> <start> <end>\t<surface>
//   R<n>\t<AFTER|COEX|ARG0..ARG5> Arg1:T<i> Arg2:T<j>
// `AFTER Arg1:Tx Arg2:Ty` states that Tx starts after Ty and is stored as the
// precedence edge Ty -> Tx. ARGk attaches entity Arg2 to event Arg1.
// Lines starting with '#' and blank lines are skipped.

enum class StandoffKind { TextBound, Relation, ArgLink };

struct StandoffEntry {
  StandoffKind kind;
  std::string id;
  std::string label;
  // TextBound payload.
  Span span;
  std::string surface;
  // Relation / ArgLink payload.
  std::string arg1;
  std::string arg2;
};

// Line-level parse; validates syntax and label vocabulary but not
// cross-references.
std::vector<StandoffEntry> tokenize_standoff(std::string_view annotation);

// Full parse against the document text. Returns the annotated graph with
// event indices assigned by textual order (1-based) and arguments attached.
// Throws OffsetMismatch, DanglingReference, UnknownLabel, FormatError.
TimelineGraph parse_standoff(std::string_view annotation, std::string_view text);

}  // namespace timeset
