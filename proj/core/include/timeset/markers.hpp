#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "timeset/graph.hpp"

namespace timeset {

// Event representation inside prompts:
//   eid         [e1]mention[/e1]
//   star        **mention**
//   structured  [EVENT]mention[ARG0]arg text...   (in-context only)
enum class MarkerStyle { Eid, Star, Structured };

const char* to_string(MarkerStyle style);
MarkerStyle marker_style_from_string(const std::string& name);

struct MarkedText {
  std::string text;
  // Event id -> 1-based display index among the marked subset, assigned by
  // textual order.
  std::map<std::string, int> display_index;
};

// Marks `subset` (or all events when empty) inside `text`; all other bytes
// are preserved unchanged. Throws OverlappingSpans when marked spans overlap.
MarkedText render_markers(std::string_view text, const TimelineGraph& graph,
                          MarkerStyle style,
                          const std::vector<std::string>& subset = {});

// Reference surface used in statements, questions and answers, e.g.
// "[e2]death[/e2]". Structured references carry no argument decoration.
std::string event_surface(const Event& event, int display_index, MarkerStyle style);

// In-context decoration; for the structured style this appends the event's
// arguments.
std::string decorated_surface(const Event& event, int display_index, MarkerStyle style);

// Inverse of render_markers over its own output.
std::string strip_markers(std::string_view marked, const TimelineGraph& graph,
                          MarkerStyle style,
                          const std::vector<std::string>& subset = {});

// Template hint for "events are marked with ...".
std::string marker_hint(MarkerStyle style);

}  // namespace timeset
