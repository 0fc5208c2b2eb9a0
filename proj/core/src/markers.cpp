#include "timeset/markers.hpp"

#include <algorithm>

#include "timeset/errors.hpp"
#include "timeset/utf8.hpp"

namespace timeset {

const char* to_string(MarkerStyle style) {
  switch (style) {
    case MarkerStyle::Eid: return "eid";
    case MarkerStyle::Star: return "star";
    case MarkerStyle::Structured: return "structured";
  }
  return "eid";
}

MarkerStyle marker_style_from_string(const std::string& name) {
  if (name == "eid") return MarkerStyle::Eid;
  if (name == "star") return MarkerStyle::Star;
  if (name == "structured") return MarkerStyle::Structured;
  fail(ErrorKind::ConfigError, "not an event representation: " + name);
}

std::string event_surface(const Event& event, int display_index, MarkerStyle style) {
  switch (style) {
    case MarkerStyle::Eid:
      return "[e" + std::to_string(display_index) + "]" + event.mention + "[/e" +
             std::to_string(display_index) + "]";
    case MarkerStyle::Star:
      return "**" + event.mention + "**";
    case MarkerStyle::Structured:
      return "[EVENT]" + event.mention;
  }
  return event.mention;
}

std::string decorated_surface(const Event& event, int display_index, MarkerStyle style) {
  if (style != MarkerStyle::Structured) {
    return event_surface(event, display_index, style);
  }
  std::string out = "[EVENT]" + event.mention;
  for (const auto& arg : event.arguments) {
    out += "[" + arg.role + "]" + arg.text;
  }
  return out;
}

std::string marker_hint(MarkerStyle style) {
  switch (style) {
    case MarkerStyle::Eid: return "[e]";
    case MarkerStyle::Star: return "**";
    case MarkerStyle::Structured: return "[EVENT]";
  }
  return "[e]";
}

namespace {

std::vector<const Event*> ordered_subset(const TimelineGraph& graph,
                                         const std::vector<std::string>& subset) {
  std::vector<const Event*> events;
  if (subset.empty()) {
    for (const auto& id : graph.event_ids()) events.push_back(&graph.event(id));
  } else {
    for (const auto& id : subset) events.push_back(&graph.event(id));
    std::sort(events.begin(), events.end(),
              [](const Event* a, const Event* b) { return a->index < b->index; });
  }
  return events;
}

}  // namespace

MarkedText render_markers(std::string_view text, const TimelineGraph& graph,
                          MarkerStyle style, const std::vector<std::string>& subset) {
  const auto events = ordered_subset(graph, subset);
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i]->span.begin < events[i - 1]->span.end) {
      fail(ErrorKind::OverlappingSpans,
           events[i - 1]->id + " and " + events[i]->id + " overlap");
    }
  }

  const auto offsets = utf8::codepoint_offsets(text);
  MarkedText out;
  std::size_t cursor = 0;  // byte position
  int display = 1;
  for (const Event* ev : events) {
    const std::size_t begin_byte = offsets[ev->span.begin];
    const std::size_t end_byte = offsets[ev->span.end];
    out.text.append(text.substr(cursor, begin_byte - cursor));
    out.text.append(decorated_surface(*ev, display, style));
    out.display_index[ev->id] = display;
    cursor = end_byte;
    ++display;
  }
  out.text.append(text.substr(cursor));
  return out;
}

std::string strip_markers(std::string_view marked, const TimelineGraph& graph,
                          MarkerStyle style, const std::vector<std::string>& subset) {
  const auto events = ordered_subset(graph, subset);
  std::string out;
  std::size_t cursor = 0;
  int display = 1;
  for (const Event* ev : events) {
    const std::string decoration = decorated_surface(*ev, display, style);
    const auto pos = marked.find(decoration, cursor);
    if (pos == std::string_view::npos) {
      fail(ErrorKind::FormatError, "marker for " + ev->id + " not found while stripping");
    }
    out.append(marked.substr(cursor, pos - cursor));
    out.append(ev->mention);
    cursor = pos + decoration.size();
    ++display;
  }
  out.append(marked.substr(cursor));
  return out;
}

}  // namespace timeset
