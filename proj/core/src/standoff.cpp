#include "timeset/standoff.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "timeset/errors.hpp"
#include "timeset/utf8.hpp"

namespace timeset {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::size_t parse_offset(std::string_view token, std::string_view line) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    fail(ErrorKind::FormatError, "bad offset in line: " + std::string(line));
  }
  return value;
}

bool is_relation_label(std::string_view label) {
  return label == "AFTER" || label == "COEX";
}

bool is_arg_label(std::string_view label) {
  return label.size() == 4 && label.substr(0, 3) == "ARG" && label[3] >= '0' &&
         label[3] <= '5';
}

std::string parse_arg_ref(std::string_view token, std::string_view prefix,
                          std::string_view line) {
  if (token.substr(0, prefix.size()) != prefix) {
    fail(ErrorKind::FormatError, "expected " + std::string(prefix) + " in line: " +
                                     std::string(line));
  }
  return std::string(token.substr(prefix.size()));
}

}  // namespace

std::vector<StandoffEntry> tokenize_standoff(std::string_view annotation) {
  std::vector<StandoffEntry> entries;
  for (auto line : split(annotation, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '#') continue;

    const auto fields = split(line, '\t');
    StandoffEntry entry;
    entry.id = std::string(fields[0]);

    if (line[0] == 'T') {
      if (fields.size() < 3) {
        fail(ErrorKind::FormatError, "text-bound line needs 3 fields: " + std::string(line));
      }
      const auto head = split(fields[1], ' ');
      if (head.size() != 3) {
        fail(ErrorKind::FormatError, "text-bound header needs label + offsets: " +
                                         std::string(line));
      }
      entry.kind = StandoffKind::TextBound;
      entry.label = std::string(head[0]);
      if (entry.label != "Event" && entry.label != "Entity") {
        fail(ErrorKind::UnknownLabel, entry.label + " in line: " + std::string(line));
      }
      entry.span.begin = parse_offset(head[1], line);
      entry.span.end = parse_offset(head[2], line);
      entry.surface = std::string(fields[2]);
    } else if (line[0] == 'R') {
      if (fields.size() < 2) {
        fail(ErrorKind::FormatError, "relation line needs 2 fields: " + std::string(line));
      }
      const auto head = split(fields[1], ' ');
      if (head.size() != 3) {
        fail(ErrorKind::FormatError, "relation header needs label + two args: " +
                                         std::string(line));
      }
      entry.label = std::string(head[0]);
      if (is_relation_label(entry.label)) {
        entry.kind = StandoffKind::Relation;
      } else if (is_arg_label(entry.label)) {
        entry.kind = StandoffKind::ArgLink;
      } else {
        fail(ErrorKind::UnknownLabel, entry.label + " in line: " + std::string(line));
      }
      entry.arg1 = parse_arg_ref(head[1], "Arg1:", line);
      entry.arg2 = parse_arg_ref(head[2], "Arg2:", line);
    } else {
      fail(ErrorKind::FormatError, "unsupported line kind: " + std::string(line));
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

TimelineGraph parse_standoff(std::string_view annotation, std::string_view text) {
  const auto entries = tokenize_standoff(annotation);
  const auto offsets = utf8::codepoint_offsets(text);
  const std::size_t text_cp_len = offsets.size() - 1;

  struct Bound {
    std::string label;
    Span span;
    std::string surface;
  };
  std::map<std::string, Bound> bounds;

  for (const auto& entry : entries) {
    if (entry.kind != StandoffKind::TextBound) continue;
    if (entry.span.end > text_cp_len || entry.span.begin >= entry.span.end) {
      fail(ErrorKind::OffsetMismatch,
           entry.id + " span [" + std::to_string(entry.span.begin) + ", " +
               std::to_string(entry.span.end) + ") outside text of length " +
               std::to_string(text_cp_len));
    }
    const std::string slice(
        text.substr(offsets[entry.span.begin],
                    offsets[entry.span.end] - offsets[entry.span.begin]));
    if (slice != entry.surface) {
      fail(ErrorKind::OffsetMismatch,
           entry.id + " surface \"" + entry.surface + "\" != text slice \"" + slice + "\"");
    }
    bounds[entry.id] = Bound{entry.label, entry.span, entry.surface};
  }

  // Events in textual order get 1-based indices.
  std::vector<std::pair<std::string, const Bound*>> event_bounds;
  for (const auto& [id, bound] : bounds) {
    if (bound.label == "Event") event_bounds.emplace_back(id, &bound);
  }
  std::sort(event_bounds.begin(), event_bounds.end(),
            [](const auto& a, const auto& b) {
              if (a.second->span != b.second->span) return a.second->span < b.second->span;
              return a.first < b.first;
            });

  TimelineGraph graph;
  int index = 1;
  for (const auto& [id, bound] : event_bounds) {
    Event ev;
    ev.id = id;
    ev.mention = bound->surface;
    ev.span = bound->span;
    ev.index = index++;
    graph.add_event(std::move(ev));
  }

  std::map<std::string, std::vector<Argument>> args_by_event;
  for (const auto& entry : entries) {
    if (entry.kind == StandoffKind::TextBound) continue;
    const auto a1 = bounds.find(entry.arg1);
    const auto a2 = bounds.find(entry.arg2);
    if (a1 == bounds.end()) fail(ErrorKind::DanglingReference, entry.id + " cites " + entry.arg1);
    if (a2 == bounds.end()) fail(ErrorKind::DanglingReference, entry.id + " cites " + entry.arg2);

    if (entry.kind == StandoffKind::Relation) {
      if (a1->second.label != "Event" || a2->second.label != "Event") {
        fail(ErrorKind::FormatError, entry.id + " relates a non-event");
      }
      if (entry.label == "AFTER") {
        // Arg1 starts after Arg2: store the before-edge Arg2 -> Arg1.
        graph.add_edge(entry.arg2, entry.arg1);
      } else {
        graph.add_coex(entry.arg1, entry.arg2);
      }
    } else {
      if (a1->second.label != "Event" || a2->second.label != "Entity") {
        fail(ErrorKind::FormatError,
             entry.id + " must link an event (Arg1) to an entity (Arg2)");
      }
      args_by_event[entry.arg1].push_back(
          Argument{entry.label, a2->second.surface, a2->second.span});
    }
  }

  for (auto& [event_id, args] : args_by_event) {
    std::sort(args.begin(), args.end(), [](const Argument& a, const Argument& b) {
      if (a.role != b.role) return a.role < b.role;
      return a.span < b.span;
    });
    Event ev = graph.event(event_id);
    ev.arguments = std::move(args);
    graph.add_event(std::move(ev));
  }
  return graph;
}

}  // namespace timeset
