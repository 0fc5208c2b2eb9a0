#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace timeset {

// Character span into the document text; half-open, 0-based, counted in
// Unicode scalar values.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

// Propbank-style argument attached to an event (roles ARG0..ARG5).
struct Argument {
  std::string role;
  std::string text;
  Span span;

  friend bool operator==(const Argument&, const Argument&) = default;
};

// A salient event mention. `index` is the 1-based textual-order rank within
// its document.
struct Event {
  std::string id;
  std::string mention;
  Span span;
  int index = 0;
  std::vector<Argument> arguments;

  friend bool operator==(const Event&, const Event&) = default;
};

// Relation between two event start times. BEFORE(x, y) holds exactly when
// AFTER(y, x) holds; COEX is symmetric; NONE marks incomparable pairs.
enum class RelationLabel { Before, After, Coex, None };

const char* to_string(RelationLabel label);
RelationLabel relation_from_string(const std::string& name);
RelationLabel inverse(RelationLabel label);

using EdgeSet = std::set<std::pair<std::string, std::string>>;

// Partial-order timeline: events plus directed precedence edges (x, y)
// meaning "x starts before y starts" and symmetric COEX links.
class TimelineGraph {
 public:
  TimelineGraph() = default;

  void add_event(Event event);
  bool has_event(const std::string& id) const { return events_.count(id) > 0; }
  const Event& event(const std::string& id) const;
  const Event* find_by_index(int index) const;
  std::size_t event_count() const { return events_.size(); }

  // Event ids in textual order (ascending index).
  std::vector<std::string> event_ids() const;
  const std::map<std::string, Event>& events() const { return events_; }

  // Edge (before, after): `before` starts before `after` starts. Endpoints
  // must be declared events.
  void add_edge(const std::string& before, const std::string& after);
  void add_coex(const std::string& a, const std::string& b);

  const EdgeSet& edges() const { return edges_; }
  const EdgeSet& coex_links() const { return coex_; }  // normalized a < b
  bool has_edge(const std::string& before, const std::string& after) const {
    return edges_.count({before, after}) > 0;
  }

  // Connected components of the coex_links subgraph, each with >= 2 members.
  // Components are sorted by smallest member id; members sorted by id.
  std::vector<std::vector<std::string>> coex_clusters() const;

  // Weak connectivity over edges and coex links together.
  bool weakly_connected() const;

 private:
  std::map<std::string, Event> events_;
  EdgeSet edges_;
  EdgeSet coex_;
};

// Transitive closure as labeled pair items: before_pairs are ordered,
// coex_pairs are normalized unordered (first < second). No self-pairs.
struct ClosurePairSet {
  EdgeSet before_pairs;
  EdgeSet coex_pairs;

  std::size_t size() const { return before_pairs.size() + coex_pairs.size(); }
  bool empty() const { return before_pairs.empty() && coex_pairs.empty(); }

  friend bool operator==(const ClosurePairSet&, const ClosurePairSet&) = default;
};

// Copies cluster-external precedence edges onto every cluster member: an
// edge x->m with m in cluster C (x outside C) yields x->m' for all m' in C,
// and symmetrically for outgoing edges. Intra-cluster edges are preserved
// unchanged. Idempotent.
TimelineGraph expand_coex(const TimelineGraph& graph);

// Plain reachability closure; tolerates cycles (both directions of a cycle
// appear as before-pairs). coex_pairs are all unordered pairs within one
// COEX cluster. Callers scoring gold graphs expand first.
ClosurePairSet transitive_closure(const TimelineGraph& graph);

// Empty iff the precedence edges form a DAG. Each reported cycle is a vertex
// sequence v0, v1, ..., vk with edges v0->v1, ..., vk->v0 present.
std::vector<std::vector<std::string>> detect_cycles(const TimelineGraph& graph);

// Chronological layers: layer(v) = 1 + max layer over predecessors after
// COEX expansion (longest-path depth, so no event shares a layer with a
// transitive successor). Members within a layer are in textual order.
// Throws CyclicGraph when the expanded graph has a cycle.
std::vector<std::vector<std::string>> layering(const TimelineGraph& graph);

// Relation of x to y by node-to-node reachability on the graph as given:
// BEFORE if x reaches y only, AFTER mirrored, COEX if the two share a COEX
// cluster and neither reaches the other, NONE otherwise (including mutual
// reachability). Throws UnknownEvent for undeclared ids.
RelationLabel pairwise_relation(const TimelineGraph& graph, const std::string& x,
                                const std::string& y);

}  // namespace timeset
