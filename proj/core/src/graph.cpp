#include "timeset/graph.hpp"

#include <algorithm>
#include <deque>

#include "timeset/errors.hpp"

namespace timeset {

const char* to_string(RelationLabel label) {
  switch (label) {
    case RelationLabel::Before: return "BEFORE";
    case RelationLabel::After: return "AFTER";
    case RelationLabel::Coex: return "COEX";
    case RelationLabel::None: return "NONE";
  }
  return "NONE";
}

RelationLabel relation_from_string(const std::string& name) {
  if (name == "BEFORE") return RelationLabel::Before;
  if (name == "AFTER") return RelationLabel::After;
  if (name == "COEX") return RelationLabel::Coex;
  if (name == "NONE") return RelationLabel::None;
  fail(ErrorKind::UnknownLabel, "not a relation label: " + name);
}

RelationLabel inverse(RelationLabel label) {
  switch (label) {
    case RelationLabel::Before: return RelationLabel::After;
    case RelationLabel::After: return RelationLabel::Before;
    default: return label;
  }
}

void TimelineGraph::add_event(Event event) {
  events_[event.id] = std::move(event);
}

const Event& TimelineGraph::event(const std::string& id) const {
  auto it = events_.find(id);
  if (it == events_.end()) fail(ErrorKind::UnknownEvent, id);
  return it->second;
}

const Event* TimelineGraph::find_by_index(int index) const {
  for (const auto& [id, ev] : events_) {
    if (ev.index == index) return &ev;
  }
  return nullptr;
}

std::vector<std::string> TimelineGraph::event_ids() const {
  std::vector<const Event*> evs;
  evs.reserve(events_.size());
  for (const auto& [id, ev] : events_) evs.push_back(&ev);
  std::sort(evs.begin(), evs.end(), [](const Event* a, const Event* b) {
    if (a->index != b->index) return a->index < b->index;
    return a->id < b->id;
  });
  std::vector<std::string> ids;
  ids.reserve(evs.size());
  for (const Event* ev : evs) ids.push_back(ev->id);
  return ids;
}

void TimelineGraph::add_edge(const std::string& before, const std::string& after) {
  if (!has_event(before)) fail(ErrorKind::UnknownEvent, before);
  if (!has_event(after)) fail(ErrorKind::UnknownEvent, after);
  if (before == after) return;
  edges_.emplace(before, after);
}

void TimelineGraph::add_coex(const std::string& a, const std::string& b) {
  if (!has_event(a)) fail(ErrorKind::UnknownEvent, a);
  if (!has_event(b)) fail(ErrorKind::UnknownEvent, b);
  if (a == b) return;
  coex_.emplace(std::min(a, b), std::max(a, b));
}

std::vector<std::vector<std::string>> TimelineGraph::coex_clusters() const {
  std::map<std::string, std::string> parent;
  auto find = [&](std::string x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : coex_) {
    parent.try_emplace(a, a);
    parent.try_emplace(b, b);
    const auto ra = find(a);
    const auto rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& [node, _] : parent) groups[find(node)].push_back(node);
  std::vector<std::vector<std::string>> clusters;
  for (auto& [root, members] : groups) {
    std::sort(members.begin(), members.end());
    clusters.push_back(std::move(members));
  }
  return clusters;
}

bool TimelineGraph::weakly_connected() const {
  if (events_.size() <= 1) return true;
  std::map<std::string, std::vector<std::string>> adj;
  auto link = [&](const std::string& a, const std::string& b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (const auto& [a, b] : edges_) link(a, b);
  for (const auto& [a, b] : coex_) link(a, b);

  std::set<std::string> seen;
  std::deque<std::string> queue{events_.begin()->first};
  seen.insert(events_.begin()->first);
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    for (const auto& next : adj[node]) {
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return seen.size() == events_.size();
}

namespace {

std::map<std::string, std::vector<std::string>> successors(const TimelineGraph& g) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& id : g.event_ids()) adj[id];
  for (const auto& [a, b] : g.edges()) adj[a].push_back(b);
  return adj;
}

std::set<std::string> reachable_from(
    const std::string& start,
    const std::map<std::string, std::vector<std::string>>& adj) {
  std::set<std::string> seen;
  std::deque<std::string> queue{start};
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    auto it = adj.find(node);
    if (it == adj.end()) continue;
    for (const auto& next : it->second) {
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return seen;
}

std::map<std::string, std::vector<std::string>> cluster_of(const TimelineGraph& g) {
  std::map<std::string, std::vector<std::string>> membership;
  for (const auto& cluster : g.coex_clusters()) {
    for (const auto& id : cluster) membership[id] = cluster;
  }
  return membership;
}

}  // namespace

TimelineGraph expand_coex(const TimelineGraph& graph) {
  TimelineGraph out = graph;
  const auto membership = cluster_of(graph);

  for (const auto& [src, dst] : graph.edges()) {
    const auto src_cluster = membership.find(src);
    const auto dst_cluster = membership.find(dst);
    const bool same_cluster = src_cluster != membership.end() &&
                              dst_cluster != membership.end() &&
                              src_cluster->second.front() == dst_cluster->second.front();
    if (same_cluster) continue;  // intra-cluster precedence stays as annotated

    // An edge between clusters orders every member pair; expanding the full
    // product at once makes the rewrite a fixpoint.
    const std::vector<std::string> from =
        src_cluster == membership.end() ? std::vector<std::string>{src}
                                        : src_cluster->second;
    const std::vector<std::string> to = dst_cluster == membership.end()
                                            ? std::vector<std::string>{dst}
                                            : dst_cluster->second;
    for (const auto& a : from) {
      for (const auto& b : to) {
        if (a != b) out.add_edge(a, b);
      }
    }
  }
  return out;
}

ClosurePairSet transitive_closure(const TimelineGraph& graph) {
  ClosurePairSet closure;
  const auto adj = successors(graph);
  for (const auto& id : graph.event_ids()) {
    for (const auto& target : reachable_from(id, adj)) {
      if (target != id) closure.before_pairs.emplace(id, target);
    }
  }
  for (const auto& cluster : graph.coex_clusters()) {
    for (std::size_t i = 0; i < cluster.size(); ++i) {
      for (std::size_t j = i + 1; j < cluster.size(); ++j) {
        closure.coex_pairs.emplace(cluster[i], cluster[j]);
      }
    }
  }
  return closure;
}

std::vector<std::vector<std::string>> detect_cycles(const TimelineGraph& graph) {
  // Tarjan SCC; every SCC with >= 2 vertices contains a cycle, reported as a
  // deterministic walk through smallest in-SCC successors.
  const auto adj = successors(graph);
  std::map<std::string, int> index, low;
  std::map<std::string, bool> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> sccs;
  int counter = 0;

  struct Frame {
    std::string node;
    std::size_t next_child = 0;
  };

  for (const auto& start : graph.event_ids()) {
    if (index.count(start)) continue;
    std::vector<Frame> frames{{start}};
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!frames.empty()) {
      auto& frame = frames.back();
      const auto& children = adj.at(frame.node);
      if (frame.next_child < children.size()) {
        const auto& child = children[frame.next_child++];
        if (!index.count(child)) {
          index[child] = low[child] = counter++;
          stack.push_back(child);
          on_stack[child] = true;
          frames.push_back({child});
        } else if (on_stack[child]) {
          low[frame.node] = std::min(low[frame.node], index[child]);
        }
      } else {
        if (low[frame.node] == index[frame.node]) {
          std::vector<std::string> scc;
          while (true) {
            const auto top = stack.back();
            stack.pop_back();
            on_stack[top] = false;
            scc.push_back(top);
            if (top == frame.node) break;
          }
          if (scc.size() > 1) sccs.push_back(std::move(scc));
        }
        const auto done = frame.node;
        frames.pop_back();
        if (!frames.empty()) {
          low[frames.back().node] = std::min(low[frames.back().node], low[done]);
        }
      }
    }
  }

  std::vector<std::vector<std::string>> cycles;
  for (auto& scc : sccs) {
    std::sort(scc.begin(), scc.end());
    const std::set<std::string> members(scc.begin(), scc.end());
    // Walk smallest in-SCC successors until a vertex repeats.
    std::vector<std::string> walk{scc.front()};
    std::map<std::string, std::size_t> seen_at{{scc.front(), 0}};
    while (true) {
      std::string next;
      for (const auto& cand : adj.at(walk.back())) {
        if (members.count(cand) && (next.empty() || cand < next)) next = cand;
      }
      auto it = seen_at.find(next);
      if (it != seen_at.end()) {
        cycles.emplace_back(walk.begin() + it->second, walk.end());
        break;
      }
      seen_at[next] = walk.size();
      walk.push_back(next);
    }
  }
  std::sort(cycles.begin(), cycles.end());
  return cycles;
}

std::vector<std::vector<std::string>> layering(const TimelineGraph& graph) {
  const TimelineGraph expanded = expand_coex(graph);
  if (!detect_cycles(expanded).empty()) {
    fail(ErrorKind::CyclicGraph, "layering requires an acyclic graph after COEX expansion");
  }

  std::map<std::string, std::vector<std::string>> preds;
  std::map<std::string, std::size_t> out_count;
  for (const auto& id : expanded.event_ids()) {
    preds[id];
    out_count[id] = 0;
  }
  for (const auto& [a, b] : expanded.edges()) {
    preds[b].push_back(a);
    ++out_count[a];
  }

  // Longest-path depth via reverse topological order (Kahn on in-degrees).
  std::map<std::string, std::size_t> in_count;
  for (const auto& [id, ps] : preds) in_count[id] = ps.size();
  std::deque<std::string> ready;
  for (const auto& id : expanded.event_ids()) {
    if (in_count[id] == 0) ready.push_back(id);
  }
  std::map<std::string, int> level;
  std::map<std::string, std::vector<std::string>> succs;
  for (const auto& [a, b] : expanded.edges()) succs[a].push_back(b);
  while (!ready.empty()) {
    const auto node = ready.front();
    ready.pop_front();
    int depth = 1;
    for (const auto& p : preds[node]) depth = std::max(depth, level[p] + 1);
    level[node] = depth;
    for (const auto& next : succs[node]) {
      if (--in_count[next] == 0) ready.push_back(next);
    }
  }

  int max_level = 0;
  for (const auto& [id, lv] : level) max_level = std::max(max_level, lv);
  std::vector<std::vector<std::string>> layers(static_cast<std::size_t>(max_level));
  for (const auto& id : expanded.event_ids()) {  // textual order within layers
    layers[static_cast<std::size_t>(level[id] - 1)].push_back(id);
  }
  return layers;
}

RelationLabel pairwise_relation(const TimelineGraph& graph, const std::string& x,
                                const std::string& y) {
  if (!graph.has_event(x)) fail(ErrorKind::UnknownEvent, x);
  if (!graph.has_event(y)) fail(ErrorKind::UnknownEvent, y);
  const auto adj = successors(graph);
  const bool xy = reachable_from(x, adj).count(y) > 0;
  const bool yx = reachable_from(y, adj).count(x) > 0;
  if (xy && !yx) return RelationLabel::Before;
  if (yx && !xy) return RelationLabel::After;
  if (!xy && !yx) {
    for (const auto& cluster : graph.coex_clusters()) {
      const bool has_x = std::find(cluster.begin(), cluster.end(), x) != cluster.end();
      const bool has_y = std::find(cluster.begin(), cluster.end(), y) != cluster.end();
      if (has_x && has_y) return RelationLabel::Coex;
    }
  }
  return RelationLabel::None;
}

}  // namespace timeset
