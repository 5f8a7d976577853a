#pragma once

// Behavior graphs (transitively reduced precedence DAGs over a trace's events) and
// behavior nets, whose complete firing sequences are exactly the trace's realizations.

#include <algorithm>
#include <cstddef>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "uconf/error.hpp"
#include "uconf/petri.hpp"
#include "uconf/uncertain.hpp"

namespace uconf {

/// Directed graph over vertices 0..n-1 with a set of edges.
struct Digraph {
  std::size_t vertex_count = 0;
  std::set<std::pair<std::size_t, std::size_t>> edges;

  [[nodiscard]] std::vector<std::vector<std::size_t>> successors() const {
    std::vector<std::vector<std::size_t>> adj(vertex_count);
    for (auto [v, w] : edges) adj.at(v).push_back(w);
    return adj;
  }

  friend bool operator==(const Digraph&, const Digraph&) = default;
};

namespace detail {

inline bool reachable(const std::vector<std::vector<std::size_t>>& adj, std::size_t from, std::size_t to,
                      std::pair<std::size_t, std::size_t> skipped_edge) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : adj[v]) {
      if (std::pair{v, w} == skipped_edge || seen[w]) continue;
      if (w == to) return true;
      seen[w] = true;
      stack.push_back(w);
    }
  }
  return false;
}

inline bool acyclic(const Digraph& g) {
  std::vector<std::size_t> indegree(g.vertex_count, 0);
  for (auto [v, w] : g.edges) ++indegree.at(w);
  auto adj = g.successors();
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < g.vertex_count; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto v = ready.back();
    ready.pop_back();
    ++visited;
    for (auto w : adj[v])
      if (--indegree[w] == 0) ready.push_back(w);
  }
  return visited == g.vertex_count;
}

}  // namespace detail

[[nodiscard]] inline bool is_acyclic(const Digraph& g) { return detail::acyclic(g); }

/// Drops every edge (v,w) for which w stays reachable from v without it.
[[nodiscard]] inline Digraph transitive_reduction(const Digraph& g) {
  for (auto [v, w] : g.edges)
    if (v >= g.vertex_count || w >= g.vertex_count) throw DomainError("edge endpoint out of range");
  if (!detail::acyclic(g)) throw DomainError("transitive reduction requires an acyclic graph");
  const auto adj = g.successors();
  Digraph out{g.vertex_count, {}};
  for (auto edge : g.edges)
    if (!detail::reachable(adj, edge.first, edge.second, edge)) out.edges.insert(edge);
  return out;
}

/// Transitively reduced precedence graph of a trace. Vertex i is events[i], with
/// events sorted by id.
struct BehaviorGraph {
  std::vector<UncertainEvent> events;
  Digraph graph;

  [[nodiscard]] std::set<std::pair<std::string, std::string>> edge_ids() const {
    std::set<std::pair<std::string, std::string>> out;
    for (auto [v, w] : graph.edges) out.emplace(events[v].id, events[w].id);
    return out;
  }
};

[[nodiscard]] inline BehaviorGraph behavior_graph(const UncertainTrace& trace) {
  BehaviorGraph bg{trace.sorted_events(), {}};
  const auto n = bg.events.size();
  Digraph order{n, {}};
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w = 0; w < n; ++w)
      if (precedes(bg.events[v], bg.events[w])) order.edges.emplace(v, w);
  bg.graph = transitive_reduction(order);
  return bg;
}

/// All topological sortings as event-id sequences, smallest available id first.
[[nodiscard]] inline std::vector<EventIdSequence> topological_sortings(const BehaviorGraph& bg,
                                                                       const EnumerationCaps& caps = {}) {
  const auto n = bg.events.size();
  if (n > caps.max_events)
    throw ResourceError("behavior graph has " + std::to_string(n) + " vertices, above the enumeration cap of " +
                        std::to_string(caps.max_events));
  std::vector<std::size_t> indegree(n, 0);
  for (auto [v, w] : bg.graph.edges) ++indegree[w];
  const auto adj = bg.graph.successors();
  std::vector<bool> used(n, false);
  EventIdSequence current;
  std::vector<EventIdSequence> out;

  auto recurse = [&](auto&& self) -> void {
    if (current.size() == n) {
      out.push_back(current);
      return;
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (used[v] || indegree[v] != 0) continue;
      used[v] = true;
      current.push_back(bg.events[v].id);
      for (auto w : adj[v]) --indegree[w];
      self(self);
      for (auto w : adj[v]) ++indegree[w];
      current.pop_back();
      used[v] = false;
    }
  };
  recurse(recurse);
  return out;
}

inline constexpr std::string_view kArrow = "\xE2\x86\x92";  // U+2192

/// Behavior net of a trace. Places: "start→v" for source vertices, "v→w" per edge,
/// "v→end" for sink vertices. Transitions: "v:a" per activity a of v (label a) and
/// "v:tau" (unlabeled) for indeterminate v. Every transition of v consumes from all of
/// v's input places and produces into all of v's output places.
[[nodiscard]] inline SystemNet behavior_net(const BehaviorGraph& bg) {
  const auto n = bg.events.size();
  const std::string arrow(kArrow);
  std::vector<std::vector<std::string>> inputs(n), outputs(n);
  PetriNet net;
  std::vector<std::string> start_places, end_places;

  std::vector<bool> has_pred(n, false), has_succ(n, false);
  for (auto [v, w] : bg.graph.edges) {
    has_succ[v] = true;
    has_pred[w] = true;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!has_pred[v]) {
      auto p = "start" + arrow + bg.events[v].id;
      net.add_place(p);
      inputs[v].push_back(p);
      start_places.push_back(p);
    }
  }
  for (auto [v, w] : bg.graph.edges) {
    auto p = bg.events[v].id + arrow + bg.events[w].id;
    net.add_place(p);
    outputs[v].push_back(p);
    inputs[w].push_back(p);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!has_succ[v]) {
      auto p = bg.events[v].id + arrow + "end";
      net.add_place(p);
      outputs[v].push_back(p);
      end_places.push_back(p);
    }
  }

  for (std::size_t v = 0; v < n; ++v) {
    const auto& e = bg.events[v];
    auto connect = [&](const std::string& tid) {
      for (const auto& p : inputs[v]) net.add_arc(p, tid);
      for (const auto& p : outputs[v]) net.add_arc(tid, p);
    };
    for (const auto& a : e.activities) {
      auto tid = e.id + ":" + a;
      net.add_transition(tid, a);
      connect(tid);
    }
    if (e.indeterminate()) {
      auto tid = e.id + ":" + std::string(kTauSymbol);
      net.add_transition(tid, std::nullopt);
      connect(tid);
    }
  }

  Marking init(net.place_count()), fin(net.place_count());
  for (const auto& p : start_places) init[net.place_index(p)] = 1;
  for (const auto& p : end_places) fin[net.place_index(p)] = 1;
  return SystemNet{std::move(net), std::move(init), std::move(fin)};
}

[[nodiscard]] inline SystemNet behavior_net(const UncertainTrace& trace) { return behavior_net(behavior_graph(trace)); }

/// Graphviz rendering; indeterminate events are dashed.
[[nodiscard]] inline std::string to_dot(const BehaviorGraph& bg) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream os;
  os << "digraph behavior_graph {\n";
  for (const auto& e : bg.events) {
    std::string label;
    if (e.activities.size() == 1) {
      label = *e.activities.begin();
    } else {
      label = "{";
      bool first = true;
      for (const auto& a : e.activities) {
        label += (first ? "" : ", ") + a;
        first = false;
      }
      label += "}";
    }
    os << "  " << quote(e.id) << " [label=" << quote(label) << ", xlabel=" << quote(e.id)
       << (e.indeterminate() ? ", style=dashed" : "") << "];\n";
  }
  for (const auto& [v, w] : bg.edge_ids()) os << "  " << quote(v) << " -> " << quote(w) << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace uconf
