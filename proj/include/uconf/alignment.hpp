#pragma once

// Optimal alignments by uniform-cost search over the reachable markings of the
// product of a log-side net (event net or behavior net) and a model, and the lower
// and upper bounds on the alignment cost of an uncertain trace.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "uconf/behavior.hpp"
#include "uconf/error.hpp"
#include "uconf/petri.hpp"
#include "uconf/uncertain.hpp"

namespace uconf {

using Cost = std::int64_t;

/// One side of a move: the fired transition and its label (nullopt for tau).
struct MoveSide {
  std::string transition;
  std::optional<Label> label;

  friend bool operator==(const MoveSide&, const MoveSide&) = default;
};

enum class MoveKind : std::uint8_t { synchronous, invisible, model, log };

struct Move {
  std::optional<MoveSide> log;    // nullopt: ">>"
  std::optional<MoveSide> model;  // nullopt: ">>"

  [[nodiscard]] MoveKind kind() const {
    if (log && model) return MoveKind::synchronous;
    const auto& side = log ? *log : *model;
    if (!side.label) return MoveKind::invisible;
    return log ? MoveKind::log : MoveKind::model;
  }

  friend bool operator==(const Move&, const Move&) = default;
};

/// Move costs. Synchronous moves and moves on invisible transitions are always free.
struct CostFunction {
  Cost log_move = 1;
  Cost model_move = 1;
  std::map<Label, Cost> log_move_by_label;
  std::map<Label, Cost> model_move_by_label;

  /// Unit costs for one-sided visible moves.
  static CostFunction standard() { return {}; }

  [[nodiscard]] Cost operator()(const Move& m) const {
    switch (m.kind()) {
      case MoveKind::synchronous:
      case MoveKind::invisible:
        return 0;
      case MoveKind::log: {
        auto it = log_move_by_label.find(*m.log->label);
        return it == log_move_by_label.end() ? log_move : it->second;
      }
      case MoveKind::model: {
        auto it = model_move_by_label.find(*m.model->label);
        return it == model_move_by_label.end() ? model_move : it->second;
      }
    }
    return 0;
  }

  void validate() const {
    bool negative = log_move < 0 || model_move < 0;
    for (const auto& [_, c] : log_move_by_label) negative = negative || c < 0;
    for (const auto& [_, c] : model_move_by_label) negative = negative || c < 0;
    if (negative) throw DomainError("move costs must be nonnegative");
  }
};

struct Alignment {
  std::vector<Move> moves;
  Cost cost = 0;

  /// Visible labels on the log side, in order.
  [[nodiscard]] LabelSequence log_projection() const {
    LabelSequence out;
    for (const auto& m : moves)
      if (m.log && m.log->label) out.push_back(*m.log->label);
    return out;
  }

  /// Model transitions fired, in order (a complete firing sequence of the model).
  [[nodiscard]] std::vector<std::string> model_firing_sequence() const {
    std::vector<std::string> out;
    for (const auto& m : moves)
      if (m.model) out.push_back(m.model->transition);
    return out;
  }

  [[nodiscard]] Cost recompute_cost(const CostFunction& cost_fn) const {
    Cost c = 0;
    for (const auto& m : moves) c += cost_fn(m);
    return c;
  }
};

struct SearchOptions {
  std::size_t max_states = 5'000'000;
};

namespace detail {

constexpr int rank(MoveKind k) { return static_cast<int>(k); }

}  // namespace detail

/// Minimal-cost alignment between the complete firing sequences of `log_net` and
/// `model`. Ties between equal-cost paths resolve by expanding moves in the order
/// synchronous, invisible, model, log, then by product transition id.
[[nodiscard]] inline Alignment align_nets(const SystemNet& log_net, const SystemNet& model, const CostFunction& cost,
                                          const SearchOptions& options = {}) {
  cost.validate();
  if (model.initial_marking.size() != model.net.place_count() ||
      model.final_marking.size() != model.net.place_count())
    throw DomainError("model markings do not range over the model's places");

  const auto product = product_net(log_net, model);
  const auto& pnet = product.system.net;
  const std::size_t tcount = pnet.transition_count();

  std::vector<Move> move_of(tcount);
  std::vector<Cost> cost_of(tcount);
  for (std::size_t t = 0; t < tcount; ++t) {
    const auto& origin = product.origins[t];
    Move m;
    if (origin.left) {
      const auto& lt = log_net.net.transition(*origin.left);
      m.log = MoveSide{lt.id, lt.label};
    }
    if (origin.right) {
      const auto& rt = model.net.transition(*origin.right);
      m.model = MoveSide{rt.id, rt.label};
    }
    cost_of[t] = cost(m);
    move_of[t] = std::move(m);
  }
  std::vector<std::size_t> expansion(tcount);
  for (std::size_t t = 0; t < tcount; ++t) expansion[t] = t;
  std::sort(expansion.begin(), expansion.end(), [&](std::size_t a, std::size_t b) {
    auto ra = detail::rank(move_of[a].kind()), rb = detail::rank(move_of[b].kind());
    if (ra != rb) return ra < rb;
    return pnet.transition(a).id < pnet.transition(b).id;
  });

  struct Node {
    Marking marking;
    Cost g;
    std::size_t parent;
    std::size_t via;
  };
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<Node> nodes;
  std::unordered_map<Marking, std::size_t, MarkingHash> best;  // marking -> node index
  std::vector<bool> closed;

  using Entry = std::pair<Cost, std::size_t>;  // (g, node); node index doubles as FIFO order
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  nodes.push_back({product.system.initial_marking, 0, kNone, kNone});
  closed.push_back(false);
  best.emplace(nodes[0].marking, 0);
  open.emplace(0, 0);

  while (!open.empty()) {
    auto [g, idx] = open.top();
    open.pop();
    if (closed[idx] || g != nodes[idx].g) continue;
    closed[idx] = true;

    if (nodes[idx].marking == product.system.final_marking) {
      Alignment out;
      out.cost = g;
      for (auto n = idx; nodes[n].parent != kNone; n = nodes[n].parent) out.moves.push_back(move_of[nodes[n].via]);
      std::reverse(out.moves.begin(), out.moves.end());
      return out;
    }

    const Marking m = nodes[idx].marking;
    for (auto t : expansion) {
      const auto& tr = pnet.transition(t);
      bool ok = true;
      for (auto p : tr.preset)
        if (m[p] == 0) {
          ok = false;
          break;
        }
      if (!ok) continue;
      Marking next = m;
      for (auto p : tr.preset) --next[p];
      for (auto p : tr.postset) ++next[p];
      const Cost ng = g + cost_of[t];
      auto it = best.find(next);
      if (it != best.end()) {
        auto& existing = nodes[it->second];
        if (closed[it->second] || existing.g <= ng) continue;
        closed[it->second] = true;  // superseded
      }
      if (nodes.size() >= options.max_states)
        throw ResourceError("alignment search exceeded " + std::to_string(options.max_states) + " states");
      nodes.push_back({next, ng, idx, t});
      closed.push_back(false);
      best.insert_or_assign(std::move(next), nodes.size() - 1);
      open.emplace(ng, nodes.size() - 1);
    }
  }
  throw DomainError("model has empty language: final marking unreachable");
}

namespace detail {

/// Log net of a certain trace; the empty trace gets a single marked place.
inline SystemNet trace_net(const LabelSequence& trace) {
  if (!trace.empty()) return event_net(std::span<const Label>(trace));
  PetriNet net;
  net.add_place("p1");
  Marking m(1);
  m[0] = 1;
  return SystemNet{std::move(net), m, m};
}

}  // namespace detail

[[nodiscard]] inline Alignment optimal_alignment(const LabelSequence& trace, const SystemNet& model,
                                                 const CostFunction& cost = CostFunction::standard(),
                                                 const SearchOptions& options = {}) {
  return align_nets(detail::trace_net(trace), model, cost, options);
}

/// True iff every trace has a zero-cost optimal alignment against the model.
[[nodiscard]] inline bool is_perfectly_fitting(const std::vector<LabelSequence>& log, const SystemNet& model) {
  return std::all_of(log.begin(), log.end(),
                     [&](const auto& trace) { return optimal_alignment(trace, model).cost == 0; });
}

/// Structural hash of a system net, used as the model identity in cache keys.
[[nodiscard]] inline std::uint64_t model_fingerprint(const SystemNet& sn) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  auto mix_str = [&](const std::string& s) { mix(std::hash<std::string>{}(s)); };
  for (const auto& p : sn.net.places()) mix_str(p);
  for (const auto& t : sn.net.transitions()) {
    mix_str(t.id);
    mix(t.label ? std::hash<std::string>{}(*t.label) : 0x7au);
    for (auto p : t.preset) mix(p);
    mix(0xffu);
    for (auto p : t.postset) mix(p);
    mix(0xfeu);
  }
  mix(sn.initial_marking.hash());
  mix(sn.final_marking.hash());
  return h;
}

/// Bounded LRU memo of optimal alignments keyed by (model fingerprint, cost function
/// identity, realization). Safe to share between threads.
class AlignmentCache {
 public:
  explicit AlignmentCache(std::size_t capacity = 100'000) : capacity_(capacity) {}

  [[nodiscard]] std::optional<Alignment> find(const std::string& key) {
    std::lock_guard lock(mutex_);
    auto it = index_.find(key);
    if (it == index_.end()) {
      ++misses_;
      return std::nullopt;
    }
    ++hits_;
    entries_.splice(entries_.begin(), entries_, it->second);
    return it->second->second;
  }

  void insert(const std::string& key, Alignment value) {
    std::lock_guard lock(mutex_);
    if (auto it = index_.find(key); it != index_.end()) {
      entries_.splice(entries_.begin(), entries_, it->second);
      return;
    }
    entries_.emplace_front(key, std::move(value));
    index_.emplace(key, entries_.begin());
    while (entries_.size() > capacity_) {
      index_.erase(entries_.back().first);
      entries_.pop_back();
    }
  }

  [[nodiscard]] std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }
  [[nodiscard]] std::size_t hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
  }
  [[nodiscard]] std::size_t misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
  }

  static std::string key(std::uint64_t model, const CostFunction& cost, const LabelSequence& realization) {
    std::string k = std::to_string(model) + "|" + std::to_string(cost.log_move) + "," + std::to_string(cost.model_move);
    for (const auto& [l, c] : cost.log_move_by_label) k += ";l" + l + "=" + std::to_string(c);
    for (const auto& [l, c] : cost.model_move_by_label) k += ";m" + l + "=" + std::to_string(c);
    k += "|";
    for (const auto& a : realization) {
      k += a;
      k += '\x1f';
    }
    return k;
  }

 private:
  using Entry = std::pair<std::string, Alignment>;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> entries_;
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

struct Bound {
  Cost cost = 0;
  Alignment witness;
};

/// Minimum over realizations of the optimal alignment cost, computed with a single
/// search over the product of the trace's behavior net and the model.
[[nodiscard]] inline Bound lower_bound(const UncertainTrace& trace, const SystemNet& model,
                                       const CostFunction& cost = CostFunction::standard(),
                                       const SearchOptions& options = {}) {
  auto witness = align_nets(behavior_net(trace), model, cost, options);
  auto c = witness.cost;
  return Bound{c, std::move(witness)};
}

struct BoundOptions {
  EnumerationCaps caps{};
  SearchOptions search{};
  AlignmentCache* cache = nullptr;  // optional memo shared across calls
};

/// Maximum over realizations of the optimal alignment cost. The witness is the
/// first maximal realization in enumeration order.
[[nodiscard]] inline Bound upper_bound(const UncertainTrace& trace, const SystemNet& model,
                                       const CostFunction& cost = CostFunction::standard(),
                                       const BoundOptions& options = {}) {
  const auto fingerprint = options.cache ? model_fingerprint(model) : 0;
  std::optional<Bound> best;
  for (const auto& r : realizations(trace, options.caps)) {
    std::optional<Alignment> a;
    std::string key;
    if (options.cache) {
      key = AlignmentCache::key(fingerprint, cost, r);
      a = options.cache->find(key);
    }
    if (!a) {
      a = optimal_alignment(r, model, cost, options.search);
      if (options.cache) options.cache->insert(key, *a);
    }
    if (!best || a->cost > best->cost) best = Bound{a->cost, std::move(*a)};
  }
  return std::move(*best);
}

/// Minimum over explicitly enumerated realizations; the reference for lower_bound.
[[nodiscard]] inline Cost lower_bound_bruteforce(const UncertainTrace& trace, const SystemNet& model,
                                                 const CostFunction& cost = CostFunction::standard(),
                                                 const BoundOptions& options = {}) {
  std::optional<Cost> best;
  for (const auto& r : realizations(trace, options.caps)) {
    auto c = optimal_alignment(r, model, cost, options.search).cost;
    if (!best || c < *best) best = c;
    if (*best == 0) break;
  }
  return *best;
}

struct BoundsReport {
  std::string case_id;
  Cost lower_cost = 0;
  Cost upper_cost = 0;
  Alignment lower_witness;
  Alignment upper_witness;
  std::optional<std::uint64_t> realization_count;  // nullopt when over the cap
  std::optional<std::string> error;                // set when the trace failed
  bool resource_limited = false;                   // error came from a cap
  bool lower_available = false;                    // lower bound computed before any failure

  [[nodiscard]] bool ok() const noexcept { return !error.has_value(); }
};

struct LogBounds {
  std::vector<BoundsReport> reports;
  Cost total_lower = 0;
  Cost total_upper = 0;
};

/// Per-trace bounds plus totals over the traces that succeeded. Per-trace failures
/// are recorded in the report rather than aborting the batch.
[[nodiscard]] inline LogBounds log_bounds(const UncertainLog& log, const SystemNet& model,
                                          const CostFunction& cost = CostFunction::standard(),
                                          const BoundOptions& options = {}) {
  LogBounds out;
  for (const auto& trace : log.traces) {
    BoundsReport report;
    report.case_id = trace.case_id;
    try {
      auto lo = lower_bound(trace, model, cost, options.search);
      report.lower_cost = lo.cost;
      report.lower_witness = std::move(lo.witness);
      report.lower_available = true;
      report.realization_count = realizations(trace, options.caps).size();
      auto hi = upper_bound(trace, model, cost, options);
      report.upper_cost = hi.cost;
      report.upper_witness = std::move(hi.witness);
    } catch (const ResourceError& e) {
      report.error = e.what();
      report.resource_limited = true;
    } catch (const std::exception& e) {
      report.error = e.what();
    }
    if (report.ok()) {
      out.total_lower += report.lower_cost;
      out.total_upper += report.upper_cost;
    }
    out.reports.push_back(std::move(report));
  }
  return out;
}

}  // namespace uconf
