#pragma once

// Labeled Petri nets with plain (weight 1) arcs, token-game semantics and the
// event-net / product-net constructions used by alignment search.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "uconf/error.hpp"

namespace uconf {

using Label = std::string;
using LabelSequence = std::vector<Label>;

inline constexpr std::string_view kTauSymbol = "tau";
inline constexpr std::string_view kSkipSymbol = ">>";

struct Transition {
  std::string id;
  std::optional<Label> label;  // nullopt: invisible
  std::vector<std::size_t> preset;
  std::vector<std::size_t> postset;

  [[nodiscard]] bool visible() const noexcept { return label.has_value(); }
};

/// A place/transition net with a partial labeling. Places and transitions are
/// addressed by dense indices; string ids are kept for I/O and diagnostics.
class PetriNet {
 public:
  std::size_t add_place(std::string id) {
    check_fresh(id);
    place_index_.emplace(id, places_.size());
    places_.push_back(std::move(id));
    return places_.size() - 1;
  }

  std::size_t add_transition(std::string id, std::optional<Label> label) {
    check_fresh(id);
    if (label && *label == kTauSymbol) {
      throw DomainError("transition '" + id + "' uses the reserved label 'tau'; leave it unlabeled instead");
    }
    transition_index_.emplace(id, transitions_.size());
    transitions_.push_back(Transition{std::move(id), std::move(label), {}, {}});
    return transitions_.size() - 1;
  }

  /// Adds a place->transition or transition->place arc, by id.
  void add_arc(std::string_view from, std::string_view to) {
    if (auto p = find_place(from)) {
      auto t = find_transition(to);
      if (!t) throw DomainError("arc " + std::string(from) + "->" + std::string(to) + ": unknown transition");
      add_input(*p, *t);
      return;
    }
    if (auto t = find_transition(from)) {
      auto p = find_place(to);
      if (!p) throw DomainError("arc " + std::string(from) + "->" + std::string(to) + ": unknown place");
      add_output(*t, *p);
      return;
    }
    throw DomainError("arc " + std::string(from) + "->" + std::string(to) + ": unknown source");
  }

  void add_input(std::size_t place, std::size_t transition) {
    insert_sorted(transitions_.at(transition).preset, place);
  }
  void add_output(std::size_t transition, std::size_t place) {
    insert_sorted(transitions_.at(transition).postset, place);
  }

  [[nodiscard]] std::size_t place_count() const noexcept { return places_.size(); }
  [[nodiscard]] std::size_t transition_count() const noexcept { return transitions_.size(); }
  [[nodiscard]] const std::vector<std::string>& places() const noexcept { return places_; }
  [[nodiscard]] const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  [[nodiscard]] const std::string& place(std::size_t i) const { return places_.at(i); }
  [[nodiscard]] const Transition& transition(std::size_t i) const { return transitions_.at(i); }

  [[nodiscard]] std::optional<std::size_t> find_place(std::string_view id) const {
    auto it = place_index_.find(std::string(id));
    if (it == place_index_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] std::optional<std::size_t> find_transition(std::string_view id) const {
    auto it = transition_index_.find(std::string(id));
    if (it == transition_index_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] std::size_t transition_index(std::string_view id) const {
    auto t = find_transition(id);
    if (!t) throw DomainError("unknown transition '" + std::string(id) + "'");
    return *t;
  }
  [[nodiscard]] std::size_t place_index(std::string_view id) const {
    auto p = find_place(id);
    if (!p) throw DomainError("unknown place '" + std::string(id) + "'");
    return *p;
  }

  /// Number of (place, transition) and (transition, place) arcs.
  [[nodiscard]] std::size_t arc_count() const noexcept {
    std::size_t n = 0;
    for (const auto& t : transitions_) n += t.preset.size() + t.postset.size();
    return n;
  }

  /// Visible labels, sorted and unique.
  [[nodiscard]] std::vector<Label> visible_labels() const {
    std::set<Label> labels;
    for (const auto& t : transitions_)
      if (t.label) labels.insert(*t.label);
    return {labels.begin(), labels.end()};
  }

  friend bool operator==(const PetriNet& a, const PetriNet& b) {
    if (a.places_ != b.places_ || a.transitions_.size() != b.transitions_.size()) return false;
    for (std::size_t i = 0; i < a.transitions_.size(); ++i) {
      const auto& x = a.transitions_[i];
      const auto& y = b.transitions_[i];
      if (x.id != y.id || x.label != y.label || x.preset != y.preset || x.postset != y.postset) return false;
    }
    return true;
  }

 private:
  void check_fresh(const std::string& id) const {
    if (id.empty()) throw DomainError("empty node identifier");
    if (place_index_.contains(id) || transition_index_.contains(id))
      throw DomainError("duplicate node identifier '" + id + "'");
  }
  static void insert_sorted(std::vector<std::size_t>& v, std::size_t x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
  }

  std::vector<std::string> places_;
  std::vector<Transition> transitions_;
  std::unordered_map<std::string, std::size_t> place_index_;
  std::unordered_map<std::string, std::size_t> transition_index_;
};

/// Multiset of places, stored densely as one count per place of the owning net.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t place_count) : counts_(place_count, 0) {}
  explicit Marking(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {}

  /// Builds a marking from place ids; repeated ids add tokens.
  static Marking of(const PetriNet& net, std::initializer_list<std::string_view> places) {
    Marking m(net.place_count());
    for (auto p : places) ++m.counts_[net.place_index(p)];
    return m;
  }

  [[nodiscard]] std::uint32_t operator[](std::size_t place) const { return counts_.at(place); }
  [[nodiscard]] std::uint32_t& operator[](std::size_t place) { return counts_.at(place); }
  [[nodiscard]] std::size_t size() const noexcept { return counts_.size(); }
  [[nodiscard]] std::span<const std::uint32_t> counts() const noexcept { return counts_; }

  [[nodiscard]] std::uint64_t total() const noexcept {
    std::uint64_t n = 0;
    for (auto c : counts_) n += c;
    return n;
  }

  friend bool operator==(const Marking&, const Marking&) = default;
  friend auto operator<=>(const Marking&, const Marking&) = default;

  [[nodiscard]] std::size_t hash() const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto c : counts_) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }

 private:
  std::vector<std::uint32_t> counts_;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept { return m.hash(); }
};

struct SystemNet {
  PetriNet net;
  Marking initial_marking;
  Marking final_marking;

  friend bool operator==(const SystemNet&, const SystemNet&) = default;
};

/// Checks the SystemNet invariants: nonempty node sets and markings over the net's places.
inline void validate(const SystemNet& sn) {
  if (sn.net.place_count() == 0) throw DomainError("net has no places");
  if (sn.net.transition_count() == 0) throw DomainError("net has no transitions");
  if (sn.initial_marking.size() != sn.net.place_count() || sn.final_marking.size() != sn.net.place_count())
    throw DomainError("marking does not range over the net's places");
}

namespace detail {
inline const Transition& checked_transition(const PetriNet& net, std::size_t t) {
  if (t >= net.transition_count()) throw DomainError("unknown transition index " + std::to_string(t));
  return net.transition(t);
}
}  // namespace detail

[[nodiscard]] inline bool enabled(const PetriNet& net, const Marking& m, std::size_t t) {
  const auto& tr = detail::checked_transition(net, t);
  return std::all_of(tr.preset.begin(), tr.preset.end(), [&](std::size_t p) { return m[p] >= 1; });
}

[[nodiscard]] inline bool enabled(const PetriNet& net, const Marking& m, std::string_view t) {
  return enabled(net, m, net.transition_index(t));
}

[[nodiscard]] inline Marking fire(const PetriNet& net, const Marking& m, std::size_t t) {
  if (!enabled(net, m, t)) throw PreconditionError("transition '" + net.transition(t).id + "' is not enabled");
  Marking next = m;
  const auto& tr = net.transition(t);
  for (auto p : tr.preset) --next[p];
  for (auto p : tr.postset) ++next[p];
  return next;
}

[[nodiscard]] inline Marking fire(const PetriNet& net, const Marking& m, std::string_view t) {
  return fire(net, m, net.transition_index(t));
}

/// Sequence-shaped net replaying exactly `trace`: places p1..p{n+1}, transitions t1..tn.
/// Empty traces are rejected.
[[nodiscard]] inline SystemNet event_net(std::span<const Label> trace) {
  if (trace.empty()) throw DomainError("event net of an empty trace");
  PetriNet net;
  for (std::size_t i = 1; i <= trace.size() + 1; ++i) net.add_place("p" + std::to_string(i));
  for (std::size_t i = 1; i <= trace.size(); ++i) {
    auto t = net.add_transition("t" + std::to_string(i), trace[i - 1]);
    net.add_input(i - 1, t);
    net.add_output(t, i);
  }
  Marking init(net.place_count());
  Marking fin(net.place_count());
  init[0] = 1;
  fin[trace.size()] = 1;
  return SystemNet{std::move(net), std::move(init), std::move(fin)};
}

[[nodiscard]] inline SystemNet event_net(std::initializer_list<Label> trace) {
  LabelSequence v(trace);
  return event_net(std::span<const Label>(v));
}

/// Origin of a product transition: index into the left and/or right component.
struct ProductOrigin {
  std::optional<std::size_t> left;
  std::optional<std::size_t> right;
};

/// Synchronous product of two system nets plus the origin of every transition.
struct ProductNet {
  SystemNet system;
  std::vector<ProductOrigin> origins;  // parallel to system.net.transitions()
  std::size_t left_place_count = 0;    // left places occupy [0, left_place_count)
};

inline constexpr std::string_view kLeftTag = "L:";
inline constexpr std::string_view kRightTag = "R:";

/// Places are qualified "L:<id>" / "R:<id>"; transitions are "(L:x,>>)", "(>>,R:y)" and
/// "(L:x,R:y)", the last for each pair of transitions carrying equal visible labels.
/// Transition order: left moves, right moves, then synchronous pairs (left-major).
[[nodiscard]] inline ProductNet product_net(const SystemNet& left, const SystemNet& right) {
  ProductNet out;
  auto& net = out.system.net;
  const auto& l = left.net;
  const auto& r = right.net;
  for (const auto& p : l.places()) net.add_place(std::string(kLeftTag) + p);
  for (const auto& p : r.places()) net.add_place(std::string(kRightTag) + p);
  const std::size_t offset = l.place_count();
  out.left_place_count = offset;

  auto add = [&](std::string id, std::optional<Label> label, ProductOrigin origin) {
    auto t = net.add_transition(std::move(id), std::move(label));
    if (origin.left)
      for (auto p : l.transition(*origin.left).preset) net.add_input(p, t);
    if (origin.left)
      for (auto p : l.transition(*origin.left).postset) net.add_output(t, p);
    if (origin.right)
      for (auto p : r.transition(*origin.right).preset) net.add_input(p + offset, t);
    if (origin.right)
      for (auto p : r.transition(*origin.right).postset) net.add_output(t, p + offset);
    out.origins.push_back(origin);
  };

  const std::string skip(kSkipSymbol);
  for (std::size_t i = 0; i < l.transition_count(); ++i) {
    const auto& t = l.transition(i);
    add("(" + std::string(kLeftTag) + t.id + "," + skip + ")", t.label, {i, std::nullopt});
  }
  for (std::size_t j = 0; j < r.transition_count(); ++j) {
    const auto& t = r.transition(j);
    add("(" + skip + "," + std::string(kRightTag) + t.id + ")", t.label, {std::nullopt, j});
  }
  for (std::size_t i = 0; i < l.transition_count(); ++i) {
    const auto& a = l.transition(i);
    if (!a.label) continue;
    for (std::size_t j = 0; j < r.transition_count(); ++j) {
      const auto& b = r.transition(j);
      if (b.label && *a.label == *b.label)
        add("(" + std::string(kLeftTag) + a.id + "," + std::string(kRightTag) + b.id + ")", a.label, {i, j});
    }
  }

  auto concat = [&](const Marking& a, const Marking& b) {
    std::vector<std::uint32_t> counts(a.counts().begin(), a.counts().end());
    counts.insert(counts.end(), b.counts().begin(), b.counts().end());
    return Marking(std::move(counts));
  };
  out.system.initial_marking = concat(left.initial_marking, right.initial_marking);
  out.system.final_marking = concat(left.final_marking, right.final_marking);
  return out;
}

struct LanguageOptions {
  /// Longest firing sequence explored along any branch, visible or not.
  std::size_t firing_cap = 10'000;
};

/// Visible label sequences of complete firing sequences (initial to final marking)
/// with at most `max_len` visible steps. Throws ResourceError when a branch exceeds the cap.
[[nodiscard]] inline std::set<LabelSequence> language(const SystemNet& sn, std::size_t max_len,
                                                      LanguageOptions options = {}) {
  std::set<LabelSequence> result;
  struct State {
    Marking marking;
    LabelSequence prefix;
    bool operator==(const State&) const = default;
  };
  struct StateHash {
    std::size_t operator()(const State& s) const noexcept {
      std::size_t h = s.marking.hash();
      for (const auto& l : s.prefix) h = h * 31 + std::hash<std::string>{}(l);
      return h;
    }
  };
  std::unordered_set<State, StateHash> seen;
  const auto& net = sn.net;

  std::function<void(const Marking&, LabelSequence&, std::size_t)> explore =
      [&](const Marking& m, LabelSequence& prefix, std::size_t depth) {
        if (!seen.insert(State{m, prefix}).second) return;
        if (m == sn.final_marking) result.insert(prefix);
        for (std::size_t t = 0; t < net.transition_count(); ++t) {
          if (!enabled(net, m, t)) continue;
          const auto& tr = net.transition(t);
          if (tr.label && prefix.size() >= max_len) continue;
          if (depth + 1 > options.firing_cap)
            throw ResourceError("language exploration exceeded the firing cap of " +
                                std::to_string(options.firing_cap) + " firings per branch");
          auto next = fire(net, m, t);
          if (tr.label) prefix.push_back(*tr.label);
          explore(next, prefix, depth + 1);
          if (tr.label) prefix.pop_back();
        }
      };
  LabelSequence prefix;
  explore(sn.initial_marking, prefix, 0);
  return result;
}

}  // namespace uconf
