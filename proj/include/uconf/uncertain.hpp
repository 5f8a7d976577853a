#pragma once

// Simple uncertain events, traces and logs: activity sets, timestamp intervals and
// indeterminacy, plus brute-force enumeration of order-realizations and realizations.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "uconf/error.hpp"
#include "uconf/petri.hpp"

namespace uconf {

/// Instant on the UTC time line, in nanoseconds since the Unix epoch.
struct Timestamp {
  std::int64_t ns = 0;

  static constexpr Timestamp from_seconds(std::int64_t s) { return Timestamp{s * 1'000'000'000}; }
  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

enum class Indeterminacy : std::uint8_t {
  determinate,    // "!"
  indeterminate,  // "?"
};

struct UncertainEvent {
  std::string id;
  std::set<Label> activities;
  Timestamp t_min;
  Timestamp t_max;
  Indeterminacy indeterminacy = Indeterminacy::determinate;

  [[nodiscard]] bool indeterminate() const noexcept { return indeterminacy == Indeterminacy::indeterminate; }
  [[nodiscard]] bool certain() const noexcept {
    return activities.size() == 1 && t_min == t_max && !indeterminate();
  }

  friend bool operator==(const UncertainEvent&, const UncertainEvent&) = default;
};

/// Builds a certain event: one activity, a point timestamp, determinate.
inline UncertainEvent certain_event(std::string id, Label activity, Timestamp t) {
  return UncertainEvent{std::move(id), {std::move(activity)}, t, t, Indeterminacy::determinate};
}

inline void validate(const UncertainEvent& e) {
  if (e.id.empty()) throw ValidationError("event with empty id");
  if (e.activities.empty()) throw ValidationError("event '" + e.id + "' has an empty activity set");
  if (e.t_min > e.t_max) throw ValidationError("event '" + e.id + "' has t_min > t_max");
  if (e.activities.contains(Label(kTauSymbol)))
    throw ValidationError("event '" + e.id + "' uses the reserved activity 'tau'");
}

/// Events form a set keyed by id; the stored order carries no meaning.
struct UncertainTrace {
  std::string case_id;
  std::vector<UncertainEvent> events;

  [[nodiscard]] std::size_t size() const noexcept { return events.size(); }

  /// Events sorted by id, the canonical order used for enumeration and comparison.
  [[nodiscard]] std::vector<UncertainEvent> sorted_events() const {
    auto v = events;
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return v;
  }

  friend bool operator==(const UncertainTrace& a, const UncertainTrace& b) {
    return a.case_id == b.case_id && a.sorted_events() == b.sorted_events();
  }
};

struct UncertainLog {
  std::vector<UncertainTrace> traces;

  friend bool operator==(const UncertainLog&, const UncertainLog&) = default;
};

inline void validate(const UncertainTrace& trace) {
  if (trace.events.empty()) throw ValidationError("trace '" + trace.case_id + "' has no events");
  std::set<std::string> ids;
  for (const auto& e : trace.events) {
    validate(e);
    if (!ids.insert(e.id).second) throw ValidationError("duplicate event id '" + e.id + "'");
  }
}

inline void validate(const UncertainLog& log) {
  std::set<std::string> ids;
  for (const auto& t : log.traces) {
    validate(t);
    for (const auto& e : t.events)
      if (!ids.insert(e.id).second) throw ValidationError("duplicate event id '" + e.id + "'");
  }
}

/// Strict partial order over uncertain events: e certainly happened before e2.
[[nodiscard]] constexpr bool precedes(const UncertainEvent& e, const UncertainEvent& e2) noexcept {
  return e.t_max < e2.t_min;
}

struct EnumerationCaps {
  std::size_t max_events = 12;
  std::size_t max_realizations = 1'000'000;

  /// Defaults, overridden by UNCERTAIN_CONFORM_CAP="<events>" or "<events>,<realizations>".
  static EnumerationCaps from_environment() {
    EnumerationCaps caps;
    if (const char* env = std::getenv("UNCERTAIN_CONFORM_CAP")) {
      std::string s(env);
      auto comma = s.find(',');
      try {
        caps.max_events = std::stoull(s.substr(0, comma));
        if (comma != std::string::npos) caps.max_realizations = std::stoull(s.substr(comma + 1));
      } catch (const std::exception&) {
        throw DomainError("UNCERTAIN_CONFORM_CAP must be '<events>' or '<events>,<realizations>', got '" + s + "'");
      }
    }
    return caps;
  }
};

namespace detail {

inline void check_event_cap(const UncertainTrace& trace, const EnumerationCaps& caps) {
  if (trace.size() > caps.max_events)
    throw ResourceError("trace '" + trace.case_id + "' has " + std::to_string(trace.size()) +
                        " events, above the enumeration cap of " + std::to_string(caps.max_events));
}

/// Visits every linear extension of the precedence order over `events`, choosing
/// among currently minimal events in index order. Indices refer to `events`.
/// Throws ResourceError after `max_orders` extensions.
template <typename Visit>
void for_each_linear_extension(const std::vector<UncertainEvent>& events, std::size_t max_orders,
                               const std::string& case_id, Visit&& visit) {
  std::size_t visited = 0;
  const std::size_t n = events.size();
  std::vector<std::size_t> pending_preds(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (precedes(events[j], events[i])) ++pending_preds[i];
  std::vector<bool> used(n, false);
  std::vector<std::size_t> order;
  order.reserve(n);

  auto recurse = [&](auto&& self) -> void {
    if (order.size() == n) {
      if (++visited > max_orders)
        throw ResourceError("trace '" + case_id + "' has more than " + std::to_string(max_orders) +
                            " order-realizations");
      visit(static_cast<const std::vector<std::size_t>&>(order));
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i] || pending_preds[i] != 0) continue;
      used[i] = true;
      order.push_back(i);
      for (std::size_t j = 0; j < n; ++j)
        if (precedes(events[i], events[j])) --pending_preds[j];
      self(self);
      for (std::size_t j = 0; j < n; ++j)
        if (precedes(events[i], events[j])) ++pending_preds[j];
      order.pop_back();
      used[i] = false;
    }
  };
  recurse(recurse);
}

/// Adds every realization of one order-realization to `out`.
inline void expand_order(const std::vector<UncertainEvent>& events, const std::vector<std::size_t>& order,
                         std::set<LabelSequence>& out, const EnumerationCaps& caps, const std::string& case_id) {
  LabelSequence current;
  auto recurse = [&](auto&& self, std::size_t pos) -> void {
    if (pos == order.size()) {
      out.insert(current);
      if (out.size() > caps.max_realizations)
        throw ResourceError("trace '" + case_id + "' has more than " + std::to_string(caps.max_realizations) +
                            " realizations");
      return;
    }
    const auto& e = events[order[pos]];
    if (e.indeterminate()) self(self, pos + 1);
    for (const auto& a : e.activities) {
      current.push_back(a);
      self(self, pos + 1);
      current.pop_back();
    }
  };
  recurse(recurse, 0);
}

}  // namespace detail

using EventIdSequence = std::vector<std::string>;

/// All permutations of the trace's events that are linear extensions of `precedes`,
/// in lexicographic order of event id choices.
[[nodiscard]] inline std::vector<EventIdSequence> order_realizations(const UncertainTrace& trace,
                                                                     const EnumerationCaps& caps = {}) {
  detail::check_event_cap(trace, caps);
  const auto events = trace.sorted_events();
  std::vector<EventIdSequence> result;
  detail::for_each_linear_extension(events, caps.max_realizations, trace.case_id, [&](const std::vector<std::size_t>& order) {
    EventIdSequence ids;
    ids.reserve(order.size());
    for (auto i : order) ids.push_back(events[i].id);
    result.push_back(std::move(ids));
  });
  return result;
}

/// Realizations of a single given order of the trace's events.
[[nodiscard]] inline std::set<LabelSequence> realizations_of_order(const UncertainTrace& trace,
                                                                   const EventIdSequence& order,
                                                                   const EnumerationCaps& caps = {}) {
  const auto events = trace.sorted_events();
  std::vector<std::size_t> idx;
  for (const auto& id : order) {
    auto it = std::find_if(events.begin(), events.end(), [&](const auto& e) { return e.id == id; });
    if (it == events.end()) throw DomainError("event '" + id + "' is not in trace '" + trace.case_id + "'");
    idx.push_back(static_cast<std::size_t>(it - events.begin()));
  }
  std::set<LabelSequence> out;
  detail::expand_order(events, idx, out, caps, trace.case_id);
  return out;
}

/// Distinct activity sequences over all order-realizations, activity choices and
/// presence choices for indeterminate events.
[[nodiscard]] inline std::set<LabelSequence> realizations(const UncertainTrace& trace,
                                                          const EnumerationCaps& caps = {}) {
  detail::check_event_cap(trace, caps);
  const auto events = trace.sorted_events();
  std::set<LabelSequence> out;
  detail::for_each_linear_extension(events, caps.max_realizations, trace.case_id, [&](const std::vector<std::size_t>& order) {
    detail::expand_order(events, order, out, caps, trace.case_id);
  });
  return out;
}

[[nodiscard]] inline std::uint64_t count_realizations(const UncertainLog& log, const EnumerationCaps& caps = {}) {
  std::uint64_t total = 0;
  for (const auto& trace : log.traces) {
    try {
      total += realizations(trace, caps).size();
    } catch (const ResourceError& e) {
      throw ResourceError("case '" + trace.case_id + "': " + e.what());
    }
  }
  return total;
}

/// The unique realization of a trace without any uncertainty, or nullopt.
[[nodiscard]] inline std::optional<LabelSequence> certain_view(const UncertainTrace& trace) {
  auto events = trace.events;
  for (const auto& e : events)
    if (!e.certain()) return std::nullopt;
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.t_min < b.t_min; });
  for (std::size_t i = 1; i < events.size(); ++i)
    if (events[i - 1].t_min == events[i].t_min) return std::nullopt;
  LabelSequence seq;
  for (const auto& e : events) seq.push_back(*e.activities.begin());
  return seq;
}

}  // namespace uconf
