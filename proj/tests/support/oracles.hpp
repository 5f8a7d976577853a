#pragma once

// Independent reference implementations and random generators shared by the
// property tests and the acceptance binary. Nothing here calls the enumeration or
// search code it is used to check.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "uconf/petri.hpp"
#include "uconf/synthesis.hpp"
#include "uconf/uncertain.hpp"

namespace oracle {

using uconf::Label;
using uconf::LabelSequence;
using uconf::UncertainEvent;
using uconf::UncertainTrace;

// ---------------------------------------------------------------------------
// generators

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::size_t uniform(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }
};

inline std::vector<Label> alphabet(std::size_t n) {
  std::vector<Label> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(uconf::activity_name(i));
  return out;
}

/// Random uncertain trace: small integer-minute intervals so that both overlap and
/// strict precedence are common.
inline UncertainTrace random_trace(Gen& g, std::size_t max_events, const std::vector<Label>& labels,
                                   double p_multi = 0.25, double p_indet = 0.25) {
  UncertainTrace t;
  t.case_id = "rand";
  const auto n = g.uniform(1, max_events);
  for (std::size_t i = 0; i < n; ++i) {
    UncertainEvent e;
    e.id = "e" + std::to_string(i + 1);
    e.activities.insert(labels[g.uniform(0, labels.size() - 1)]);
    if (g.chance(p_multi)) e.activities.insert(labels[g.uniform(0, labels.size() - 1)]);
    const auto lo = static_cast<std::int64_t>(g.uniform(0, 3 * n));
    const auto width = g.chance(0.5) ? 0 : static_cast<std::int64_t>(g.uniform(1, 4));
    e.t_min = uconf::Timestamp::from_seconds(60 * lo);
    e.t_max = uconf::Timestamp::from_seconds(60 * (lo + width));
    if (g.chance(p_indet)) e.indeterminacy = uconf::Indeterminacy::indeterminate;
    t.events.push_back(std::move(e));
  }
  std::shuffle(t.events.begin(), t.events.end(), g.rng);
  return t;
}

/// Adds uncertainty to one event of `t` so that its realizations form a superset.
inline UncertainTrace loosen(Gen& g, UncertainTrace t, const std::vector<Label>& labels) {
  auto& e = t.events[g.uniform(0, t.events.size() - 1)];
  switch (g.uniform(0, 2)) {
    case 0: e.activities.insert(labels[g.uniform(0, labels.size() - 1)]); break;
    case 1:
      e.t_min.ns -= 60'000'000'000LL * static_cast<std::int64_t>(g.uniform(0, 3));
      e.t_max.ns += 60'000'000'000LL * static_cast<std::int64_t>(g.uniform(0, 3));
      break;
    default: e.indeterminacy = uconf::Indeterminacy::indeterminate; break;
  }
  return t;
}

/// Random sound block net with at most `max_transitions` transitions in total.
inline uconf::SystemNet random_net(Gen& g, std::size_t max_visible, std::size_t max_transitions) {
  for (;;) {
    auto sn = uconf::random_block_net(g.uniform(1, max_visible), g.rng());
    if (sn.net.transition_count() <= max_transitions) return sn;
  }
}

// ---------------------------------------------------------------------------
// brute-force enumeration

/// Every permutation of the events that never places e before e' when e' certainly
/// happened first.
inline std::set<std::vector<std::string>> orders(const UncertainTrace& t) {
  std::vector<std::size_t> perm(t.events.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return t.events[a].id < t.events[b].id; });
  std::set<std::vector<std::string>> out;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < perm.size() && ok; ++i)
      for (std::size_t j = i + 1; j < perm.size() && ok; ++j)
        if (t.events[perm[j]].t_max < t.events[perm[i]].t_min) ok = false;
    if (!ok) continue;
    std::vector<std::string> ids;
    for (auto i : perm) ids.push_back(t.events[i].id);
    out.insert(ids);
  } while (std::next_permutation(perm.begin(), perm.end(),
                                 [&](auto a, auto b) { return t.events[a].id < t.events[b].id; }));
  return out;
}

inline std::set<LabelSequence> realizations(const UncertainTrace& t) {
  std::set<LabelSequence> out;
  for (const auto& order : orders(t)) {
    std::vector<const UncertainEvent*> ev;
    for (const auto& id : order)
      ev.push_back(&*std::find_if(t.events.begin(), t.events.end(), [&](const auto& e) { return e.id == id; }));
    // Subsets of indeterminate events to drop, then the cartesian product of labels.
    const std::size_t n = ev.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      bool valid = true;
      for (std::size_t i = 0; i < n; ++i)
        if ((mask >> i & 1u) && !ev[i]->indeterminate()) valid = false;
      if (!valid) continue;
      std::vector<const UncertainEvent*> kept;
      for (std::size_t i = 0; i < n; ++i)
        if (!(mask >> i & 1u)) kept.push_back(ev[i]);
      std::vector<LabelSequence> partial{{}};
      for (const auto* e : kept) {
        std::vector<LabelSequence> next;
        for (const auto& p : partial)
          for (const auto& a : e->activities) {
            next.push_back(p);
            next.back().push_back(a);
          }
        partial = std::move(next);
      }
      out.insert(partial.begin(), partial.end());
    }
  }
  return out;
}

/// Visible traces of an acyclic net, by plain depth-first token play.
inline std::set<LabelSequence> acyclic_language(const uconf::SystemNet& sn) {
  std::set<LabelSequence> out;
  const auto& net = sn.net;
  std::vector<std::uint32_t> m(sn.initial_marking.counts().begin(), sn.initial_marking.counts().end());
  const std::vector<std::uint32_t> fin(sn.final_marking.counts().begin(), sn.final_marking.counts().end());
  LabelSequence prefix;
  auto dfs = [&](auto&& self) -> void {
    if (m == fin) out.insert(prefix);
    for (const auto& t : net.transitions()) {
      if (!std::all_of(t.preset.begin(), t.preset.end(), [&](auto p) { return m[p] > 0; })) continue;
      for (auto p : t.preset) --m[p];
      for (auto p : t.postset) ++m[p];
      if (t.label) prefix.push_back(*t.label);
      self(self);
      if (t.label) prefix.pop_back();
      for (auto p : t.postset) --m[p];
      for (auto p : t.preset) ++m[p];
    }
  };
  dfs(dfs);
  return out;
}

inline std::size_t lcs(const LabelSequence& a, const LabelSequence& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = a[i - 1] == b[j - 1] ? d[i - 1][j - 1] + 1 : std::max(d[i - 1][j], d[i][j - 1]);
  return d[a.size()][b.size()];
}

/// Unit-cost optimal alignment cost: the cheapest edit to any word of the model
/// using only insertions and deletions.
inline std::int64_t alignment_cost(const LabelSequence& trace, const std::set<LabelSequence>& model_language) {
  std::int64_t best = -1;
  for (const auto& w : model_language) {
    const auto c = static_cast<std::int64_t>(trace.size() + w.size() - 2 * lcs(trace, w));
    if (best < 0 || c < best) best = c;
  }
  return best;
}

// ---------------------------------------------------------------------------
// naive XES scan

struct XesEventSummary {
  std::string name;
  std::vector<std::string> activities;
};

/// Reads events by regular expression only; enough to cross-check the writer.
inline std::vector<XesEventSummary> scan_xes_events(const std::string& text) {
  std::vector<XesEventSummary> out;
  const std::regex event_re(R"(<event>([\s\S]*?)</event>)");
  const std::regex name_re(R"re(<string key="concept:name" value="([^"]*)"/>)re");
  const std::regex list_re(R"re(<list key="uncertainty:activity">([\s\S]*?)</list>)re");
  for (std::sregex_iterator it(text.begin(), text.end(), event_re), end; it != end; ++it) {
    std::string body = (*it)[1];
    XesEventSummary s;
    std::smatch lm;
    if (std::regex_search(body, lm, list_re)) {
      std::string inner = lm[1];
      for (std::sregex_iterator a(inner.begin(), inner.end(), name_re); a != end; ++a) s.activities.push_back((*a)[1]);
      body = lm.prefix().str() + lm.suffix().str();
    }
    std::smatch nm;
    if (std::regex_search(body, nm, name_re)) s.name = nm[1];
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace oracle
