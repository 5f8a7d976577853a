#pragma once

// Seedable synthetic data: random block-structured nets, play-out, deviation
// injection and uncertainty injection.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "uconf/error.hpp"
#include "uconf/petri.hpp"
#include "uconf/uncertain.hpp"

namespace uconf {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; derives independent stream seeds from (seed, index...).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline void check_fraction(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(name) + " must be in [0,1]");
}

struct DeviationConfig {
  double d_a = 0;  // activity label alteration
  double d_s = 0;  // swaps with a neighbor
  double d_d = 0;  // duplication

  void validate() const {
    check_fraction(d_a, "d_a");
    check_fraction(d_s, "d_s");
    check_fraction(d_d, "d_d");
  }
};

struct UncertaintyConfig {
  double u_a = 0;  // one extra candidate activity
  double u_t = 0;  // timestamp widened to a neighbor's
  double u_i = 0;  // indeterminate

  void validate() const {
    check_fraction(u_a, "u_a");
    check_fraction(u_t, "u_t");
    check_fraction(u_i, "u_i");
  }
};

/// Spreadsheet-style activity names: A..Z, AA, AB, ...
inline std::string activity_name(std::size_t index) {
  std::string s;
  ++index;
  while (index > 0) {
    --index;
    s.insert(s.begin(), static_cast<char>('A' + index % 26));
    index /= 26;
  }
  return s;
}

namespace detail {

struct Block {
  enum class Kind { leaf, sequence, choice, parallel } kind = Kind::leaf;
  std::unique_ptr<Block> left, right;
};

inline std::unique_ptr<Block> sample_block(std::size_t budget, Rng& rng) {
  auto b = std::make_unique<Block>();
  if (budget == 1) return b;
  b->kind = static_cast<Block::Kind>(1 + std::uniform_int_distribution<int>(0, 2)(rng));
  const auto split = std::uniform_int_distribution<std::size_t>(1, budget - 1)(rng);
  b->left = sample_block(split, rng);
  b->right = sample_block(budget - split, rng);
  return b;
}

struct BlockBuilder {
  PetriNet net;
  std::size_t places = 0, visible = 0, silent = 0;

  std::size_t place() { return net.add_place("p" + std::to_string(++places)); }

  void build(const Block& b, std::size_t in, std::size_t out) {
    switch (b.kind) {
      case Block::Kind::leaf: {
        auto t = net.add_transition("t" + std::to_string(visible + 1), activity_name(visible));
        ++visible;
        net.add_input(in, t);
        net.add_output(t, out);
        break;
      }
      case Block::Kind::sequence: {
        auto mid = place();
        build(*b.left, in, mid);
        build(*b.right, mid, out);
        break;
      }
      case Block::Kind::choice:
        build(*b.left, in, out);
        build(*b.right, in, out);
        break;
      case Block::Kind::parallel: {
        auto split = net.add_transition("tau" + std::to_string(++silent), std::nullopt);
        auto join = net.add_transition("tau" + std::to_string(++silent), std::nullopt);
        auto li = place(), lo = place(), ri = place(), ro = place();
        net.add_input(in, split);
        net.add_output(split, li);
        net.add_output(split, ri);
        build(*b.left, li, lo);
        build(*b.right, ri, ro);
        net.add_input(lo, join);
        net.add_input(ro, join);
        net.add_output(join, out);
        break;
      }
    }
  }
};

}  // namespace detail

/// Acyclic, sound block-structured net over `n_transitions` uniquely labeled visible
/// transitions (sequence / exclusive choice / parallel blocks, uniformly chosen).
/// Parallel blocks add unlabeled split and join transitions.
[[nodiscard]] inline SystemNet random_block_net(std::size_t n_transitions, std::uint64_t seed) {
  if (n_transitions == 0) throw DomainError("random_block_net needs at least one transition");
  Rng rng(seed);
  auto root = detail::sample_block(n_transitions, rng);
  detail::BlockBuilder b;
  const auto source = b.net.add_place("source");
  const auto sink = b.net.add_place("sink");
  b.build(*root, source, sink);
  Marking init(b.net.place_count()), fin(b.net.place_count());
  init[source] = 1;
  fin[sink] = 1;
  return SystemNet{std::move(b.net), std::move(init), std::move(fin)};
}

inline constexpr std::int64_t kMinuteNs = 60LL * 1'000'000'000LL;
inline constexpr Timestamp kPlayoutOrigin = Timestamp::from_seconds(1'577'836'800);  // 2020-01-01T00:00:00Z

struct PlayoutOptions {
  std::size_t firing_cap = 10'000;
};

/// Certain log of `n_traces` complete runs, each picking uniformly among enabled
/// transitions. Visible firings become events one minute apart.
[[nodiscard]] inline UncertainLog playout(const SystemNet& sn, std::size_t n_traces, std::uint64_t seed,
                                          PlayoutOptions options = {}) {
  UncertainLog log;
  for (std::size_t i = 0; i < n_traces; ++i) {
    Rng rng(mix_seed(seed, i));
    UncertainTrace trace;
    trace.case_id = "case" + std::to_string(i + 1);
    Marking m = sn.initial_marking;
    std::size_t firings = 0;
    std::vector<std::size_t> candidates;
    while (m != sn.final_marking) {
      candidates.clear();
      for (std::size_t t = 0; t < sn.net.transition_count(); ++t)
        if (enabled(sn.net, m, t)) candidates.push_back(t);
      if (candidates.empty()) throw DomainError("play-out reached a dead marking that is not final");
      if (++firings > options.firing_cap)
        throw ResourceError("play-out exceeded the firing cap of " + std::to_string(options.firing_cap));
      const auto t = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
      m = fire(sn.net, m, t);
      if (const auto& label = sn.net.transition(t).label) {
        const auto k = trace.events.size();
        trace.events.push_back(certain_event(trace.case_id + ":e" + std::to_string(k + 1), *label,
                                             Timestamp{kPlayoutOrigin.ns + static_cast<std::int64_t>(k) * kMinuteNs}));
      }
    }
    log.traces.push_back(std::move(trace));
  }
  return log;
}

namespace detail {

inline void sort_by_time(std::vector<UncertainEvent>& events) {
  std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.t_min < b.t_min; });
}

inline Label other_label(const std::set<Label>& current, const std::vector<Label>& universe, double u) {
  std::vector<Label> pool;
  for (const auto& l : universe)
    if (!current.contains(l)) pool.push_back(l);
  if (pool.empty()) throw DomainError("activity universe has no label outside the event's activity set");
  auto i = static_cast<std::size_t>(u * static_cast<double>(pool.size()));
  return pool[std::min(i, pool.size() - 1)];
}

inline std::vector<Label> sorted_universe(std::vector<Label> universe) {
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  return universe;
}

}  // namespace detail

/// Injects deviations into a certain log, in order: label alteration, swaps with a
/// neighbor (each event takes part in at most one swap; the direction is a fair coin,
/// forced at trace boundaries), duplication (the copy sits halfway to the next event,
/// or one minute after the last). Each event is sampled independently.
[[nodiscard]] inline UncertainLog deviate(const UncertainLog& log, const DeviationConfig& cfg,
                                          std::vector<Label> activity_universe, std::uint64_t seed) {
  cfg.validate();
  const auto universe = detail::sorted_universe(std::move(activity_universe));
  if (cfg.d_a > 0 && universe.size() < 2) throw DomainError("label alteration needs at least two activities");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  UncertainLog out;
  for (std::size_t ti = 0; ti < log.traces.size(); ++ti) {
    Rng rng(mix_seed(seed, ti));
    auto trace = log.traces[ti];
    auto& ev = trace.events;
    detail::sort_by_time(ev);

    for (auto& e : ev) {
      if (unit(rng) < cfg.d_a) e.activities = {detail::other_label(e.activities, universe, unit(rng))};
    }

    std::vector<bool> swapped(ev.size(), false);
    for (std::size_t i = 0; i < ev.size(); ++i) {
      if (!(unit(rng) < cfg.d_s) || swapped[i] || ev.size() < 2) continue;
      bool forward = i == 0 ? true : i + 1 == ev.size() ? false : unit(rng) < 0.5;
      if (forward && (i + 1 == ev.size() || swapped[i + 1])) forward = false;
      if (!forward && (i == 0 || swapped[i - 1])) continue;
      const auto j = forward ? i + 1 : i - 1;
      std::swap(ev[i].t_min, ev[j].t_min);
      std::swap(ev[i].t_max, ev[j].t_max);
      std::swap(ev[i], ev[j]);
      swapped[i] = swapped[j] = true;
    }

    std::vector<UncertainEvent> with_copies;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      with_copies.push_back(ev[i]);
      if (!(unit(rng) < cfg.d_d)) continue;
      auto copy = ev[i];
      copy.id = ev[i].id + "+dup";
      const auto t = i + 1 < ev.size() ? Timestamp{ev[i].t_min.ns + (ev[i + 1].t_min.ns - ev[i].t_min.ns) / 2}
                                       : Timestamp{ev[i].t_max.ns + kMinuteNs};
      copy.t_min = copy.t_max = t;
      with_copies.push_back(std::move(copy));
    }
    ev = std::move(with_copies);
    out.traces.push_back(std::move(trace));
  }
  return out;
}

/// Adds uncertainty to a certain log: an extra candidate activity, a timestamp widened
/// to a neighbor's (fair coin, forced at boundaries), an indeterminacy flag. Every
/// event consumes the same random draws whatever the configuration, so raising a rate
/// under a fixed seed only adds uncertainty to a superset of events.
[[nodiscard]] inline UncertainLog uncertainize(const UncertainLog& log, const UncertaintyConfig& cfg,
                                               std::vector<Label> activity_universe, std::uint64_t seed) {
  cfg.validate();
  const auto universe = detail::sorted_universe(std::move(activity_universe));
  if (cfg.u_a > 0 && universe.size() < 2) throw DomainError("activity uncertainty needs at least two activities");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  UncertainLog out;
  for (std::size_t ti = 0; ti < log.traces.size(); ++ti) {
    Rng rng(mix_seed(seed, ti));
    const auto& source = log.traces[ti];
    auto original = source.events;
    detail::sort_by_time(original);
    auto ev = original;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const double ra = unit(rng), rt = unit(rng), ri = unit(rng), pick = unit(rng), coin = unit(rng);
      if (ra < cfg.u_a) ev[i].activities.insert(detail::other_label(original[i].activities, universe, pick));
      if (rt < cfg.u_t && ev.size() > 1) {
        const bool forward = i == 0 ? true : i + 1 == ev.size() ? false : coin < 0.5;
        const auto& n = original[forward ? i + 1 : i - 1];
        ev[i].t_min = std::min(original[i].t_min, n.t_min);
        ev[i].t_max = std::max(original[i].t_max, n.t_max);
      }
      if (ri < cfg.u_i) ev[i].indeterminacy = Indeterminacy::indeterminate;
    }
    out.traces.push_back(UncertainTrace{source.case_id, std::move(ev)});
  }
  return out;
}

}  // namespace uconf
