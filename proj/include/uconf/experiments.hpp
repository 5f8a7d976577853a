#pragma once

// Desk-scale synthetic experiments: bound divergence with growing uncertainty,
// behavior-net vs brute-force lower-bound timing, and realization counts.

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "uconf/alignment.hpp"
#include "uconf/synthesis.hpp"

namespace uconf {

struct NamedDeviation {
  std::string name;
  DeviationConfig config;
};

enum class UncertaintyKind { activities, timestamps, indeterminate, all };

inline std::string to_string(UncertaintyKind k) {
  switch (k) {
    case UncertaintyKind::activities: return "activities";
    case UncertaintyKind::timestamps: return "timestamps";
    case UncertaintyKind::indeterminate: return "indeterminate";
    case UncertaintyKind::all: return "all";
  }
  return "";
}

inline UncertaintyKind parse_uncertainty_kind(std::string_view s) {
  for (auto k : {UncertaintyKind::activities, UncertaintyKind::timestamps, UncertaintyKind::indeterminate,
                 UncertaintyKind::all})
    if (to_string(k) == s) return k;
  throw DomainError("unknown uncertainty configuration '" + std::string(s) + "'");
}

inline UncertaintyConfig uncertainty_at(UncertaintyKind k, double p) {
  switch (k) {
    case UncertaintyKind::activities: return {p, 0, 0};
    case UncertaintyKind::timestamps: return {0, p, 0};
    case UncertaintyKind::indeterminate: return {0, 0, p};
    case UncertaintyKind::all: return {p, p, p};
  }
  return {};
}

/// The four deviation settings with 30% of events affected.
inline std::vector<NamedDeviation> standard_deviations() {
  return {{"activity-labels", {0.3, 0, 0}}, {"swaps", {0, 0.3, 0}}, {"extra-events", {0, 0, 0.3}},
          {"all", {0.3, 0.3, 0.3}}};
}

inline NamedDeviation parse_deviation(std::string_view s) {
  if (s == "none") return {"none", {}};
  for (auto& d : standard_deviations())
    if (d.name == s) return d;
  throw DomainError("unknown deviation configuration '" + std::string(s) + "'");
}

inline const std::vector<UncertaintyKind>& all_uncertainty_kinds() {
  static const std::vector<UncertaintyKind> kinds{UncertaintyKind::activities, UncertaintyKind::timestamps,
                                                  UncertaintyKind::indeterminate, UncertaintyKind::all};
  return kinds;
}

struct ExperimentSpec {
  std::vector<std::size_t> net_sizes{10};
  std::size_t traces = 50;
  std::size_t repetitions = 3;
  std::uint64_t seed = 1;
  std::vector<double> p_values{0.0, 0.04, 0.08, 0.12, 0.16};
  std::vector<NamedDeviation> deviations = standard_deviations();
  std::vector<UncertaintyKind> uncertainties = all_uncertainty_kinds();
  EnumerationCaps caps{64, 1'000'000};

  void validate() const {
    if (repetitions < 1) throw DomainError("repetitions must be at least 1");
    if (traces < 1) throw DomainError("traces must be at least 1");
    for (auto p : p_values) check_fraction(p, "p");
    for (auto n : net_sizes)
      if (n < 1) throw DomainError("net sizes must be positive");
    for (const auto& d : deviations) d.config.validate();
  }
};

/// Net and certain play-out log of one experiment cell.
struct CellData {
  SystemNet net;
  UncertainLog log;
  std::vector<Label> universe;
};

inline CellData make_cell(std::size_t net_size, std::size_t traces, std::uint64_t seed, std::size_t repetition) {
  const auto base = mix_seed(mix_seed(seed, net_size), repetition);
  CellData cell;
  cell.net = random_block_net(net_size, mix_seed(base, 0));
  cell.log = playout(cell.net, traces, mix_seed(base, 1));
  cell.universe = cell.net.net.visible_labels();
  return cell;
}

// ---------------------------------------------------------------------------

struct DivergenceRow {
  double p = 0;
  std::string deviation;
  std::string uncertainty;
  double mean_lower = 0;
  double mean_upper = 0;
  std::size_t failed_traces = 0;
};

/// Mean per-trace lower/upper cost for every deviation x uncertainty x p cell, over
/// repetitions. Within a repetition the net, play-out and deviated log are shared by
/// all p values, so rows for one configuration differ only in added uncertainty.
inline std::vector<DivergenceRow> run_divergence(const ExperimentSpec& spec, AlignmentCache* cache = nullptr) {
  spec.validate();
  const auto n = spec.net_sizes.front();
  struct Acc {
    double lower = 0, upper = 0;
    std::size_t count = 0, failed = 0;
  };
  const std::size_t np = spec.p_values.size(), nu = spec.uncertainties.size();
  std::vector<Acc> acc(spec.deviations.size() * nu * np);
  AlignmentCache local_cache;
  BoundOptions options{spec.caps, {}, cache ? cache : &local_cache};

  for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
    const auto cell = make_cell(n, spec.traces, spec.seed, rep);
    const auto base = mix_seed(mix_seed(spec.seed, n), rep);
    for (std::size_t di = 0; di < spec.deviations.size(); ++di) {
      const auto deviated = deviate(cell.log, spec.deviations[di].config, cell.universe, mix_seed(base, 2 + di));
      for (std::size_t ui = 0; ui < nu; ++ui) {
        for (std::size_t pi = 0; pi < np; ++pi) {
          const auto ulog = uncertainize(deviated, uncertainty_at(spec.uncertainties[ui], spec.p_values[pi]),
                                         cell.universe, mix_seed(base, 100));
          const auto bounds = log_bounds(ulog, cell.net, CostFunction::standard(), options);
          auto& a = acc[(di * nu + ui) * np + pi];
          for (const auto& r : bounds.reports) {
            if (!r.ok()) {
              ++a.failed;
              continue;
            }
            a.lower += static_cast<double>(r.lower_cost);
            a.upper += static_cast<double>(r.upper_cost);
            ++a.count;
          }
        }
      }
    }
  }

  std::vector<DivergenceRow> rows;
  for (std::size_t di = 0; di < spec.deviations.size(); ++di)
    for (std::size_t ui = 0; ui < nu; ++ui)
      for (std::size_t pi = 0; pi < np; ++pi) {
        const auto& a = acc[(di * nu + ui) * np + pi];
        const double denom = a.count ? static_cast<double>(a.count) : 1.0;
        rows.push_back({spec.p_values[pi], spec.deviations[di].name, to_string(spec.uncertainties[ui]),
                        a.lower / denom, a.upper / denom, a.failed});
      }
  return rows;
}

// ---------------------------------------------------------------------------

struct PerformanceRow {
  std::size_t n = 0;
  std::string method;                 // "behavior_net" or "brute_force"
  std::optional<double> mean_seconds;  // nullopt: brute force hit a cap ("timeout")
  Cost total_cost = 0;                 // sum of lower bounds over all measured traces
};

struct PerformanceSettings {
  double p = 0.05;
  UncertaintyKind uncertainty = UncertaintyKind::all;
  NamedDeviation deviation{"none", {}};
};

/// Times lower_bound (behavior net) against lower_bound_bruteforce on identical logs.
/// Throws std::logic_error if the two methods ever disagree on a cost.
inline std::vector<PerformanceRow> run_performance(const ExperimentSpec& spec, const PerformanceSettings& settings) {
  spec.validate();
  using clock = std::chrono::steady_clock;
  std::vector<PerformanceRow> rows;
  BoundOptions options{spec.caps, {}, nullptr};
  for (auto n : spec.net_sizes) {
    double bn_time = 0, bf_time = 0;
    std::size_t measured = 0;
    bool timed_out = false;
    Cost bn_total = 0, bf_total = 0;
    for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
      const auto cell = make_cell(n, spec.traces, spec.seed, rep);
      const auto base = mix_seed(mix_seed(spec.seed, n), rep);
      const auto deviated = deviate(cell.log, settings.deviation.config, cell.universe, mix_seed(base, 2));
      const auto ulog =
          uncertainize(deviated, uncertainty_at(settings.uncertainty, settings.p), cell.universe, mix_seed(base, 100));
      for (const auto& trace : ulog.traces) {
        auto t0 = clock::now();
        const auto lo = lower_bound(trace, cell.net);
        auto t1 = clock::now();
        bn_time += std::chrono::duration<double>(t1 - t0).count();
        bn_total += lo.cost;
        ++measured;
        if (timed_out) continue;
        try {
          t0 = clock::now();
          const auto bf = lower_bound_bruteforce(trace, cell.net, CostFunction::standard(), options);
          t1 = clock::now();
          bf_time += std::chrono::duration<double>(t1 - t0).count();
          bf_total += bf;
          if (bf != lo.cost)
            throw std::logic_error("lower bound mismatch on " + trace.case_id + ": behavior net " +
                                   std::to_string(lo.cost) + ", brute force " + std::to_string(bf));
        } catch (const ResourceError&) {
          timed_out = true;
        }
      }
    }
    const double denom = measured ? static_cast<double>(measured) : 1.0;
    rows.push_back({n, "behavior_net", bn_time / denom, bn_total});
    rows.push_back({n, "brute_force", timed_out ? std::nullopt : std::optional<double>(bf_time / denom), bf_total});
  }
  return rows;
}

// ---------------------------------------------------------------------------

struct RealizationRow {
  std::string sweep;  // "size" or "p"
  std::string uncertainty;
  double x = 0;
  std::optional<double> mean_realizations;  // nullopt: capped
};

/// Mean count_realizations per log: a net-size sweep at fixed p, and a p sweep at a
/// fixed net size. Uses the same seeds across sweep points.
inline std::vector<RealizationRow> run_realizations(const ExperimentSpec& spec, double fixed_p = 0.05,
                                                    std::size_t fixed_size = 10) {
  spec.validate();
  std::vector<RealizationRow> rows;
  auto measure = [&](std::size_t n, double p, UncertaintyKind kind) -> std::optional<double> {
    double total = 0;
    for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
      const auto cell = make_cell(n, spec.traces, spec.seed, rep);
      const auto base = mix_seed(mix_seed(spec.seed, n), rep);
      const auto ulog = uncertainize(cell.log, uncertainty_at(kind, p), cell.universe, mix_seed(base, 100));
      try {
        total += static_cast<double>(count_realizations(ulog, spec.caps));
      } catch (const ResourceError&) {
        return std::nullopt;
      }
    }
    return total / static_cast<double>(spec.repetitions);
  };
  for (auto kind : spec.uncertainties) {
    for (auto n : spec.net_sizes)
      rows.push_back({"size", to_string(kind), static_cast<double>(n), measure(n, fixed_p, kind)});
    for (auto p : spec.p_values) rows.push_back({"p", to_string(kind), p, measure(fixed_size, p, kind)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_number(double x) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << x;
  return os.str();
}

inline void write_csv(std::ostream& os, const std::vector<DivergenceRow>& rows) {
  os << "p,deviation_config,uncertainty_config,mean_lower,mean_upper\n";
  for (const auto& r : rows)
    os << csv_number(r.p) << ',' << r.deviation << ',' << r.uncertainty << ',' << csv_number(r.mean_lower) << ','
       << csv_number(r.mean_upper) << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<PerformanceRow>& rows) {
  os << "n,method,mean_seconds\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.method << ',' << (r.mean_seconds ? csv_number(*r.mean_seconds) : "timeout") << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<RealizationRow>& rows) {
  os << "sweep,uncertainty_config,x,mean_realizations\n";
  for (const auto& r : rows)
    os << r.sweep << ',' << r.uncertainty << ',' << csv_number(r.x) << ','
       << (r.mean_realizations ? csv_number(*r.mean_realizations) : "capped") << '\n';
}

}  // namespace uconf
