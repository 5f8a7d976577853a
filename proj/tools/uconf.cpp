// Command-line front end: conformance bounds for uncertain logs, synthetic data
// generation, and the desk-scale experiments.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uconf/experiments.hpp"
#include "uconf/log_io.hpp"

namespace {

constexpr int kExitInput = 1;
constexpr int kExitResource = 2;

std::vector<double> parse_triple(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw uconf::DomainError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != 3) throw uconf::DomainError(std::string(what) + " expects three comma-separated fractions");
  for (double x : out) uconf::check_fraction(x, what);
  return out;
}

// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw uconf::ParseError("cannot write '" + path + "'");
  out << text;
}

std::string bounds_csv(const uconf::LogBounds& b) {
  std::ostringstream os;
  os << "case_id,lower_cost,upper_cost,realization_count\n";
  std::uint64_t total_realizations = 0;
  bool capped = false;
  for (const auto& r : b.reports) {
    os << r.case_id << ',';
    os << (r.lower_available ? std::to_string(r.lower_cost) : "error") << ','
       << (r.ok() ? std::to_string(r.upper_cost) : r.resource_limited ? "capped" : "error") << ',';
    if (r.realization_count) {
      os << *r.realization_count;
      total_realizations += *r.realization_count;
    } else {
      os << "capped";
      capped = true;
    }
    os << '\n';
  }
  os << "TOTAL," << b.total_lower << ',' << b.total_upper << ','
     << (capped ? std::string("capped") : std::to_string(total_realizations)) << '\n';
  return os.str();
}

int run_bounds(const std::string& log_path, const std::string& net_path, const std::string& format,
               const std::string& out_path, const std::string& report) {
  const auto net = uconf::load_net_file(net_path);
  uconf::LoadReport load_report;
  const auto log = uconf::load_log_file(log_path, uconf::parse_log_format(format), &load_report);
  if (load_report.dropped_attributes > 0)
    std::cerr << "warning: dropped " << load_report.dropped_attributes << " unrecognized attribute(s)\n";
  uconf::AlignmentCache cache;
  uconf::BoundOptions options{uconf::EnumerationCaps::from_environment(), {}, &cache};
  const auto bounds = uconf::log_bounds(log, net, uconf::CostFunction::standard(), options);
  emit(out_path, report == "json" ? uconf::bounds_to_json(bounds).dump(2) + "\n" : bounds_csv(bounds));
  int code = 0;
  for (const auto& r : bounds.reports) {
    if (r.ok()) continue;
    std::cerr << "error: case '" << r.case_id << "': " << *r.error << '\n';
    code = std::max(code, r.resource_limited ? kExitResource : kExitInput);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformance bounds between Petri net models and uncertain event logs"};
  app.require_subcommand(1);

  // bounds
  std::string log_path, net_path, format = "json", out_path, report = "csv";
  auto* bounds = app.add_subcommand("bounds", "Lower/upper alignment cost per trace");
  bounds->add_option("--log", log_path, "Uncertain log file")->required();
  bounds->add_option("--net", net_path, "Net JSON file")->required();
  bounds->add_option("--format", format, "Log format")->check(CLI::IsMember({"json", "xes"}));
  bounds->add_option("--out", out_path, "Output file (default: stdout)");
  bounds->add_option("--report", report, "Report format")->check(CLI::IsMember({"csv", "json"}));

  // gen
  std::size_t gen_size = 10, gen_traces = 100;
  std::uint64_t gen_seed = 1;
  std::string gen_dev = "0,0,0", gen_unc = "0,0,0", out_log, out_net;
  auto* gen = app.add_subcommand("gen", "Generate a random net and an uncertain log played out from it");
  gen->add_option("--net-size", gen_size, "Visible transitions")->check(CLI::PositiveNumber);
  gen->add_option("--traces", gen_traces, "Number of traces");
  gen->add_option("--deviation", gen_dev, "d_a,d_s,d_d");
  gen->add_option("--uncertainty", gen_unc, "u_a,u_t,u_i");
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--out-log", out_log, "Log JSON output")->required();
  gen->add_option("--out-net", out_net, "Net JSON output")->required();

  // experiments
  uconf::ExperimentSpec spec;
  std::vector<std::string> dev_names, unc_names;
  std::string exp_out;
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--traces", spec.traces, "Traces per log");
    cmd->add_option("--reps", spec.repetitions, "Repetitions");
    cmd->add_option("--seed", spec.seed, "Random seed");
    cmd->add_option("--out", exp_out, "CSV output (default: stdout)");
  };
  auto* div = app.add_subcommand("exp-divergence", "Mean lower/upper cost as uncertainty grows");
  common(div);
  std::size_t div_size = 10;
  div->add_option("--net-size", div_size, "Visible transitions");
  div->add_option("--p", spec.p_values, "Uncertainty fractions")->delimiter(',');
  div->add_option("--deviation", dev_names, "activity-labels,swaps,extra-events,all,none")->delimiter(',');
  div->add_option("--uncertainty", unc_names, "activities,timestamps,indeterminate,all")->delimiter(',');

  auto* perf = app.add_subcommand("exp-performance", "Behavior net vs brute-force lower bound timing");
  common(perf);
  std::vector<std::size_t> perf_sizes{5, 10, 15, 20};
  double perf_p = 0.05;
  std::string perf_unc = "all", perf_dev = "none";
  perf->add_option("--net-size", perf_sizes, "Net sizes")->delimiter(',');
  perf->add_option("--p", perf_p, "Uncertainty fraction");
  perf->add_option("--uncertainty", perf_unc, "activities|timestamps|indeterminate|all");
  perf->add_option("--deviation", perf_dev, "activity-labels|swaps|extra-events|all|none");

  auto* real = app.add_subcommand("exp-realizations", "Realization counts over net size and p");
  common(real);
  std::vector<std::size_t> real_sizes{5, 10, 15, 20};
  double fixed_p = 0.05;
  std::size_t fixed_size = 10;
  real->add_option("--net-size", real_sizes, "Net sizes for the size sweep")->delimiter(',');
  real->add_option("--p", spec.p_values, "Fractions for the p sweep")->delimiter(',');
  real->add_option("--uncertainty", unc_names, "activities,timestamps,indeterminate,all")->delimiter(',');
  real->add_option("--fixed-p", fixed_p, "p used by the size sweep");
  real->add_option("--fixed-size", fixed_size, "Net size used by the p sweep");

  CLI11_PARSE(app, argc, argv);

  try {
    if (const char* env = std::getenv("UNCERTAIN_CONFORM_CAP"); env && !bounds->parsed())
      spec.caps = uconf::EnumerationCaps::from_environment();
    if (!unc_names.empty()) {
      spec.uncertainties.clear();
      for (const auto& u : unc_names) spec.uncertainties.push_back(uconf::parse_uncertainty_kind(u));
    }
    if (!dev_names.empty()) {
      spec.deviations.clear();
      for (const auto& d : dev_names) spec.deviations.push_back(uconf::parse_deviation(d));
    }

    if (bounds->parsed()) return run_bounds(log_path, net_path, format, out_path, report);

    if (gen->parsed()) {
      const auto dev = parse_triple(gen_dev, "--deviation");
      const auto unc = parse_triple(gen_unc, "--uncertainty");
      const auto net = uconf::random_block_net(gen_size, uconf::mix_seed(gen_seed, 0));
      const auto universe = net.net.visible_labels();
      auto log = uconf::playout(net, gen_traces, uconf::mix_seed(gen_seed, 1));
      log = uconf::deviate(log, {dev[0], dev[1], dev[2]}, universe, uconf::mix_seed(gen_seed, 2));
      log = uconf::uncertainize(log, {unc[0], unc[1], unc[2]}, universe, uconf::mix_seed(gen_seed, 3));
      emit(out_net, uconf::save_net(net));
      emit(out_log, uconf::save_log(log, uconf::LogFormat::json));
      return 0;
    }

    std::ostringstream csv;
    if (div->parsed()) {
      spec.net_sizes = {div_size};
      uconf::write_csv(csv, uconf::run_divergence(spec));
    } else if (perf->parsed()) {
      spec.net_sizes = perf_sizes;
      uconf::PerformanceSettings settings{perf_p, uconf::parse_uncertainty_kind(perf_unc),
                                          uconf::parse_deviation(perf_dev)};
      uconf::check_fraction(perf_p, "--p");
      uconf::write_csv(csv, uconf::run_performance(spec, settings));
    } else if (real->parsed()) {
      spec.net_sizes = real_sizes;
      uconf::check_fraction(fixed_p, "--fixed-p");
      uconf::write_csv(csv, uconf::run_realizations(spec, fixed_p, fixed_size));
    }
    emit(exp_out, csv.str());
    return 0;
  } catch (const uconf::ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
