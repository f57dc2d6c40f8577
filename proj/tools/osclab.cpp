#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "osc/experiments.hpp"
#include "osc/phase.hpp"
#include "osc/plot.hpp"
#include "osc/verify.hpp"

namespace {

constexpr int kOk = 0, kFailure = 1, kConfigError = 2;

int run(const std::string& config, const osc::RunOptions& opts) {
  const osc::Config c = osc::load_config(config);
  const osc::RunReport r = osc::run_config(c, opts);
  for (const auto& o : r.outcomes) {
    if (o.error.empty()) {
      std::cout << o.name << ": wrote " << o.path << '\n';
    } else {
      std::cerr << o.name << ": failed: " << o.error << '\n';
    }
  }
  if (r.outcomes.empty()) std::cout << "no experiments\n";
  return r.exit_code();
}

int plot(const std::string& csv, const std::string& kind, std::string out) {
  if (out.empty()) {
    const auto dot = csv.rfind('.');
    out = (dot == std::string::npos ? csv : csv.substr(0, dot)) + ".svg";
  }
  osc::plot_csv(csv, osc::parse_plot_kind(kind), out);
  std::cout << "wrote " << out << '\n';
  return kOk;
}

int list_phases() {
  for (const auto& e : osc::phase_catalog()) {
    std::printf("%-14s %-20s %s\n", e.family.c_str(), e.params.c_str(), e.description.c_str());
  }
  return kOk;
}

int verify(std::uint64_t seed, int workers) {
  bool ok = true;
  for (const auto& c : osc::verify_invariants(seed, workers)) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok = ok && c.pass;
  }
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped oscillatory integral experiments"};
  app.require_subcommand(1);
  std::string config, out, csv, kind = "decay";
  std::uint64_t seed = 1;
  int workers = 1;

  auto* run_cmd = app.add_subcommand("run", "Run the experiments of a config file");
  run_cmd->add_option("--config", config, "Config file")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override every experiment seed");
  run_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  auto* out_opt = run_cmd->add_option("--out", out, "Override the output directory");

  auto* plot_cmd = app.add_subcommand("plot", "Render a CSV produced by run as SVG");
  plot_cmd->add_option("csv", csv, "Input CSV")->required();
  plot_cmd->add_option("--kind", kind, "decay or heatmap");
  plot_cmd->add_option("--out", out, "Output SVG (default: CSV path with .svg)");

  auto* list_cmd = app.add_subcommand("list-phases", "List the phase catalog");

  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suite");
  verify_cmd->add_option("--seed", seed, "Sampling seed");
  verify_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) {
      osc::RunOptions o;
      if (*seed_opt) o.seed = seed;
      if (*out_opt) o.out_dir = out;
      o.workers = workers;
      return run(config, o);
    }
    if (*plot_cmd) return plot(csv, kind, out);
    if (*list_cmd) return list_phases();
    if (*verify_cmd) return verify(seed, workers);
  } catch (const osc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const osc::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
