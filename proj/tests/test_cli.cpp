#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "osc/config.hpp"
#include "osc/csvio.hpp"
#include "osc/experiments.hpp"
#include "osc/plot.hpp"
#include "osc/types.hpp"

using namespace osc;
namespace fs = std::filesystem;

namespace {

const char* kQuartic =
    "seed = 1\n"
    "[quartic]\n"
    "experiment.kind = decay\n"
    "phase.family = monomial_sum\n"
    "phase.params = 4, 4\n"
    "sweep.lambda_min = 16\n"
    "sweep.lambda_max = 16384\n"
    "sweep.points = 11\n"
    "z.re = 0.5\n";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("osclab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

std::string config_error(const std::string& text) {
  try {
    const Config c = parse_config(text);
    RunOptions o;
    o.out_dir = scratch("never").string();
    run_config(c, o);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int cli(const std::string& args) {
  const int rc = std::system((std::string(OSCLAB_BINARY) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("parse_config examples") {
  const Config c = parse_config("seed = 3  # trailing\nout_dir = x\n\n[a]\nseed = 4\nz.re = 0.5\n[b]\n");
  REQUIRE(c.experiments.size() == 2);
  CHECK(c.experiments[0].name() == "a");
  CHECK(c.experiments[0].num("seed") == 4);
  CHECK(c.experiments[1].num("seed") == 3);
  CHECK(c.experiments[1].str("out_dir") == "x");
  CHECK(c.experiments[0].nums("z.re") == std::vector<double>{0.5});
  CHECK(parse_config("").experiments.empty());
  CHECK(split_list("1, 2 3,,4") == std::vector<std::string>{"1", "2", "3", "4"});
}

TEST_CASE("config errors name the line and key") {
  CHECK(config_error("[a]\nexperiment.kind = decay\nphase.family = banana\n").find("line 3: phase.family") == 0);
  CHECK(config_error("[a]\nexperiment.kind = decay\nphase.family = quadratic\nphase.params = 9\n")
            .find("phase.params") != std::string::npos);
  CHECK(config_error("x = 1\ny\n").find("line 2") == 0);
  CHECK(config_error("[a]\nexperiment.kind = decay\nexperiment.kind = ssss\n").find("duplicate key") !=
        std::string::npos);
  CHECK(config_error("[a]\nexperiment.kind = nope\n").find("experiment.kind") != std::string::npos);
  CHECK(config_error("[a]\nexperiment.kind = ssss\nsweep.lambda_min = 64\nsweep.lambda_max = 128\n"
                     "sweep.points = 3\nsweep.typo = 1\n")
            .find("line 6: sweep.typo") == 0);
  CHECK(config_error("[a]\nexperiment.kind = ssss\nsweep.lambda_min = x\n").find("sweep.lambda_min") !=
        std::string::npos);
  CHECK(config_error("[a]\nexperiment.kind = appendix\nappendix.p = 3/0\nappendix.rho = 0\n").find("appendix.p") !=
        std::string::npos);
  CHECK(config_error("[a]\nexperiment.kind = ssss\n") == "sweep.lambda_min in [a]: missing required key");
}

TEST_CASE("csv round trip and schema errors") {
  CsvTable t;
  t.meta = {{"seed", "1"}};
  t.header = {"lambda", "abs"};
  t.rows = {{"16", fmt(0.1)}, {"32", fmt(1.0 / 3)}};
  t.footer = {{"fit.slope", "-1"}};
  const std::string text = render_csv(t);
  const CsvTable r = parse_csv(text);
  CHECK(r.meta == t.meta);
  CHECK(r.header == t.header);
  CHECK(r.rows == t.rows);
  CHECK(r.footer_value("fit.slope") == "-1");
  CHECK(r.numeric_column("abs")[1] == 1.0 / 3);
  CHECK(render_csv(r) == text);
  // Cut mid-row, cut after a row, or drop the header.
  CHECK_THROWS_AS(parse_csv(text.substr(0, text.find("32") + 4)), SchemaError);
  CHECK_THROWS_AS(parse_csv(text.substr(0, text.find("# fit"))), SchemaError);
  CHECK_THROWS_AS(parse_csv("# seed = 1\n"), SchemaError);
  try {
    require_columns(r, {"lambda", "beta1", "S"});
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()) == "missing columns: beta1, S");
  }
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("decay run writes 11 rows and a fit summary") {
  const fs::path dir = scratch("decay");
  RunOptions o;
  o.out_dir = dir.string();
  const RunReport r = run_config(parse_config(kQuartic), o);
  REQUIRE(r.outcomes.size() == 1);
  CHECK(r.exit_code() == 0);
  const CsvTable t = read_csv((dir / "quartic.csv").string());
  CHECK(t.header == decay_columns(2));
  CHECK(t.rows.size() == 11);
  CHECK(t.meta_value("seed") == "1");
  CHECK(t.meta_value("version") == kToolVersion);
  for (const char* k : {"tol", "h_circ", "eps_circ", "c", "grid"}) CHECK(!t.meta_value(k).empty());
  CHECK(std::abs(std::stod(t.footer_value("fit.slope")) + 1.0) < 0.1);
  CHECK(t.numeric_column("lambda").back() == 16384.0);
  CHECK(!fs::exists(dir / "quartic.csv.tmp"));
}

TEST_CASE("empty experiment list writes nothing") {
  const fs::path dir = scratch("empty") / "out";
  RunOptions o;
  o.out_dir = dir.string();
  const RunReport r = run_config(parse_config("seed = 1\n"), o);
  CHECK(r.outcomes.empty());
  CHECK(r.exit_code() == 0);
  CHECK(!fs::exists(dir));
}

TEST_CASE("partial failure keeps completed outputs") {
  const fs::path dir = scratch("partial");
  RunOptions o;
  o.out_dir = dir.string();
  // d = 6 remark ssss with lambda up to 2^40 and one sample: no hits, so the fit fails.
  const std::string text = std::string(kQuartic) +
                           "[bad]\nexperiment.kind = ssss\nextremal.d = 6\nextremal.samples = 1\n"
                           "sweep.lambda_min = 1e10\nsweep.lambda_max = 1e12\nsweep.points = 5\n";
  const RunReport r = run_config(parse_config(text), o);
  REQUIRE(r.outcomes.size() == 2);
  CHECK(r.exit_code() == 1);
  CHECK(r.outcomes[0].error.empty());
  CHECK(!r.outcomes[1].error.empty());
  CHECK(fs::exists(dir / "quartic.csv"));
  CHECK(!fs::exists(dir / "bad.csv"));
}

TEST_CASE("plots are deterministic and embed the source hash") {
  const fs::path dir = scratch("plot");
  RunOptions o;
  o.out_dir = dir.string();
  const std::string text = std::string(kQuartic) + "[saddle]\nexperiment.kind = statset\nstatset.L = 32\n";
  REQUIRE(run_config(parse_config(text), o).exit_code() == 0);
  const std::string csv = (dir / "quartic.csv").string();
  const std::string a = plot_csv(csv, PlotKind::kDecay, (dir / "a.svg").string());
  const std::string b = plot_csv(csv, PlotKind::kDecay, (dir / "b.svg").string());
  CHECK(a == b);
  CHECK(a.find(sha256_hex(read_file(csv))) != std::string::npos);
  CHECK(a.find("slope -1.00") != std::string::npos);
  const std::string h = plot_csv((dir / "saddle.csv").string(), PlotKind::kHeatmap, (dir / "h.svg").string());
  CHECK(h.find("<rect") != std::string::npos);
  CHECK(h.find(sha256_hex(read_file((dir / "saddle.csv").string()))) != std::string::npos);
  CHECK_THROWS_AS(plot_csv(csv, PlotKind::kHeatmap, (dir / "x.svg").string()), SchemaError);
  const std::string full = read_file(csv);
  write(dir / "cut.csv", full.substr(0, full.size() / 2));
  CHECK_THROWS_AS(plot_csv((dir / "cut.csv").string(), PlotKind::kDecay, (dir / "y.svg").string()), SchemaError);
  CHECK_THROWS_AS(parse_plot_kind("pie"), ConfigError);
}

TEST_CASE("property: identical config and seed give identical bytes") {
  const std::string text = std::string(kQuartic) +
                           "[floor]\nexperiment.kind = ssss\nextremal.samples = 8192\nsweep.lambda_min = 64\n"
                           "sweep.lambda_max = 4096\nsweep.points = 7\n"
                           "[saddle]\nexperiment.kind = statset\nstatset.L = 32\nstatset.samples = 4096\n";
  std::vector<std::string> first;
  for (int workers : {1, 3}) {
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = scratch("det" + std::to_string(workers) + std::to_string(rep));
      RunOptions o;
      o.out_dir = dir.string();
      o.workers = workers;
      REQUIRE(run_config(parse_config(text), o).exit_code() == 0);
      std::vector<std::string> files;
      for (const char* f : {"quartic.csv", "floor.csv", "saddle.csv"}) files.push_back(read_file((dir / f).string()));
      if (first.empty()) first = files;
      CHECK(files == first);
    }
  }
  // A different seed changes the Monte Carlo output.
  const fs::path dir = scratch("det_seed");
  RunOptions o;
  o.out_dir = dir.string();
  o.seed = 99;
  REQUIRE(run_config(parse_config(text), o).exit_code() == 0);
  CHECK(read_file((dir / "floor.csv").string()) != first[1]);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  write(dir / "ok.cfg", kQuartic);
  write(dir / "empty.cfg", "# nothing\n");
  write(dir / "bad.cfg", "[a]\nexperiment.kind = decay\nphase.family = banana\n");
  CHECK(cli("run --config " + (dir / "ok.cfg").string() + " --out " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "quartic.csv"));
  CHECK(cli("run --config " + (dir / "empty.cfg").string() + " --out " + (dir / "none").string()) == 0);
  CHECK(!fs::exists(dir / "none"));
  CHECK(cli("run --config " + (dir / "bad.cfg").string() + " --out " + (dir / "bad").string()) == 2);
  CHECK(!fs::exists(dir / "bad"));
  CHECK(cli("run --config " + (dir / "missing.cfg").string()) == 2);
  CHECK(cli("run") == 2);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("list-phases") == 0);
  CHECK(cli("plot " + (dir / "out" / "quartic.csv").string()) == 0);
  CHECK(fs::exists(dir / "out" / "quartic.svg"));
  CHECK(cli("plot " + (dir / "out" / "quartic.csv").string() + " --kind heatmap") == 2);
}
