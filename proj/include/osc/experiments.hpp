#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "osc/config.hpp"
#include "osc/csvio.hpp"

namespace osc {

// Column order of every CSV kind. Changing any of these is a schema version bump.
inline constexpr int kSchemaVersion = 1;
std::vector<std::string> decay_columns(int d);
std::vector<std::string> certify_columns(int d);
extern const std::vector<std::string> kStatsetColumns;
extern const std::vector<std::string> kSsssColumns;
extern const std::vector<std::string> kAppendixColumns;

std::vector<std::string> experiment_kinds();

// A parsed experiment; all config errors surface when it is prepared, none when it runs.
struct PreparedExperiment {
  std::string name;
  std::string kind;
  std::string output;  // file name inside dir
  std::string dir;
  std::function<CsvTable()> run;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides every experiment's seed
  std::optional<std::string> out_dir; // overrides out_dir
  int workers = 1;
};

PreparedExperiment prepare_experiment(const ConfigSection& section, const RunOptions& opts);

struct ExperimentOutcome {
  std::string name;
  std::string path;  // empty when it failed
  std::string error;
};

struct RunReport {
  std::vector<ExperimentOutcome> outcomes;
  int exit_code() const;  // 0 all ok, 1 some experiment failed
};

// Prepares everything first (ConfigError escapes before any output is written), then runs the
// experiments on up to opts.workers threads; each finished CSV is written atomically.
RunReport run_config(const Config& config, const RunOptions& opts);

}  // namespace osc
