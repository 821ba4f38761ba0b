#pragma once

#include <string>
#include <vector>

#include "s2fl/benchmarks.hpp"
#include "s2fl/channel.hpp"

#include <json.hpp>

namespace s2fl {

enum class SweepVariable { PowerBudgetDbm, Antennas, SensingBits, Bandwidth, TargetAccuracy,
                           NumDevices };

std::string to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& name);

struct ExperimentConfig {
  SystemParams system;       // defaults; the swept field is overridden per grid point
  LearningParams learning;
  ChannelConfig channel;
  DeviceRanges ranges;
  SweepVariable sweep = SweepVariable::PowerBudgetDbm;
  std::vector<double> grid;
  std::vector<Scheme> schemes;
  int realizations = 20;
  uint64_t seed_base = 1;
  DriverOptions driver;
  std::string output_path;

  void validate() const;  // throws std::invalid_argument naming the field
};

ExperimentConfig default_config();
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// One run of the driver inside a sweep.
struct RunRecord {
  double sweep_value = 0;
  Scheme scheme = Scheme::S2fl;
  int realization = 0;
  bool ok = false;
  double objective = 0;  // completion time, valid when ok
  int iterations = 0;
  double wall_time_s = 0;
  std::string error;     // failure note when !ok
};

// Aggregated per (grid point, scheme); matches one CSV data row.
struct SweepRow {
  double sweep_value = 0;
  Scheme scheme = Scheme::S2fl;
  double mean_completion = 0;
  double std_completion = 0;
  double mean_iterations = 0;
  int n_ok = 0;
  int n_fail = 0;
};

struct SweepTable {
  ExperimentConfig config;
  std::vector<SweepRow> rows;    // sorted by (grid order, scheme order)
  std::vector<RunRecord> runs;   // every individual run, failures included
};

// Runs grid x scheme x realization jobs on `workers` threads; deterministic
// for a fixed config regardless of worker count.
SweepTable run_sweep(const ExperimentConfig& config, int workers = 1);

std::string table_csv(const SweepTable& table);
void emit_csv(const SweepTable& table, const std::string& path);

// Parses a file produced by emit_csv back into rows (header comments skipped).
std::vector<SweepRow> parse_csv(const std::string& path);

}  // namespace s2fl
