#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "s2fl/experiments.hpp"
#include "s2fl/serialize.hpp"

using namespace s2fl;

namespace {

ExperimentConfig small_config() {
  auto cfg = default_config();
  cfg.system.num_devices = 3;
  cfg.grid = {40, 42};
  cfg.schemes = {Scheme::S2fl, Scheme::Eba};
  cfg.realizations = 2;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config validation names the bad field") {
  auto cfg = small_config();
  cfg.grid = {};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("grid"), std::invalid_argument);

  cfg = small_config();
  cfg.grid = {40, 44, 42};  // not monotone in either direction
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.schemes = {};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("schemes"), std::invalid_argument);

  cfg = small_config();
  cfg.realizations = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("sweep variable names round-trip") {
  for (SweepVariable v : {SweepVariable::PowerBudgetDbm, SweepVariable::Antennas,
                          SweepVariable::SensingBits, SweepVariable::Bandwidth,
                          SweepVariable::TargetAccuracy, SweepVariable::NumDevices}) {
    CHECK(sweep_variable_from_string(to_string(v)) == v);
  }
}

TEST_CASE("one grid point, one scheme, one realization gives one row") {
  auto cfg = small_config();
  cfg.grid = {42};
  cfg.schemes = {Scheme::S2fl};
  cfg.realizations = 1;
  const auto table = run_sweep(cfg);
  CHECK(table.rows.size() == 1);
  CHECK(table.runs.size() == 1);
  CHECK(table.rows[0].n_ok == 1);
  CHECK(table.rows[0].n_fail == 0);
}

TEST_CASE("sweep rows count grid x scheme and aggregate realizations") {
  const auto cfg = small_config();
  const auto table = run_sweep(cfg);
  CHECK(table.rows.size() == 4);   // 2 grid points x 2 schemes
  CHECK(table.runs.size() == 8);   // x 2 realizations
  for (const auto& row : table.rows) {
    CHECK(row.n_ok == 2);
    CHECK(row.mean_completion > 0);
  }
}

TEST_CASE("worker count does not change the results") {
  const auto cfg = small_config();
  const auto a = run_sweep(cfg, 1);
  const auto b = run_sweep(cfg, 4);
  REQUIRE(a.runs.size() == b.runs.size());
  for (size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].objective == b.runs[i].objective);
    CHECK(a.runs[i].iterations == b.runs[i].iterations);
  }
  CHECK(table_csv(a) == table_csv(b));
}

TEST_CASE("emitted CSV round-trips and is byte-deterministic") {
  const auto cfg = small_config();
  const auto table = run_sweep(cfg);
  const std::string path_a = "sweep_a.csv", path_b = "sweep_b.csv";
  emit_csv(table, path_a);
  emit_csv(run_sweep(cfg), path_b);
  CHECK(slurp(path_a) == slurp(path_b));

  const auto rows = parse_csv(path_a);
  REQUIRE(rows.size() == table.rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].sweep_value == table.rows[i].sweep_value);
    CHECK(rows[i].scheme == table.rows[i].scheme);
    CHECK(rows[i].mean_completion == table.rows[i].mean_completion);
    CHECK(rows[i].std_completion == table.rows[i].std_completion);
    CHECK(rows[i].n_ok == table.rows[i].n_ok);
  }
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}

TEST_CASE("empty table refuses to emit") {
  SweepTable table;
  CHECK_THROWS(emit_csv(table, "never_written.csv"));
}

TEST_CASE("config JSON overrides defaults") {
  const auto doc = nlohmann::json::parse(R"({
    "sweep": "D0",
    "grid": [50000, 100000],
    "schemes": ["s2fl", "fla"],
    "realizations": 3,
    "seed_base": 9,
    "system": {"num_devices": 5, "power_budget_dbm": 40},
    "learning": {"target_accuracy": 0.01}
  })");
  const auto cfg = config_from_json(doc);
  CHECK(cfg.sweep == SweepVariable::SensingBits);
  CHECK(cfg.grid.size() == 2);
  CHECK(cfg.schemes.size() == 2);
  CHECK(cfg.realizations == 3);
  CHECK(cfg.seed_base == 9);
  CHECK(cfg.system.num_devices == 5);
  CHECK(cfg.system.power_budget == doctest::Approx(dbm_to_watt(40)));
  CHECK(cfg.learning.target_accuracy == doctest::Approx(0.01));
  CHECK(cfg.learning.global_round_scale ==
        doctest::Approx(derive_learning_constants(4, 2, 0.25, 1.0 / 3.0, 0.01)
                            .global_round_scale));
}

TEST_CASE("instance JSON round-trips exactly") {
  auto cfg = small_config();
  const auto inst = sample_instance(cfg.system, cfg.learning, cfg.ranges, cfg.channel, 77);
  const auto back = instance_from_json(to_json(inst));
  CHECK(back.seed == inst.seed);
  CHECK(back.system.power_budget == inst.system.power_budget);
  CHECK(back.system.source_energy_cap == inst.system.source_energy_cap);
  CHECK(back.learning.global_round_scale == inst.learning.global_round_scale);
  REQUIRE(back.devices.size() == inst.devices.size());
  for (size_t n = 0; n < inst.devices.size(); ++n) {
    CHECK(back.devices[n].channel_gain == inst.devices[n].channel_gain);
    CHECK(back.devices[n].sensing_rate == inst.devices[n].sensing_rate);
  }

  auto doc = to_json(inst);
  doc["version"] = kInstanceSchemaVersion + 1;
  CHECK_THROWS(instance_from_json(doc));
}

TEST_CASE("trace CSV has one row per iteration plus the start") {
  auto cfg = small_config();
  const auto inst = sample_instance(cfg.system, cfg.learning, cfg.ranges, cfg.channel, 1);
  const auto trace = run(inst, Uplink::Fdma);
  const auto csv = trace_csv(trace);
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == static_cast<long>(trace.iterations.size()) + 2);  // header + initial
  CHECK(csv.find("kappa,objective,local_accuracy") == 0);
}
