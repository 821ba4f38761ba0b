#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "s2fl/experiments.hpp"
#include "s2fl/serialize.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_path, int workers,
            const std::string& mode) {
  s2fl::ExperimentConfig config;
  try {
    config = s2fl::load_config(config_path);
    if (!mode.empty()) config.system.uplink = s2fl::uplink_from_string(mode);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }
  const std::string out = !out_path.empty() ? out_path
                          : !config.output_path.empty() ? config.output_path
                                                        : "sweep.csv";
  const auto table = s2fl::run_sweep(config, workers);
  s2fl::emit_csv(table, out);
  int failures = 0;
  for (const auto& row : table.rows) failures += row.n_fail;
  std::printf("wrote %s (%zu rows, %d failed runs)\n", out.c_str(), table.rows.size(),
              failures);
  for (const auto& run : table.runs) {
    if (!run.ok) {
      std::fprintf(stderr, "failed: %s=%g scheme=%s realization=%d: %s\n",
                   s2fl::to_string(table.config.sweep).c_str(), run.sweep_value,
                   s2fl::to_string(run.scheme).c_str(), run.realization, run.error.c_str());
    }
  }
  return failures == 0 ? 0 : 2;
}

int cmd_validate(const std::string& config_path) {
  try {
    const auto config = s2fl::load_config(config_path);
    std::printf("config ok: sweep=%s grid_points=%zu schemes=%zu realizations=%d\n",
                s2fl::to_string(config.sweep).c_str(), config.grid.size(),
                config.schemes.size(), config.realizations);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }
}

int cmd_replay(const std::string& instance_path, const std::string& out_path,
               const std::string& mode) {
  s2fl::ProblemInstance inst;
  try {
    inst = s2fl::load_instance(instance_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "instance error: %s\n", e.what());
    return 1;
  }
  const s2fl::Uplink uplink = mode.empty() ? inst.system.uplink
                                           : s2fl::uplink_from_string(mode);
  s2fl::DriverOptions opts;
  opts.seed = inst.seed;
  try {
    const auto trace = s2fl::run(inst, uplink, opts);
    std::printf("completion time %.9g after %zu iterations (%s)\n", trace.final_objective(),
                trace.iterations.size(),
                trace.status == s2fl::TraceStatus::Converged ? "converged" : "iteration cap");
    if (!out_path.empty()) {
      s2fl::save_trace(trace, out_path);
      std::printf("trace written to %s\n", out_path.c_str());
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Completion-time minimization for wirelessly powered sensing-based "
               "federated learning"};
  app.require_subcommand(1);

  std::string config_path, out_path, mode, instance_path;
  int workers = 1;

  auto* run = app.add_subcommand("run", "Run a sweep from a config file and emit CSV");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_path, "Output CSV path (default: config `output` field)");
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--mode", mode, "Uplink override")->check(CLI::IsMember({"fdma", "noma"}));

  auto* validate = app.add_subcommand("validate-config", "Check a config file and exit");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required();

  auto* replay = app.add_subcommand("replay", "Re-run one saved instance document");
  replay->add_option("--instance", instance_path, "Instance JSON")->required();
  replay->add_option("--out", out_path, "Write the trace JSON here");
  replay->add_option("--mode", mode, "Uplink override")
      ->check(CLI::IsMember({"fdma", "noma"}));

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, out_path, workers, mode);
  if (validate->parsed()) return cmd_validate(config_path);
  return cmd_replay(instance_path, out_path, mode);
}
