#include "s2fl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace s2fl {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_monotone(const std::vector<double>& g) {
  bool up = true, down = true;
  for (size_t i = 1; i < g.size(); ++i) {
    up = up && g[i] >= g[i - 1];
    down = down && g[i] <= g[i - 1];
  }
  return up || down;
}

// config for one grid point: the swept quantity replaces its default
void apply_sweep_value(ExperimentConfig& c, double value) {
  switch (c.sweep) {
    case SweepVariable::PowerBudgetDbm:
      c.system.power_budget = dbm_to_watt(value);
      break;
    case SweepVariable::Antennas:
      c.channel.antennas_per_beam = static_cast<int>(std::lround(value));
      break;
    case SweepVariable::SensingBits:
      c.system.sensing_bits_required = value;
      break;
    case SweepVariable::Bandwidth:
      c.system.bandwidth = value;
      break;
    case SweepVariable::TargetAccuracy:
      c.learning = derive_learning_constants(c.learning.lipschitz, c.learning.strong_convexity,
                                             c.learning.step_size, c.learning.hyper_rate, value);
      break;
    case SweepVariable::NumDevices:
      c.system.num_devices = static_cast<int>(std::lround(value));
      break;
  }
}

}  // namespace

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::PowerBudgetDbm: return "P0_dBm";
    case SweepVariable::Antennas: return "Na";
    case SweepVariable::SensingBits: return "D0";
    case SweepVariable::Bandwidth: return "B";
    case SweepVariable::TargetAccuracy: return "eps0";
    case SweepVariable::NumDevices: return "N";
  }
  return "?";
}

SweepVariable sweep_variable_from_string(const std::string& name) {
  if (name == "P0_dBm") return SweepVariable::PowerBudgetDbm;
  if (name == "Na") return SweepVariable::Antennas;
  if (name == "D0") return SweepVariable::SensingBits;
  if (name == "B") return SweepVariable::Bandwidth;
  if (name == "eps0") return SweepVariable::TargetAccuracy;
  if (name == "N") return SweepVariable::NumDevices;
  throw std::invalid_argument("unknown sweep variable: " + name);
}

void ExperimentConfig::validate() const {
  if (grid.empty()) throw std::invalid_argument("grid: must be non-empty");
  if (!is_monotone(grid)) throw std::invalid_argument("grid: must be monotone");
  if (schemes.empty()) throw std::invalid_argument("schemes: must be non-empty");
  if (realizations < 1) throw std::invalid_argument("realizations: must be >= 1");
  if (sweep == SweepVariable::Antennas || sweep == SweepVariable::NumDevices) {
    for (double v : grid) {
      if (v < 1 || v != std::floor(v)) {
        throw std::invalid_argument("grid: " + to_string(sweep) +
                                    " values must be positive integers");
      }
    }
  }
  ExperimentConfig probe = *this;
  for (double v : grid) apply_sweep_value(probe, v);  // throws on invalid values
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.system.num_devices = 10;
  c.system.power_budget = dbm_to_watt(42.0);
  c.system.bandwidth = 500e3;
  c.system.noise_density = 1e-14;
  c.system.harvest_efficiency = 0.9;
  c.system.model_size_bits = 28.1e3;
  c.system.sensing_bits_required = 1e5;
  c.system.uplink = Uplink::Fdma;
  c.learning = derive_learning_constants(4.0, 2.0, 0.25, 1.0 / 3.0, 1e-3);
  c.sweep = SweepVariable::PowerBudgetDbm;
  c.grid = {36, 38, 40, 42, 44};
  c.schemes = {Scheme::S2fl, Scheme::Ftd, Scheme::Fla, Scheme::Ppt, Scheme::Eba};
  c.realizations = 20;
  c.seed_base = 1;
  return c;
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig c = default_config();
  using nlohmann::json;
  auto opt = [](const json& j, const char* key, double def) {
    return j.contains(key) ? j.at(key).get<double>() : def;
  };
  if (doc.contains("system")) {
    const auto& s = doc["system"];
    c.system.num_devices = static_cast<int>(opt(s, "num_devices", c.system.num_devices));
    if (s.contains("power_budget_dbm")) {
      c.system.power_budget = dbm_to_watt(s["power_budget_dbm"].get<double>());
    }
    c.system.bandwidth = opt(s, "bandwidth", c.system.bandwidth);
    c.system.noise_density = opt(s, "noise_density", c.system.noise_density);
    c.system.harvest_efficiency = opt(s, "harvest_efficiency", c.system.harvest_efficiency);
    c.system.model_size_bits = opt(s, "model_size_bits", c.system.model_size_bits);
    c.system.sensing_bits_required =
        opt(s, "sensing_bits_required", c.system.sensing_bits_required);
    c.system.source_energy_cap = opt(s, "source_energy_cap", c.system.source_energy_cap);
    if (s.contains("uplink")) c.system.uplink = uplink_from_string(s["uplink"]);
  }
  if (doc.contains("learning")) {
    const auto& l = doc["learning"];
    c.learning = derive_learning_constants(
        opt(l, "lipschitz", c.learning.lipschitz),
        opt(l, "strong_convexity", c.learning.strong_convexity),
        opt(l, "step_size", c.learning.step_size), opt(l, "hyper_rate", c.learning.hyper_rate),
        opt(l, "target_accuracy", c.learning.target_accuracy));
  }
  if (doc.contains("channel")) {
    const auto& ch = doc["channel"];
    c.channel.rician_k = opt(ch, "rician_k", c.channel.rician_k);
    c.channel.antennas_per_beam =
        static_cast<int>(opt(ch, "antennas_per_beam", c.channel.antennas_per_beam));
    c.channel.dist_min = opt(ch, "dist_min", c.channel.dist_min);
    c.channel.dist_max = opt(ch, "dist_max", c.channel.dist_max);
    c.channel.fading_scale = opt(ch, "fading_scale", c.channel.fading_scale);
    c.channel.pathloss_exponent = opt(ch, "pathloss_exponent", c.channel.pathloss_exponent);
  }
  if (doc.contains("ranges")) {
    const auto& r = doc["ranges"];
    c.ranges.sensing_rate_min = opt(r, "sensing_rate_min", c.ranges.sensing_rate_min);
    c.ranges.sensing_rate_max = opt(r, "sensing_rate_max", c.ranges.sensing_rate_max);
    c.ranges.sense_energy_min = opt(r, "sense_energy_min", c.ranges.sense_energy_min);
    c.ranges.sense_energy_max = opt(r, "sense_energy_max", c.ranges.sense_energy_max);
    c.ranges.reward_min = opt(r, "reward_min", c.ranges.reward_min);
    c.ranges.reward_max = opt(r, "reward_max", c.ranges.reward_max);
    c.ranges.cycles_per_bit_min = opt(r, "cycles_per_bit_min", c.ranges.cycles_per_bit_min);
    c.ranges.cycles_per_bit_max = opt(r, "cycles_per_bit_max", c.ranges.cycles_per_bit_max);
    c.ranges.cpu_energy_coeff = opt(r, "cpu_energy_coeff", c.ranges.cpu_energy_coeff);
    c.ranges.cpu_rate_min = opt(r, "cpu_rate_min", c.ranges.cpu_rate_min);
    c.ranges.cpu_rate_max = opt(r, "cpu_rate_max", c.ranges.cpu_rate_max);
    c.ranges.tx_power_max = opt(r, "tx_power_max", c.ranges.tx_power_max);
  }
  if (doc.contains("driver")) {
    const auto& d = doc["driver"];
    c.driver.eps = opt(d, "eps", c.driver.eps);
    c.driver.max_iter = static_cast<int>(opt(d, "max_iter", c.driver.max_iter));
    c.driver.solver_tol = opt(d, "solver_tol", c.driver.solver_tol);
  }
  if (doc.contains("sweep")) c.sweep = sweep_variable_from_string(doc["sweep"]);
  if (doc.contains("grid")) c.grid = doc["grid"].get<std::vector<double>>();
  if (doc.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : doc["schemes"]) c.schemes.push_back(scheme_from_string(s));
  }
  if (doc.contains("realizations")) c.realizations = doc["realizations"].get<int>();
  if (doc.contains("seed_base")) c.seed_base = doc["seed_base"].get<uint64_t>();
  if (doc.contains("output")) c.output_path = doc["output"].get<std::string>();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config parse error: " + std::string(e.what()));
  }
  return config_from_json(doc);
}

SweepTable run_sweep(const ExperimentConfig& config, int workers) {
  config.validate();
  SweepTable table;
  table.config = config;

  struct Job {
    int grid_index;
    int scheme_index;
    int realization;
  };
  std::vector<Job> jobs;
  for (int g = 0; g < static_cast<int>(config.grid.size()); ++g) {
    for (int s = 0; s < static_cast<int>(config.schemes.size()); ++s) {
      for (int r = 0; r < config.realizations; ++r) jobs.push_back({g, s, r});
    }
  }
  table.runs.resize(jobs.size());

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      const Job& job = jobs[i];
      RunRecord rec;
      rec.sweep_value = config.grid[job.grid_index];
      rec.scheme = config.schemes[job.scheme_index];
      rec.realization = job.realization;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        ExperimentConfig point = config;
        apply_sweep_value(point, rec.sweep_value);
        const uint64_t seed = config.seed_base + static_cast<uint64_t>(job.realization);
        const auto inst = sample_instance(point.system, point.learning, point.ranges,
                                          point.channel, seed);
        DriverOptions opts = point.driver;
        opts.seed = seed;
        const auto trace = run_benchmark(inst, rec.scheme, opts);
        rec.ok = true;
        rec.objective = trace.final_objective();
        rec.iterations = static_cast<int>(trace.iterations.size());
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
      }
      rec.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      table.runs[i] = std::move(rec);
    }
  };
  const int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // aggregate in grid x scheme order; runs are already indexed that way
  for (int g = 0; g < static_cast<int>(config.grid.size()); ++g) {
    for (int s = 0; s < static_cast<int>(config.schemes.size()); ++s) {
      SweepRow row;
      row.sweep_value = config.grid[g];
      row.scheme = config.schemes[s];
      double sum = 0, sum_sq = 0, iter_sum = 0;
      for (int r = 0; r < config.realizations; ++r) {
        const size_t idx =
            (static_cast<size_t>(g) * config.schemes.size() + s) * config.realizations + r;
        const RunRecord& rec = table.runs[idx];
        if (rec.ok) {
          ++row.n_ok;
          sum += rec.objective;
          iter_sum += rec.iterations;
        } else {
          ++row.n_fail;
        }
      }
      if (row.n_ok > 0) {
        row.mean_completion = sum / row.n_ok;
        row.mean_iterations = iter_sum / row.n_ok;
        for (int r = 0; r < config.realizations; ++r) {
          const size_t idx =
              (static_cast<size_t>(g) * config.schemes.size() + s) * config.realizations + r;
          const RunRecord& rec = table.runs[idx];
          if (rec.ok) {
            const double d = rec.objective - row.mean_completion;
            sum_sq += d * d;
          }
        }
        row.std_completion = std::sqrt(sum_sq / row.n_ok);
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

std::string table_csv(const SweepTable& table) {
  const auto& c = table.config;
  std::string out;
  out += "# sweep=" + to_string(c.sweep) + " realizations=" + std::to_string(c.realizations) +
         " seed_base=" + std::to_string(c.seed_base) + "\n";
  out += "# learning: L=" + fmt(c.learning.lipschitz) +
         " gamma=" + fmt(c.learning.strong_convexity) + " delta=" + fmt(c.learning.step_size) +
         " xi=" + fmt(c.learning.hyper_rate) + " eps0=" + fmt(c.learning.target_accuracy) +
         " a=" + fmt(c.learning.global_round_scale) +
         " nu=" + fmt(c.learning.local_round_scale) + "\n";
  out += "# system: N=" + std::to_string(c.system.num_devices) +
         " P0=" + fmt(c.system.power_budget) + " B=" + fmt(c.system.bandwidth) +
         " n0=" + fmt(c.system.noise_density) + " s=" + fmt(c.system.model_size_bits) +
         " D0=" + fmt(c.system.sensing_bits_required) + " Na=" +
         std::to_string(c.channel.antennas_per_beam) + "\n";
  out += "sweep_value,scheme,mean_T,std_T,mean_iters,n_ok,n_fail\n";
  for (const auto& r : table.rows) {
    out += fmt(r.sweep_value) + ',' + to_string(r.scheme) + ',' + fmt(r.mean_completion) +
           ',' + fmt(r.std_completion) + ',' + fmt(r.mean_iterations) + ',' +
           std::to_string(r.n_ok) + ',' + std::to_string(r.n_fail) + '\n';
  }
  return out;
}

void emit_csv(const SweepTable& table, const std::string& path) {
  if (table.rows.empty()) throw std::invalid_argument("refusing to emit an empty table");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << table_csv(table);
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<SweepRow> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<SweepRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "sweep_value,scheme,mean_T,std_T,mean_iters,n_ok,n_fail") {
        throw std::runtime_error("unexpected CSV header: " + line);
      }
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    std::string field;
    SweepRow r;
    std::getline(ss, field, ',');
    r.sweep_value = std::stod(field);
    std::getline(ss, field, ',');
    r.scheme = scheme_from_string(field);
    std::getline(ss, field, ',');
    r.mean_completion = std::stod(field);
    std::getline(ss, field, ',');
    r.std_completion = std::stod(field);
    std::getline(ss, field, ',');
    r.mean_iterations = std::stod(field);
    std::getline(ss, field, ',');
    r.n_ok = std::stoi(field);
    std::getline(ss, field, ',');
    r.n_fail = std::stoi(field);
    rows.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("no CSV header found in " + path);
  return rows;
}

}  // namespace s2fl
