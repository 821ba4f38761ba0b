#include "s2fl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace s2fl {

namespace {
constexpr double kLn2 = 0.6931471805599453094172321214582;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}
}  // namespace

std::string to_string(Uplink mode) { return mode == Uplink::Fdma ? "fdma" : "noma"; }

Uplink uplink_from_string(const std::string& s) {
  if (s == "fdma") return Uplink::Fdma;
  if (s == "noma") return Uplink::Noma;
  throw std::invalid_argument("unknown uplink mode: " + s);
}

LearningParams derive_learning_constants(double lipschitz, double strong_convexity,
                                         double step_size, double hyper_rate,
                                         double target_accuracy) {
  require(lipschitz > 0, "lipschitz must be > 0");
  require(strong_convexity > 0, "strong_convexity must be > 0");
  require(step_size > 0, "step_size must be > 0");
  require(step_size < 2.0 / lipschitz, "step_size must be < 2/lipschitz");
  require(hyper_rate > 0, "hyper_rate must be > 0");
  require(hyper_rate < strong_convexity / lipschitz, "hyper_rate must be < strong_convexity/lipschitz");
  require(target_accuracy > 0 && target_accuracy <= 1, "target_accuracy must be in (0,1]");

  LearningParams lp;
  lp.lipschitz = lipschitz;
  lp.strong_convexity = strong_convexity;
  lp.step_size = step_size;
  lp.hyper_rate = hyper_rate;
  lp.target_accuracy = target_accuracy;
  lp.global_round_scale = -2.0 * lipschitz * lipschitz * std::log(target_accuracy) /
                          (strong_convexity * strong_convexity * hyper_rate);
  lp.local_round_scale =
      2.0 / ((2.0 - lipschitz * step_size) * step_size * strong_convexity * kLn2);
  return lp;
}

void ProblemInstance::validate() const {
  require(system.num_devices >= 1, "num_devices must be >= 1");
  require(static_cast<int>(devices.size()) == system.num_devices,
          "device count must equal num_devices");
  require(system.power_budget > 0, "power_budget must be > 0");
  require(system.bandwidth > 0, "bandwidth must be > 0");
  require(system.noise_density > 0, "noise_density must be > 0");
  require(system.harvest_efficiency > 0 && system.harvest_efficiency < 1,
          "harvest_efficiency must be in (0,1)");
  require(system.model_size_bits > 0, "model_size_bits must be > 0");
  require(system.sensing_bits_required > 0, "sensing_bits_required must be > 0");
  for (const auto& d : devices) {
    require(d.sensing_rate > 0, "sensing_rate must be > 0");
    require(d.sense_energy_per_bit > 0, "sense_energy_per_bit must be > 0");
    require(d.reward_per_bit > 0, "reward_per_bit must be > 0");
    require(d.cycles_per_bit > 0, "cycles_per_bit must be > 0");
    require(d.cpu_energy_coeff > 0, "cpu_energy_coeff must be > 0");
    require(d.cpu_rate_min > 0 && d.cpu_rate_min <= d.cpu_rate_max,
            "cpu rate bounds must satisfy 0 < min <= max");
    require(d.tx_power_max > 0, "tx_power_max must be > 0");
    require(d.channel_gain > 0, "channel_gain must be > 0");
  }
  if (system.uplink == Uplink::Noma) {
    for (size_t n = 1; n < devices.size(); ++n) {
      require(devices[n - 1].channel_gain >= devices[n].channel_gain,
              "NOMA instance must be sorted by non-increasing channel gain");
    }
  }
}

RoundCounts round_counts(const LearningParams& learning, double local_accuracy) {
  require(local_accuracy > 0 && local_accuracy <= 1, "local_accuracy must be in (0,1]");
  RoundCounts rc;
  rc.local_rounds = learning.local_round_scale * std::log2(1.0 / local_accuracy);
  if (local_accuracy == 1.0) {
    if (learning.global_round_scale > 0) {
      rc.global_rounds = std::numeric_limits<double>::infinity();
      rc.unbounded = true;
    } else {
      rc.global_rounds = 0.0;
    }
  } else {
    rc.global_rounds = learning.global_round_scale / (1.0 - local_accuracy);
  }
  return rc;
}

std::vector<DeviceEnergy> energy_breakdown(const ProblemInstance& inst, const Allocation& alloc) {
  const auto rc = round_counts(inst.learning, alloc.local_accuracy);
  std::vector<DeviceEnergy> out(inst.devices.size());
  for (size_t n = 0; n < inst.devices.size(); ++n) {
    const auto& d = inst.devices[n];
    const double data_bits = d.sensing_rate * alloc.tau_sense;
    auto& e = out[n];
    e.harvested = inst.system.harvest_efficiency * alloc.tau_harvest * alloc.beam_power[n] *
                  d.channel_gain;
    e.reward = d.reward_per_bit * data_bits;
    e.sensing = d.sense_energy_per_bit * data_bits;
    e.computing = rc.local_rounds * d.cpu_energy_coeff * d.cycles_per_bit * data_bits *
                  alloc.cpu_rate[n] * alloc.cpu_rate[n];
    e.transmit = alloc.tx_power[n] * alloc.tau_tx;
  }
  return out;
}

double achievable_rate(const ProblemInstance& inst, const Allocation& alloc, int n) {
  require(n >= 0 && n < static_cast<int>(inst.devices.size()), "device index out of range");
  const double h = inst.devices[n].channel_gain;
  const double p = alloc.tx_power[n];
  if (p <= 0) return 0.0;
  if (inst.system.uplink == Uplink::Fdma) {
    const double b = alloc.bandwidth[n];
    if (b <= 0) return 0.0;
    return b * std::log2(1.0 + h * p / (inst.system.noise_density * b));
  }
  const double band = inst.system.bandwidth;
  // SIC decodes in decreasing-gain order (ties by index), so device n sees
  // interference from every device decoded after it
  double interference = 0.0;
  for (int k = 0; k < static_cast<int>(inst.devices.size()); ++k) {
    if (k == n) continue;
    const double g = inst.devices[k].channel_gain;
    if (g < h || (g == h && k > n)) interference += alloc.tx_power[k] * g;
  }
  return band * std::log2(1.0 + h * p / (inst.system.noise_density * band + interference));
}

double total_completion_time(const Allocation& alloc, const LearningParams& learning) {
  const auto rc = round_counts(learning, alloc.local_accuracy);
  if (rc.unbounded) return std::numeric_limits<double>::infinity();
  return rc.global_rounds * alloc.phase_time_sum();
}

const ConstraintSlack* FeasibilityReport::find(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

FeasibilityReport check_feasibility(const ProblemInstance& inst, const Allocation& alloc,
                                    double tol_rel) {
  require(tol_rel > 0, "tol_rel must be > 0");
  FeasibilityReport rep;
  auto add = [&](const std::string& name, double slack, double scale) {
    ConstraintSlack row;
    row.name = name;
    row.slack = slack;
    row.scale = std::max(scale, 1e-300);
    row.ok = slack >= -tol_rel * row.scale;
    rep.rows.push_back(row);
  };

  // eta outside (0,1] is reported as a violated row, not an error
  Allocation eval = alloc;
  eval.local_accuracy = std::clamp(alloc.local_accuracy, 1e-12, 1.0);
  const auto rc = round_counts(inst.learning, eval.local_accuracy);
  const auto energy = energy_breakdown(inst, eval);
  const int num = inst.system.num_devices;
  const bool fdma = inst.system.uplink == Uplink::Fdma;

  for (int n = 0; n < num; ++n) {
    const auto& d = inst.devices[n];
    const auto& e = energy[n];
    const double spend = e.reward + e.sensing + e.computing + e.transmit;
    add("energy[" + std::to_string(n) + "]", e.harvested - spend,
        std::max(e.harvested, spend));

    const double data_bits = d.sensing_rate * alloc.tau_sense;
    const double compute_time =
        alloc.cpu_rate[n] > 0 ? rc.local_rounds * d.cycles_per_bit * data_bits / alloc.cpu_rate[n]
                              : (rc.local_rounds * data_bits > 0
                                     ? std::numeric_limits<double>::infinity()
                                     : 0.0);
    add("local_time[" + std::to_string(n) + "]", alloc.tau_local - compute_time,
        std::max(alloc.tau_local, compute_time));

    const double delivered = achievable_rate(inst, alloc, n) * alloc.tau_tx;
    add("model_upload[" + std::to_string(n) + "]", delivered - inst.system.model_size_bits,
        std::max(delivered, inst.system.model_size_bits));

    add("sensing_data[" + std::to_string(n) + "]",
        data_bits - inst.system.sensing_bits_required,
        std::max(data_bits, inst.system.sensing_bits_required));

    add("tx_power_lo[" + std::to_string(n) + "]", alloc.tx_power[n], d.tx_power_max);
    add("tx_power_hi[" + std::to_string(n) + "]", d.tx_power_max - alloc.tx_power[n],
        d.tx_power_max);
    add("beam_power_lo[" + std::to_string(n) + "]", alloc.beam_power[n],
        inst.system.power_budget);
    add("cpu_rate_lo[" + std::to_string(n) + "]", alloc.cpu_rate[n] - d.cpu_rate_min,
        d.cpu_rate_max);
    add("cpu_rate_hi[" + std::to_string(n) + "]", d.cpu_rate_max - alloc.cpu_rate[n],
        d.cpu_rate_max);
    if (fdma) {
      add("band_lo[" + std::to_string(n) + "]", alloc.bandwidth[n], inst.system.bandwidth);
    }
  }

  double beam_total = 0.0;
  for (int n = 0; n < num; ++n) beam_total += alloc.beam_power[n];
  add("beam_budget", inst.system.power_budget - beam_total, inst.system.power_budget);

  if (std::isfinite(inst.system.source_energy_cap)) {
    add("source_energy", inst.system.source_energy_cap - beam_total * alloc.tau_harvest,
        std::max(inst.system.source_energy_cap, beam_total * alloc.tau_harvest));
  }

  if (fdma) {
    double band_total = 0.0;
    for (int n = 0; n < num; ++n) band_total += alloc.bandwidth[n];
    add("band_budget", inst.system.bandwidth - band_total, inst.system.bandwidth);
  }

  add("tau_harvest", alloc.tau_harvest, std::max(alloc.phase_time_sum(), 1.0));
  add("tau_sense", alloc.tau_sense, std::max(alloc.phase_time_sum(), 1.0));
  add("tau_local", alloc.tau_local, std::max(alloc.phase_time_sum(), 1.0));
  add("tau_tx", alloc.tau_tx, std::max(alloc.phase_time_sum(), 1.0));
  add("accuracy_lo", alloc.local_accuracy, 1.0);
  add("accuracy_hi", 1.0 - alloc.local_accuracy, 1.0);

  rep.feasible = true;
  rep.worst_relative = std::numeric_limits<double>::infinity();
  for (const auto& r : rep.rows) {
    rep.feasible = rep.feasible && r.ok;
    const double rel = r.slack / r.scale;
    if (rel < rep.worst_relative) {
      rep.worst_relative = rel;
      rep.worst_row = r.name;
    }
  }
  return rep;
}

}  // namespace s2fl
