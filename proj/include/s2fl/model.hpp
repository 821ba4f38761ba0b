#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace s2fl {

enum class Uplink { Fdma, Noma };

std::string to_string(Uplink mode);
Uplink uplink_from_string(const std::string& s);

// Learning-side constants of the round-count model. `global_round_scale`
// (a) and `local_round_scale` (nu) are derived, the rest are inputs.
struct LearningParams {
  double lipschitz = 0;          // L
  double strong_convexity = 0;   // gamma
  double step_size = 0;          // delta, must be < 2/L
  double hyper_rate = 0;         // xi, must be < gamma/L
  double target_accuracy = 0;    // eps0 in (0,1)
  double global_round_scale = 0; // a = -2 L^2 ln(eps0) / (gamma^2 xi)
  double local_round_scale = 0;  // nu = 2 / ((2 - L delta) delta gamma ln 2)
};

LearningParams derive_learning_constants(double lipschitz, double strong_convexity,
                                         double step_size, double hyper_rate,
                                         double target_accuracy);

struct DeviceParams {
  int index = 0;
  double sensing_rate = 0;         // r_n, bits/s
  double sense_energy_per_bit = 0; // q_n^s, J/bit
  double reward_per_bit = 0;       // q_n^r, J/bit
  double cycles_per_bit = 0;       // C_n
  double cpu_energy_coeff = 0;     // zeta_n, J s^2 / cycle^3
  double cpu_rate_min = 0;         // cycles/s
  double cpu_rate_max = 0;
  double tx_power_max = 0;         // W
  double channel_gain = 0;         // h_n, power gain
};

struct SystemParams {
  int num_devices = 0;
  double power_budget = 0;          // P0, W
  double bandwidth = 0;             // B, Hz
  double noise_density = 0;         // n0, W/Hz
  double harvest_efficiency = 0;    // phi in (0,1)
  double model_size_bits = 0;       // s
  double sensing_bits_required = 0; // D0
  double source_energy_cap = std::numeric_limits<double>::infinity(); // E_max, J
  Uplink uplink = Uplink::Fdma;
};

struct ProblemInstance {
  SystemParams system;
  LearningParams learning;
  std::vector<DeviceParams> devices; // NOMA: sorted by non-increasing channel_gain
  uint64_t seed = 0;

  void validate() const; // throws std::invalid_argument naming the violation
};

// One candidate decision point. `bandwidth` is per-device only for FDMA and
// is left empty for NOMA allocations.
struct Allocation {
  std::vector<double> beam_power; // P_n, W
  std::vector<double> tx_power;   // p_n, W
  std::vector<double> cpu_rate;   // f_n, cycles/s
  std::vector<double> bandwidth;  // b_n, Hz (FDMA)
  double tau_harvest = 0;         // s
  double tau_sense = 0;
  double tau_local = 0;
  double tau_tx = 0;
  double local_accuracy = 1;      // eta in (0, 1]

  double phase_time_sum() const { return tau_harvest + tau_sense + tau_local + tau_tx; }
};

struct RoundCounts {
  double local_rounds = 0;  // real-valued; rounding happens only in reporting
  double global_rounds = 0;
  bool unbounded = false;   // eta == 1 with a > 0
};

RoundCounts round_counts(const LearningParams& learning, double local_accuracy);

struct DeviceEnergy {
  double harvested = 0;  // E_n^h
  double reward = 0;     // E_n^r
  double sensing = 0;    // E_n^s
  double computing = 0;  // E_n^l
  double transmit = 0;   // E_n^c
  double slack() const { return harvested - (reward + sensing + computing + transmit); }
};

std::vector<DeviceEnergy> energy_breakdown(const ProblemInstance& inst, const Allocation& alloc);

// Uplink rate of device n in bits/s, continuously extended to 0 at
// b_n = 0 or p_n = 0. NOMA assumes SIC order (devices sorted by gain).
double achievable_rate(const ProblemInstance& inst, const Allocation& alloc, int n);

// Objective: global_rounds * (tau_h + tau_s + tau_l + tau_c). Returns +inf
// when eta = 1 makes the global round count unbounded.
double total_completion_time(const Allocation& alloc, const LearningParams& learning);

struct ConstraintSlack {
  std::string name;   // e.g. "energy[3]"
  double slack = 0;   // >= 0 means satisfied
  double scale = 1;   // characteristic magnitude for relative tolerance
  bool ok = true;
};

struct FeasibilityReport {
  std::vector<ConstraintSlack> rows;
  bool feasible = true;
  std::string worst_row;        // most violated (by relative slack)
  double worst_relative = 0;    // min slack/scale over all rows

  const ConstraintSlack* find(const std::string& name) const;
};

// Evaluates every constraint of the completion-time problem at relative
// tolerance tol_rel. In NOMA mode the rate rows use the SIC rate and the
// bandwidth-partition row is dropped. Infeasibility is data, not an error.
FeasibilityReport check_feasibility(const ProblemInstance& inst, const Allocation& alloc,
                                    double tol_rel);

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace s2fl
