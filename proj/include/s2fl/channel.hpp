#pragma once

#include <complex>
#include <span>
#include <vector>

#include "s2fl/model.hpp"

namespace s2fl {

// Rician beam-channel construction for one network realization.
struct ChannelConfig {
  double rician_k = 3.0;      // power ratio of the deterministic component
  int antennas_per_beam = 4;  // Na
  double dist_min = 1.0;      // m
  double dist_max = 5.0;
  double fading_scale = 5e-4;     // coefficient of the average fading power
  double pathloss_exponent = 2.0; // average power = fading_scale * dist^-exponent
};

// Per-device parameter ranges sampled uniformly for each realization.
struct DeviceRanges {
  double sensing_rate_min = 1e6;  // bits/s
  double sensing_rate_max = 5e6;
  double sense_energy_min = 1e-12; // J/bit
  double sense_energy_max = 1e-11;
  double reward_min = 1e-12;       // J/bit
  double reward_max = 1e-11;
  double cycles_per_bit_min = 10;
  double cycles_per_bit_max = 20;
  double cpu_energy_coeff = 1e-28; // J s^2 / cycle^3, identical across devices
  double cpu_rate_min = 1e8;       // cycles/s
  double cpu_rate_max = 2e9;
  double tx_power_max = 0.01;      // W (10 dBm)
};

// ||g||^2
double effective_gain(std::span<const std::complex<double>> channel_vector);

// Draws one reproducible realization. Device n consumes only stream n of the
// seed, so instances are deterministic and independent of evaluation order.
// Scalar device parameters are drawn before the fading entries, and the NLoS
// entries are drawn antenna-by-antenna, so realizations with different
// antenna counts share their common prefix of fading draws.
ProblemInstance sample_instance(const SystemParams& system, const LearningParams& learning,
                                const DeviceRanges& ranges, const ChannelConfig& channel,
                                uint64_t seed);

// The channel vector drawn for one device; exposed for tests.
std::vector<std::complex<double>> sample_channel_vector(const ChannelConfig& channel,
                                                        double avg_fading_power, uint64_t seed,
                                                        uint64_t stream);

}  // namespace s2fl
