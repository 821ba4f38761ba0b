#include "s2fl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "s2fl/rng.hpp"

namespace s2fl {

double effective_gain(std::span<const std::complex<double>> channel_vector) {
  double sum = 0.0;
  for (const auto& g : channel_vector) sum += std::norm(g);
  return sum;
}

namespace {

// Draws distance + scalar parameters + fading entries from one stream.
// Returns the device with channel_gain filled in.
DeviceParams sample_device(const ChannelConfig& channel, const DeviceRanges& ranges,
                           uint64_t seed, int index) {
  Rng rng(seed, static_cast<uint64_t>(index) + 1);
  DeviceParams d;
  d.index = index;
  const double dist = rng.uniform(channel.dist_min, channel.dist_max);
  d.sensing_rate = rng.uniform(ranges.sensing_rate_min, ranges.sensing_rate_max);
  d.sense_energy_per_bit = rng.uniform(ranges.sense_energy_min, ranges.sense_energy_max);
  d.reward_per_bit = rng.uniform(ranges.reward_min, ranges.reward_max);
  d.cycles_per_bit = rng.uniform(ranges.cycles_per_bit_min, ranges.cycles_per_bit_max);
  d.cpu_energy_coeff = ranges.cpu_energy_coeff;
  d.cpu_rate_min = ranges.cpu_rate_min;
  d.cpu_rate_max = ranges.cpu_rate_max;
  d.tx_power_max = ranges.tx_power_max;

  const double avg_power = channel.fading_scale * std::pow(dist, -channel.pathloss_exponent);
  const double k = channel.rician_k;
  const int na = channel.antennas_per_beam;
  const double los_amp = std::sqrt(k * avg_power / (k + 1.0)) / std::sqrt(double(na));
  const double nlos_amp = std::sqrt(avg_power / (k + 1.0));
  double gain = 0.0;
  for (int a = 0; a < na; ++a) {
    // standard complex normal entry: unit total variance
    const double re = rng.normal() / std::sqrt(2.0);
    const double im = rng.normal() / std::sqrt(2.0);
    const std::complex<double> g(los_amp + nlos_amp * re, nlos_amp * im);
    gain += std::norm(g);
  }
  d.channel_gain = gain;
  return d;
}

}  // namespace

std::vector<std::complex<double>> sample_channel_vector(const ChannelConfig& channel,
                                                        double avg_fading_power, uint64_t seed,
                                                        uint64_t stream) {
  Rng rng(seed, stream);
  const double k = channel.rician_k;
  const int na = channel.antennas_per_beam;
  const double los_amp = std::sqrt(k * avg_fading_power / (k + 1.0)) / std::sqrt(double(na));
  const double nlos_amp = std::sqrt(avg_fading_power / (k + 1.0));
  std::vector<std::complex<double>> g(na);
  for (int a = 0; a < na; ++a) {
    const double re = rng.normal() / std::sqrt(2.0);
    const double im = rng.normal() / std::sqrt(2.0);
    g[a] = {los_amp + nlos_amp * re, nlos_amp * im};
  }
  return g;
}

ProblemInstance sample_instance(const SystemParams& system, const LearningParams& learning,
                                const DeviceRanges& ranges, const ChannelConfig& channel,
                                uint64_t seed) {
  if (channel.rician_k < 0) throw std::invalid_argument("rician_k must be >= 0");
  if (channel.antennas_per_beam < 1) throw std::invalid_argument("antennas_per_beam must be >= 1");
  if (!(channel.dist_min > 0) || channel.dist_min > channel.dist_max) {
    throw std::invalid_argument("distance range must satisfy 0 < min <= max");
  }
  if (ranges.sensing_rate_min > ranges.sensing_rate_max ||
      ranges.sense_energy_min > ranges.sense_energy_max ||
      ranges.reward_min > ranges.reward_max ||
      ranges.cycles_per_bit_min > ranges.cycles_per_bit_max) {
    throw std::invalid_argument("device ranges must satisfy min <= max");
  }

  ProblemInstance inst;
  inst.system = system;
  inst.learning = learning;
  inst.seed = seed;
  inst.devices.reserve(system.num_devices);
  for (int n = 0; n < system.num_devices; ++n) {
    DeviceParams d = sample_device(channel, ranges, seed, n);
    // exact-zero gains break the SINR model; redraw from a shifted stream
    uint64_t retry = 1;
    while (d.channel_gain <= 0.0) {
      d = sample_device(channel, ranges, Rng::derive(seed, 0xC0FFEEull + retry++), n);
    }
    inst.devices.push_back(d);
  }
  if (system.uplink == Uplink::Noma) {
    std::stable_sort(inst.devices.begin(), inst.devices.end(),
                     [](const DeviceParams& a, const DeviceParams& b) {
                       return a.channel_gain > b.channel_gain;
                     });
  }
  inst.validate();
  return inst;
}

}  // namespace s2fl
