#pragma once

// Independent N=1 brute-force oracle. For a single device the problem
// collapses to three free decisions (eta, p, f): the remaining quantities are
// optimal at their binding values — tau_s = D0/r (sensing data quota),
// tau_l = eta_loc C r tau_s / f (local compute time), tau_c = s / R(p)
// (model upload), tau_h = spend / (phi P0 h) (harvest exactly the spend),
// P = P0 and b = B (more beam power / bandwidth never hurts). The search is
// a coarse grid followed by shrinking local refinement, evaluated purely
// from the closed forms so it shares nothing with the solver under test.

#include <algorithm>
#include <cmath>
#include <limits>

#include "s2fl/model.hpp"

namespace s2fl::oracle {

struct Point {
  double eta = 0, tx_power = 0, cpu_rate = 0;
  double objective = std::numeric_limits<double>::infinity();
};

inline double completion_n1(const ProblemInstance& inst, double eta, double p, double f) {
  const auto& sys = inst.system;
  const auto& d = inst.devices[0];
  const auto rc = round_counts(inst.learning, eta);
  if (rc.unbounded) return std::numeric_limits<double>::infinity();

  const double tau_s = sys.sensing_bits_required / d.sensing_rate;
  const double bits = d.sensing_rate * tau_s;
  const double tau_l = rc.local_rounds * d.cycles_per_bit * bits / f;
  const double rate = sys.bandwidth * std::log2(1.0 + d.channel_gain * p /
                                                (sys.noise_density * sys.bandwidth));
  if (rate <= 0) return std::numeric_limits<double>::infinity();
  const double tau_c = sys.model_size_bits / rate;

  const double compute_energy =
      rc.local_rounds * d.cpu_energy_coeff * d.cycles_per_bit * bits * f * f;
  const double spend = (d.sense_energy_per_bit + d.reward_per_bit) * bits + compute_energy +
                       p * tau_c;
  const double tau_h = spend / (sys.harvest_efficiency * sys.power_budget * d.channel_gain);
  if (std::isfinite(sys.source_energy_cap) && sys.power_budget * tau_h > sys.source_energy_cap) {
    return std::numeric_limits<double>::infinity();
  }
  return rc.global_rounds * (tau_h + tau_s + tau_l + tau_c);
}

inline Point brute_force_n1(const ProblemInstance& inst) {
  const auto& d = inst.devices[0];
  double eta_lo = 1e-4, eta_hi = 0.95;
  double p_lo = 1e-4 * d.tx_power_max, p_hi = d.tx_power_max;
  double f_lo = d.cpu_rate_min, f_hi = d.cpu_rate_max;

  Point best;
  const int steps = 24;
  for (int round = 0; round < 60; ++round) {
    Point local = best;
    for (int i = 0; i <= steps; ++i) {
      const double eta = eta_lo + (eta_hi - eta_lo) * i / steps;
      for (int j = 0; j <= steps; ++j) {
        const double p = p_lo * std::pow(p_hi / p_lo, double(j) / steps);
        for (int k = 0; k <= steps; ++k) {
          const double f = f_lo * std::pow(f_hi / f_lo, double(k) / steps);
          const double obj = completion_n1(inst, eta, p, f);
          if (obj < local.objective) local = {eta, p, f, obj};
        }
      }
    }
    best = local;
    // shrink the windows around the incumbent, clipped to the true boxes
    const auto shrink = [](double& lo, double& hi, double mid, double box_lo, double box_hi) {
      const double half = 0.35 * (hi - lo);
      lo = std::max(box_lo, mid - half);
      hi = std::min(box_hi, mid + half);
    };
    shrink(eta_lo, eta_hi, best.eta, 1e-4, 0.95);
    shrink(p_lo, p_hi, best.tx_power, 1e-4 * d.tx_power_max, d.tx_power_max);
    shrink(f_lo, f_hi, best.cpu_rate, d.cpu_rate_min, d.cpu_rate_max);
    if (eta_hi - eta_lo < 1e-7) break;
  }
  return best;
}

}  // namespace s2fl::oracle
