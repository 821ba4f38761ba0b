#include "s2fl/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace s2fl {

double clamp_anchor(double v) {
  if (!(v > 0) && v != 0) throw std::invalid_argument("surrogate anchor must be positive");
  return std::max(v, kAnchorFloor);
}

double SqrtProductUpper::operator()(double x, double y) const {
  return 0.5 * (std::sqrt(y_anchor / x_anchor) * x + std::sqrt(x_anchor / y_anchor) * y);
}

SqrtProductUpper sqrt_product_upper(double x_anchor, double y_anchor) {
  return {clamp_anchor(x_anchor), clamp_anchor(y_anchor)};
}

double BilinearUpper::operator()(double t, double z) const {
  return 0.5 * ((z_anchor / t_anchor) * t * t + (t_anchor / z_anchor) * z * z);
}

BilinearUpper bilinear_upper(double t_anchor, double z_anchor) {
  return {clamp_anchor(t_anchor), clamp_anchor(z_anchor)};
}

double BilinearSquareUpper::operator()(double t, double z) const {
  const double zb2 = z_anchor * z_anchor;
  return 0.5 * ((zb2 / t_anchor) * t * t + (t_anchor / zb2) * z * z * z * z);
}

BilinearSquareUpper bilinear_square_upper(double t_anchor, double z_anchor) {
  return {clamp_anchor(t_anchor), clamp_anchor(z_anchor)};
}

double BilinearLower::operator()(double t, double z) const {
  if (!(z > 0)) throw std::invalid_argument("bilinear_lower requires z > 0");
  return 2.0 * z_anchor * std::sqrt(t_anchor) * std::sqrt(t) -
         t_anchor * z_anchor * z_anchor / z;
}

BilinearLower bilinear_lower(double t_anchor, double z_anchor) {
  return {clamp_anchor(t_anchor), clamp_anchor(z_anchor)};
}

double RatioUpper::operator()(double u, double v) const {
  if (!(v > 0)) throw std::invalid_argument("ratio_upper requires v > 0");
  const double a = u / u_anchor + v_anchor / v;
  return u_anchor / (4.0 * v_anchor) * a * a;
}

RatioUpper ratio_upper(double u_anchor, double v_anchor) {
  return {clamp_anchor(u_anchor), clamp_anchor(v_anchor)};
}

double FdmaRateLower::exact(double b, double p) const {
  if (b <= 0 || p <= 0) return 0.0;
  return b * std::log(1.0 + p * gain / (b * noise_density));
}

double FdmaRateLower::operator()(double b, double p) const {
  if (!(b > 0) || !(p > 0)) throw std::invalid_argument("fdma rate surrogate requires b, p > 0");
  return lambda + mu * (2.0 - p_anchor / p - b / b_anchor) - upsilon / b;
}

FdmaRateLower fdma_rate_lower(double b_anchor, double p_anchor, double gain,
                              double noise_density) {
  FdmaRateLower s;
  s.b_anchor = clamp_anchor(b_anchor);
  s.p_anchor = clamp_anchor(p_anchor);
  s.gain = gain;
  s.noise_density = noise_density;
  const double snr = s.p_anchor * gain / (s.b_anchor * noise_density);
  const double log_term = std::log1p(snr);
  s.lambda = 2.0 * s.b_anchor * log_term;
  s.mu = s.b_anchor / (1.0 + 1.0 / snr);
  s.upsilon = s.b_anchor * s.b_anchor * log_term;
  return s;
}

double NomaRateLower::interference(std::span<const double> tx_power) const {
  double sum = 0.0;
  for (size_t k = device + 1; k < tx_power.size(); ++k) sum += tx_power[k] * gains[k];
  return sum;
}

double NomaRateLower::exact(std::span<const double> tx_power, double tau_tx) const {
  const double p = tx_power[device];
  if (p <= 0 || tau_tx <= 0) return 0.0;
  return tau_tx * std::log(1.0 + p * gains[device] / (noise_floor + interference(tx_power)));
}

double NomaRateLower::operator()(std::span<const double> tx_power, double tau_tx) const {
  const double p = tx_power[device];
  if (!(p > 0) || !(tau_tx > 0)) {
    throw std::invalid_argument("noma rate surrogate requires p_n, tau_c > 0");
  }
  const double denom = noise_floor + interference(tx_power);
  return lambda + mu * (2.0 - p_anchor / p - denom / denom_anchor) - upsilon / tau_tx;
}

NomaRateLower noma_rate_lower(std::span<const double> tx_power_anchor, double tau_tx_anchor,
                              int device, std::span<const double> gains, double noise_density,
                              double bandwidth) {
  if (device < 0 || device >= static_cast<int>(gains.size())) {
    throw std::invalid_argument("device index out of range");
  }
  NomaRateLower s;
  s.device = device;
  s.gains.assign(gains.begin(), gains.end());
  s.noise_floor = noise_density * bandwidth;
  s.p_anchor = clamp_anchor(tx_power_anchor[device]);
  const double tau_anchor = clamp_anchor(tau_tx_anchor);
  double interf = 0.0;
  for (size_t k = device + 1; k < tx_power_anchor.size(); ++k) {
    interf += clamp_anchor(tx_power_anchor[k]) * gains[k];
  }
  s.denom_anchor = s.noise_floor + interf;
  const double sinr = s.p_anchor * gains[device] / s.denom_anchor;
  const double log_term = std::log1p(sinr);
  s.lambda = 2.0 * tau_anchor * log_term;
  s.mu = tau_anchor / (1.0 + 1.0 / sinr);
  s.upsilon = tau_anchor * tau_anchor * log_term;
  return s;
}

}  // namespace s2fl
