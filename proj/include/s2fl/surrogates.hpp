#pragma once

#include <span>
#include <vector>

namespace s2fl {

// Inner convex/concave approximations anchored at the previous iterate.
// Every surrogate is tight at its anchor and bounds the exact term on the
// positive orthant: "upper" kinds overestimate (convex), "lower" kinds
// underestimate (concave). Anchors are clamped to a small positive floor so
// coefficients stay finite when an iterate grazes zero.

inline constexpr double kAnchorFloor = 1e-12;

double clamp_anchor(double v);

// sqrt(x*y) <= (1/2) (sqrt(ybar/xbar) x + sqrt(xbar/ybar) y)
struct SqrtProductUpper {
  double x_anchor, y_anchor;
  double operator()(double x, double y) const;
};
SqrtProductUpper sqrt_product_upper(double x_anchor, double y_anchor);

// t*z <= (1/2) ((zbar/tbar) t^2 + (tbar/zbar) z^2)
struct BilinearUpper {
  double t_anchor, z_anchor;
  double operator()(double t, double z) const;
};
BilinearUpper bilinear_upper(double t_anchor, double z_anchor);

// t*z^2 <= (1/2) ((zbar^2/tbar) t^2 + (tbar/zbar^2) z^4)
struct BilinearSquareUpper {
  double t_anchor, z_anchor;
  double operator()(double t, double z) const;
};
BilinearSquareUpper bilinear_square_upper(double t_anchor, double z_anchor);

// t*z >= 2 zbar sqrt(tbar) sqrt(t) - tbar zbar^2 / z   (z > 0)
struct BilinearLower {
  double t_anchor, z_anchor;
  double operator()(double t, double z) const;
};
BilinearLower bilinear_lower(double t_anchor, double z_anchor);

// u/v <= (ubar / (4 vbar)) (u/ubar + vbar/v)^2   (v > 0)
struct RatioUpper {
  double u_anchor, v_anchor;
  double operator()(double u, double v) const;
};
RatioUpper ratio_upper(double u_anchor, double v_anchor);

// Concave lower bound on b * ln(1 + p h / (b n0)) in (b, p); natural-log
// convention, the log2 factor of the bit rate is absorbed by the caller.
struct FdmaRateLower {
  double lambda, mu, upsilon;  // bound coefficients
  double b_anchor, p_anchor;
  double gain, noise_density;
  double operator()(double b, double p) const;
  double exact(double b, double p) const;
};
FdmaRateLower fdma_rate_lower(double b_anchor, double p_anchor, double gain,
                              double noise_density);

// Concave lower bound on tau_c * ln(1 + h_n p_n / (n0 B + sum_{k>n} p_k h_k))
// in (p, tau_c) for SIC-ordered devices.
struct NomaRateLower {
  double lambda, mu, upsilon;
  int device;                          // n
  double p_anchor;                     // anchor of p_n
  double denom_anchor;                 // n0 B + sum_{k>n} pbar_k h_k
  double noise_floor;                  // n0 B
  std::vector<double> gains;           // h_1..h_N (SIC order)
  double interference(std::span<const double> tx_power) const;
  double operator()(std::span<const double> tx_power, double tau_tx) const;
  double exact(std::span<const double> tx_power, double tau_tx) const;
};
NomaRateLower noma_rate_lower(std::span<const double> tx_power_anchor, double tau_tx_anchor,
                              int device, std::span<const double> gains, double noise_density,
                              double bandwidth);

}  // namespace s2fl
