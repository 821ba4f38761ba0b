#pragma once

#include <span>
#include <string>
#include <vector>

#include "s2fl/convex.hpp"

namespace s2fl {

enum class SolveStatus { Optimal, MaxIter, Infeasible };

std::string to_string(SolveStatus s);

struct SolverOptions {
  double tol = 1e-8;          // stationarity and relative feasibility target
  int max_newton_total = 8000;
  double barrier_growth = 20; // multiplier of the path parameter per outer step
};

struct SolverResult {
  std::vector<double> point;
  double objective = 0;
  SolveStatus status = SolveStatus::MaxIter;
  double kkt_residual = 0;  // scaled-space residual used to certify optimality
  int iterations = 0;       // total Newton steps (both phases)
  double wall_time_s = 0;
  std::string message;      // infeasibility certificate / diagnostics
};

// Primal log-barrier method with a phase-I feasibility pass. Variables are
// normalized by their start magnitude before solving; deterministic for
// fixed inputs. `start` must lie inside the atom domains and is clamped
// strictly inside the box bounds.
SolverResult solve(const ConvexProgram& program, std::span<const double> start,
                   const SolverOptions& options = {});

inline SolverResult solve(const ConvexProgram& program, std::span<const double> start,
                          double tol) {
  SolverOptions o;
  o.tol = tol;
  return solve(program, start, o);
}

// Norm of the stationarity + complementary-slackness residuals at `point`,
// with multipliers of the near-active constraints fitted by nonnegative
// least squares. Box bounds count as constraints. Zero at an exact KKT point.
double kkt_residual(const ConvexProgram& program, std::span<const double> point);

}  // namespace s2fl
