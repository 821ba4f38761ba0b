#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "s2fl/model.hpp"
#include "s2fl/solver.hpp"

namespace s2fl {

// Thrown when a feasible starting point provably cannot exist; `binding`
// names the budget that cannot be met.
class InfeasibleInstance : public std::runtime_error {
 public:
  InfeasibleInstance(const std::string& binding, const std::string& what)
      : std::runtime_error(what), binding_(binding) {}
  const std::string& binding() const { return binding_; }

 private:
  std::string binding_;
};

// Variables pinned across all iterations; used by the benchmark schemes.
struct Freezes {
  std::optional<double> local_accuracy;  // eta fixed, accuracy step skipped
  std::optional<double> tau_sense;       // sensing time preset
  bool beam_proportional = false;        // P_n = P0 h_n / sum h
  bool equal_bandwidth = false;          // b_n = B / N
};

struct DriverOptions {
  double eps = 1e-3;        // relative objective change stopping threshold
  int max_iter = 100;
  uint64_t seed = 0;
  double init_jitter = 0;   // +-10% multiplicative starting-point jitter when > 0
  double solver_tol = 1e-8;
  double accuracy_floor = 1e-4;  // eta clamped to [floor, 1 - floor] in subproblems
};

struct IterationRecord {
  int index = 0;            // kappa
  double local_accuracy = 0;
  Allocation anchor;        // point at which the surrogates were built
  Allocation alloc;
  double objective = 0;     // completion time at this iterate
  SolverResult accuracy_solve;
  SolverResult resource_solve;
};

enum class TraceStatus { Converged, IterationCap };

struct Trace {
  Uplink mode = Uplink::Fdma;
  Allocation initial;
  double initial_objective = 0;
  std::vector<IterationRecord> iterations;
  TraceStatus status = TraceStatus::IterationCap;

  const Allocation& final_allocation() const {
    return iterations.empty() ? initial : iterations.back().alloc;
  }
  double final_objective() const {
    return iterations.empty() ? initial_objective : iterations.back().objective;
  }
};

// Constructive feasible start (eta = 0.5, slowest-device sensing time, CPU
// rates at minimum, full transmit power, 5% harvest margin). Throws
// InfeasibleInstance if the source energy cap cannot be met.
Allocation init_feasible(const ProblemInstance& inst, const Freezes& freezes = {},
                         uint64_t seed = 0, double jitter = 0);

// Long-timescale subproblem: re-optimize (eta, tau_l) around the anchor.
// Only eta feeds back into the next resource step.
std::pair<double, double> accuracy_step(const ProblemInstance& inst, const Allocation& anchor,
                                        const DriverOptions& opts = {});

// Short-timescale subproblem: rebuild all surrogates at the anchor, assemble
// the convex resource program and solve it.
Allocation resource_step(const ProblemInstance& inst, double local_accuracy,
                         const Allocation& anchor, const Freezes& freezes = {},
                         const DriverOptions& opts = {});

// Builders exposed for tests and the program-dump interface.
ConvexProgram build_accuracy_program(const ProblemInstance& inst, const Allocation& anchor,
                                     double accuracy_floor);
ConvexProgram build_resource_program(const ProblemInstance& inst, double local_accuracy,
                                     const Allocation& anchor, const Freezes& freezes = {});

// Path-following loop: alternate accuracy and resource solves from
// init_feasible until the relative objective change drops below opts.eps.
Trace run(const ProblemInstance& inst, Uplink mode, const DriverOptions& opts = {},
          const Freezes& freezes = {});

}  // namespace s2fl
