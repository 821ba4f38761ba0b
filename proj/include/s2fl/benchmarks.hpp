#pragma once

#include <string>

#include "s2fl/sca.hpp"

namespace s2fl {

// Resource-allocation schemes compared in the experiments. S2fl is the full
// joint design; the others pin one decision and re-run the same driver.
enum class Scheme {
  S2fl,       // joint optimization, FDMA uplink
  S2flNoma,   // joint optimization, NOMA uplink
  Ftd,        // fixed sensing time (slowest device meets the data quota)
  Fla,        // fixed local accuracy eta = 0.25
  Ppt,        // beam power proportional to channel gain
  Eba,        // equal bandwidth split
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

// Freezes that turn the joint driver into the given benchmark.
Freezes scheme_freezes(Scheme scheme, const ProblemInstance& inst);

// Runs the driver under the scheme's freezes; the uplink is NOMA only for
// S2flNoma and FDMA otherwise.
Trace run_benchmark(const ProblemInstance& inst, Scheme scheme, const DriverOptions& opts = {});

}  // namespace s2fl
