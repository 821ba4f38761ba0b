#include "s2fl/benchmarks.hpp"

#include <algorithm>
#include <stdexcept>

namespace s2fl {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::S2fl: return "s2fl";
    case Scheme::S2flNoma: return "s2fl_noma";
    case Scheme::Ftd: return "ftd";
    case Scheme::Fla: return "fla";
    case Scheme::Ppt: return "ppt";
    case Scheme::Eba: return "eba";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "s2fl") return Scheme::S2fl;
  if (name == "s2fl_noma") return Scheme::S2flNoma;
  if (name == "ftd") return Scheme::Ftd;
  if (name == "fla") return Scheme::Fla;
  if (name == "ppt") return Scheme::Ppt;
  if (name == "eba") return Scheme::Eba;
  throw std::invalid_argument("unknown scheme: " + name);
}

Freezes scheme_freezes(Scheme scheme, const ProblemInstance& inst) {
  Freezes f;
  switch (scheme) {
    case Scheme::S2fl:
    case Scheme::S2flNoma:
      break;
    case Scheme::Ftd: {
      double tau_s = 0.0;
      for (const auto& d : inst.devices) {
        tau_s = std::max(tau_s, inst.system.sensing_bits_required / d.sensing_rate);
      }
      f.tau_sense = tau_s;
      break;
    }
    case Scheme::Fla:
      f.local_accuracy = 0.25;
      break;
    case Scheme::Ppt:
      f.beam_proportional = true;
      break;
    case Scheme::Eba:
      f.equal_bandwidth = true;
      break;
  }
  return f;
}

Trace run_benchmark(const ProblemInstance& inst, Scheme scheme, const DriverOptions& opts) {
  const Uplink mode = scheme == Scheme::S2flNoma ? Uplink::Noma : Uplink::Fdma;
  return run(inst, mode, opts, scheme_freezes(scheme, inst));
}

}  // namespace s2fl
