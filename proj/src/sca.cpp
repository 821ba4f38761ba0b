#include "s2fl/sca.hpp"

#include <algorithm>
#include <cmath>

#include "s2fl/rng.hpp"
#include "s2fl/surrogates.hpp"

namespace s2fl {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214582;
constexpr double kInf = 1e300;

double clampf(double v) { return std::max(v, kAnchorFloor); }

struct VarHandle {
  int idx = -1;      // -1: frozen at `value`
  double value = 0;  // start (and frozen) value in natural units
};

// Adds atoms that transparently fold frozen variables into constants.
struct Builder {
  ConvexProgram prog;

  VarHandle variable(const std::string& name, double lower, double upper, double start) {
    return {prog.add_variable(name, lower, upper, start), start};
  }
  static VarHandle frozen(double value) { return {-1, value}; }

  static void affine(Expression& e, const VarHandle& h, double coeff) {
    if (h.idx >= 0)
      e.affine(h.idx, coeff);
    else
      e.add_constant(coeff * h.value);
  }
  static void square(Expression& e, const VarHandle& h, double coeff) {
    if (h.idx >= 0)
      e.square(h.idx, coeff);
    else
      e.add_constant(coeff * h.value * h.value);
  }
  static void quartic(Expression& e, const VarHandle& h, double coeff) {
    if (h.idx >= 0)
      e.quartic(h.idx, coeff);
    else
      e.add_constant(coeff * h.value * h.value * h.value * h.value);
  }
  static void reciprocal(Expression& e, const VarHandle& h, double coeff) {
    if (h.idx >= 0)
      e.reciprocal(h.idx, coeff);
    else
      e.add_constant(coeff / h.value);
  }
  static void neg_sqrt(Expression& e, const VarHandle& h, double coeff) {
    if (h.idx >= 0)
      e.neg_sqrt(h.idx, coeff);
    else
      e.add_constant(-coeff * std::sqrt(h.value));
  }
  static void quotient_square(Expression& e, const VarHandle& u, const VarHandle& v,
                              double coeff, double u_anchor, double v_anchor) {
    // frozen inputs are encoded through the inner affine map (scale 0)
    e.quotient_square(u.idx, v.idx, coeff, u_anchor, v_anchor, u.idx >= 0 ? 1.0 : 0.0,
                      u.idx >= 0 ? 0.0 : u.value, v.idx >= 0 ? 1.0 : 0.0,
                      v.idx >= 0 ? 0.0 : v.value);
  }
};

// Freezes can turn a whole row into a constant (e.g. the binding sensing row
// under a preset tau_s, which sits exactly on the boundary). Such rows carry
// no decision and would break the strict-interior requirement, so they are
// validated once and removed.
void prune_constant_rows(ConvexProgram& prog) {
  std::vector<double> at_start(prog.vars.size());
  for (size_t i = 0; i < prog.vars.size(); ++i) at_start[i] = prog.vars[i].start;
  std::erase_if(prog.constraints, [&](const ConstraintRow& row) {
    for (const auto& t : row.expr.terms) {
      if (t.var >= 0 || (t.kind == Atom::QuotientSquare && t.var2 >= 0)) return false;
    }
    double gross = std::abs(row.expr.constant);
    const Expression& e = row.expr;
    const double value = e.value(at_start);
    for (const auto& t : e.terms) gross += std::abs(t.coeff);
    if (value > 1e-9 * std::max(1.0, gross)) {
      throw InfeasibleInstance(row.label, "frozen variables violate " + row.label + " by " +
                                              std::to_string(value));
    }
    return true;
  });
}

Allocation unpack_point(const ProblemInstance& inst, double local_accuracy,
                        const Freezes& freezes, std::span<const double> point) {
  Allocation out;
  out.local_accuracy = local_accuracy;
  size_t i = 0;
  out.tau_harvest = point[i++];
  out.tau_sense = freezes.tau_sense ? *freezes.tau_sense : point[i++];
  out.tau_local = point[i++];
  out.tau_tx = point[i++];
  const int num = inst.system.num_devices;
  const bool fdma = inst.system.uplink == Uplink::Fdma;
  out.beam_power.resize(num);
  out.tx_power.resize(num);
  out.cpu_rate.resize(num);
  out.bandwidth.assign(fdma ? num : 0, 0.0);
  double gain_sum = 0.0;
  for (const auto& d : inst.devices) gain_sum += d.channel_gain;
  for (int n = 0; n < num; ++n) {
    out.beam_power[n] = freezes.beam_proportional
                            ? inst.system.power_budget * inst.devices[n].channel_gain / gain_sum
                            : point[i++];
    out.tx_power[n] = point[i++];
    out.cpu_rate[n] = point[i++];
    if (fdma) {
      out.bandwidth[n] = freezes.equal_bandwidth ? inst.system.bandwidth / num : point[i++];
    }
  }
  return out;
}

Allocation clamped_anchor(const ProblemInstance& inst, const Allocation& a) {
  Allocation out = a;
  out.tau_harvest = clampf(a.tau_harvest);
  out.tau_sense = clampf(a.tau_sense);
  out.tau_local = clampf(a.tau_local);
  out.tau_tx = clampf(a.tau_tx);
  for (auto& v : out.beam_power) v = clampf(v);
  for (auto& v : out.tx_power) v = clampf(v);
  for (auto& v : out.cpu_rate) v = clampf(v);
  for (auto& v : out.bandwidth) v = clampf(v);
  (void)inst;
  return out;
}

}  // namespace

Allocation init_feasible(const ProblemInstance& inst, const Freezes& freezes, uint64_t seed,
                         double jitter) {
  inst.validate();
  const auto& sys = inst.system;
  const int num = sys.num_devices;
  const bool fdma = sys.uplink == Uplink::Fdma;

  if (sys.source_energy_cap <= 0) {
    throw InfeasibleInstance("source_energy",
                             "source energy cap is zero; no harvesting possible");
  }

  Allocation a;
  a.local_accuracy = freezes.local_accuracy.value_or(0.5);
  a.beam_power.resize(num);
  a.tx_power.resize(num);
  a.cpu_rate.resize(num);
  if (fdma) a.bandwidth.resize(num);

  double tau_s = 0.0;
  for (const auto& d : inst.devices) {
    tau_s = std::max(tau_s, sys.sensing_bits_required / d.sensing_rate);
  }
  a.tau_sense = freezes.tau_sense.value_or(tau_s);

  double gain_sum = 0.0;
  for (const auto& d : inst.devices) gain_sum += d.channel_gain;
  for (int n = 0; n < num; ++n) {
    const auto& d = inst.devices[n];
    a.cpu_rate[n] = d.cpu_rate_min;
    a.tx_power[n] = d.tx_power_max;
    if (fdma) a.bandwidth[n] = sys.bandwidth / num;
    a.beam_power[n] = freezes.beam_proportional
                          ? sys.power_budget * d.channel_gain / gain_sum
                          : sys.power_budget / num;
  }

  if (jitter > 0) {
    Rng rng(seed, 0x1417ull);
    for (int n = 0; n < num; ++n) {
      const auto& d = inst.devices[n];
      a.cpu_rate[n] = std::clamp(a.cpu_rate[n] * (1.0 + 0.1 * (2 * rng.uniform() - 1)),
                                 d.cpu_rate_min, d.cpu_rate_max);
      a.tx_power[n] = std::clamp(a.tx_power[n] * (1.0 + 0.1 * (2 * rng.uniform() - 1)),
                                 0.1 * d.tx_power_max, d.tx_power_max);
    }
    // only upward jitter keeps the sensing constraint intact
    if (!freezes.tau_sense) a.tau_sense *= 1.0 + 0.1 * rng.uniform();
  }

  const auto rc = round_counts(inst.learning, a.local_accuracy);
  a.tau_local = 0.0;
  for (int n = 0; n < num; ++n) {
    const auto& d = inst.devices[n];
    const double data_bits = d.sensing_rate * a.tau_sense;
    a.tau_local = std::max(a.tau_local,
                           rc.local_rounds * d.cycles_per_bit * data_bits / a.cpu_rate[n]);
  }

  a.tau_tx = 0.0;
  for (int n = 0; n < num; ++n) {
    const double rate = achievable_rate(inst, a, n);
    a.tau_tx = std::max(a.tau_tx, sys.model_size_bits / rate);
  }

  // harvest long enough for the neediest device, with 5% margin
  a.tau_harvest = 1.0;  // placeholder so energy_breakdown sees a unit harvest
  const auto energy = energy_breakdown(inst, a);
  double tau_h = 0.0;
  for (int n = 0; n < num; ++n) {
    const auto& e = energy[n];
    const double spend = e.reward + e.sensing + e.computing + e.transmit;
    tau_h = std::max(tau_h, spend / (sys.harvest_efficiency * a.beam_power[n] *
                                     inst.devices[n].channel_gain));
  }
  a.tau_harvest = tau_h * 1.05;

  if (std::isfinite(sys.source_energy_cap)) {
    // trim beams with harvest slack before checking the cap
    for (int n = 0; n < num; ++n) {
      const auto& e = energy[n];
      const double spend = e.reward + e.sensing + e.computing + e.transmit;
      const double needed = 1.05 * spend / (sys.harvest_efficiency * a.tau_harvest *
                                            inst.devices[n].channel_gain);
      a.beam_power[n] = std::min(a.beam_power[n], needed);
    }
    double total = 0.0;
    for (int n = 0; n < num; ++n) total += a.beam_power[n];
    if (total * a.tau_harvest > sys.source_energy_cap) {
      throw InfeasibleInstance(
          "source_energy",
          "required source energy " + std::to_string(total * a.tau_harvest) +
              " J exceeds the cap " + std::to_string(sys.source_energy_cap) + " J");
    }
  }
  return a;
}

ConvexProgram build_accuracy_program(const ProblemInstance& inst, const Allocation& anchor,
                                     double accuracy_floor) {
  const auto& lp = inst.learning;
  const Allocation bar = clamped_anchor(inst, anchor);
  const double eta_bar = std::clamp(anchor.local_accuracy, accuracy_floor, 1.0 - accuracy_floor);
  const double iota = bar.tau_harvest + bar.tau_sense + bar.tau_tx;

  Builder b;
  const auto eta = b.variable("eta", accuracy_floor, 1.0 - accuracy_floor, eta_bar);
  const auto tau_l = b.variable("tau_l", 0.0, kInf, bar.tau_local);
  // tau_h stays a variable here: psi couples the accuracy choice to the
  // harvest time, and without it the block cannot credit the energy saved by
  // a looser accuracy, which strands the alternation at over-tight eta
  const auto tau_h = b.variable("tau_h", 0.0, kInf, bar.tau_harvest);

  // a * iota / (1 - eta) with convex majorants of the tau_l and tau_h parts
  b.prog.objective.reciprocal(eta.idx,
                              lp.global_round_scale * (bar.tau_sense + bar.tau_tx), -1.0, 1.0);
  b.prog.objective.quotient_square(tau_l.idx, eta.idx,
                                   lp.global_round_scale * bar.tau_local / (4.0 * (1.0 - eta_bar)),
                                   bar.tau_local, 1.0 - eta_bar, 1.0, 0.0, -1.0, 1.0);
  b.prog.objective.quotient_square(tau_h.idx, eta.idx,
                                   lp.global_round_scale * bar.tau_harvest /
                                       (4.0 * (1.0 - eta_bar)),
                                   bar.tau_harvest, 1.0 - eta_bar, 1.0, 0.0, -1.0, 1.0);
  (void)iota;

  for (int n = 0; n < inst.system.num_devices; ++n) {
    const auto& d = inst.devices[n];
    const double data_rate = d.sensing_rate * bar.tau_sense;
    const double harvest_rate =
        inst.system.harvest_efficiency * bar.beam_power[n] * d.channel_gain;
    const double fixed_spend = bar.tx_power[n] * bar.tau_tx +
                               (d.sense_energy_per_bit + d.reward_per_bit) * data_rate;
    // local-training energy budget:
    // nu log2(1/eta) * zeta C r tau_s f^2 + fixed spend <= phi P h tau_h
    ConstraintRow energy_row;
    energy_row.label = "train_energy[" + std::to_string(n) + "]";
    const double k_energy = lp.local_round_scale / std::log(2.0) * d.cpu_energy_coeff *
                            d.cycles_per_bit *
                            data_rate * bar.cpu_rate[n] * bar.cpu_rate[n];
    energy_row.expr.neg_log(eta.idx, k_energy);
    energy_row.expr.affine(tau_h.idx, -harvest_rate);
    energy_row.expr.add_constant(fixed_spend);
    b.prog.constraints.push_back(std::move(energy_row));

    // tau_l >= nu log2(1/eta) * C r tau_s / f
    ConstraintRow time_row;
    time_row.label = "local_time[" + std::to_string(n) + "]";
    const double k_time =
        lp.local_round_scale / std::log(2.0) * d.cycles_per_bit * data_rate / bar.cpu_rate[n];
    time_row.expr.neg_log(eta.idx, k_time);
    time_row.expr.affine(tau_l.idx, -1.0);
    b.prog.constraints.push_back(std::move(time_row));
  }

  if (std::isfinite(inst.system.source_energy_cap)) {
    ConstraintRow cap_row;
    cap_row.label = "source_energy";
    double total_beam = 0.0;
    for (int n = 0; n < inst.system.num_devices; ++n) total_beam += bar.beam_power[n];
    cap_row.expr.affine(tau_h.idx, total_beam);
    cap_row.expr.add_constant(-inst.system.source_energy_cap);
    b.prog.constraints.push_back(std::move(cap_row));
  }
  return std::move(b.prog);
}

std::pair<double, double> accuracy_step(const ProblemInstance& inst, const Allocation& anchor,
                                        const DriverOptions& opts) {
  const auto prog = build_accuracy_program(inst, anchor, opts.accuracy_floor);
  std::vector<double> start(prog.vars.size());
  for (size_t i = 0; i < prog.vars.size(); ++i) start[i] = prog.vars[i].start;
  const auto res = solve(prog, start, opts.solver_tol);
  if (res.status == SolveStatus::Infeasible) {
    throw InfeasibleInstance("accuracy", "accuracy subproblem infeasible: " + res.message);
  }
  return {res.point[0], res.point[1]};
}

ConvexProgram build_resource_program(const ProblemInstance& inst, double local_accuracy,
                                     const Allocation& anchor, const Freezes& freezes) {
  const auto& sys = inst.system;
  const auto& lp = inst.learning;
  const int num = sys.num_devices;
  const bool fdma = sys.uplink == Uplink::Fdma;
  const Allocation bar = clamped_anchor(inst, anchor);
  const auto rc = round_counts(lp, local_accuracy);
  const double eta_glo = rc.global_rounds;
  const double eta_loc = rc.local_rounds;

  Builder b;
  const auto tau_h = b.variable("tau_h", 0.0, kInf, bar.tau_harvest);
  const auto tau_s = freezes.tau_sense ? Builder::frozen(*freezes.tau_sense)
                                       : b.variable("tau_s", 0.0, kInf, bar.tau_sense);
  const auto tau_l = b.variable("tau_l", 0.0, kInf, bar.tau_local);
  const auto tau_c = b.variable("tau_c", 0.0, kInf, bar.tau_tx);
  std::vector<VarHandle> beam(num), power(num), cpu(num), band(num);
  for (int n = 0; n < num; ++n) {
    const auto tag = std::to_string(n);
    const auto& d = inst.devices[n];
    double gain_sum = 0.0;
    for (const auto& dev : inst.devices) gain_sum += dev.channel_gain;
    beam[n] = freezes.beam_proportional
                  ? Builder::frozen(sys.power_budget * d.channel_gain / gain_sum)
                  : b.variable("P[" + tag + "]", 0.0, kInf, bar.beam_power[n]);
    power[n] = b.variable("p[" + tag + "]", 0.0, d.tx_power_max, bar.tx_power[n]);
    cpu[n] = b.variable("f[" + tag + "]", d.cpu_rate_min, d.cpu_rate_max, bar.cpu_rate[n]);
    if (fdma) {
      band[n] = freezes.equal_bandwidth ? Builder::frozen(sys.bandwidth / num)
                                        : b.variable("b[" + tag + "]", 0.0, kInf,
                                                     bar.bandwidth[n]);
    }
  }

  // objective: eta_glo * (tau_h + tau_s + tau_l + tau_c)
  Builder::affine(b.prog.objective, tau_h, eta_glo);
  Builder::affine(b.prog.objective, tau_s, eta_glo);
  Builder::affine(b.prog.objective, tau_l, eta_glo);
  Builder::affine(b.prog.objective, tau_c, eta_glo);

  const double tau_s_bar = freezes.tau_sense ? clampf(*freezes.tau_sense) : bar.tau_sense;

  for (int n = 0; n < num; ++n) {
    const auto tag = std::to_string(n);
    const auto& d = inst.devices[n];
    const double phi_h = sys.harvest_efficiency * d.channel_gain;
    const double p_bar = bar.tx_power[n];
    const double f_bar = bar.cpu_rate[n];
    const double beam_bar = beam[n].idx >= 0 ? bar.beam_power[n] : clampf(beam[n].value);

    // per-round energy budget with surrogate bilinear terms
    ConstraintRow energy_row;
    energy_row.label = "energy[" + tag + "]";
    Builder::affine(energy_row.expr, tau_s,
                    (d.reward_per_bit + d.sense_energy_per_bit) * d.sensing_rate);
    const double q_coeff = 0.5 * eta_loc * d.cpu_energy_coeff * d.cycles_per_bit *
                           d.sensing_rate;
    Builder::square(energy_row.expr, tau_s, q_coeff * f_bar * f_bar / tau_s_bar);
    Builder::quartic(energy_row.expr, cpu[n], q_coeff * tau_s_bar / (f_bar * f_bar));
    Builder::square(energy_row.expr, power[n], 0.5 * bar.tau_tx / p_bar);
    Builder::square(energy_row.expr, tau_c, 0.5 * p_bar / bar.tau_tx);
    Builder::neg_sqrt(energy_row.expr, tau_h,
                      phi_h * 2.0 * beam_bar * std::sqrt(bar.tau_harvest));
    Builder::reciprocal(energy_row.expr, beam[n],
                        phi_h * bar.tau_harvest * beam_bar * beam_bar);
    b.prog.constraints.push_back(std::move(energy_row));

    // tau_l >= convex majorant of eta_loc C r tau_s / f
    ConstraintRow time_row;
    time_row.label = "local_time[" + tag + "]";
    const double chi = eta_loc * d.cycles_per_bit * d.sensing_rate;
    Builder::quotient_square(time_row.expr, tau_s, cpu[n],
                             chi * tau_s_bar / (4.0 * f_bar), tau_s_bar, f_bar);
    Builder::affine(time_row.expr, tau_l, -1.0);
    b.prog.constraints.push_back(std::move(time_row));

    // model upload within tau_c through the concave rate lower bound
    ConstraintRow rate_row;
    rate_row.label = "model_upload[" + tag + "]";
    if (fdma) {
      const double b_bar = band[n].idx >= 0 ? bar.bandwidth[n] : clampf(band[n].value);
      const auto s = fdma_rate_lower(b_bar, p_bar, d.channel_gain, sys.noise_density);
      rate_row.expr.reciprocal(tau_c.idx, sys.model_size_bits * kLn2);
      rate_row.expr.add_constant(-s.lambda - 2.0 * s.mu);
      Builder::reciprocal(rate_row.expr, power[n], s.mu * s.p_anchor);
      Builder::affine(rate_row.expr, band[n], s.mu / s.b_anchor);
      Builder::reciprocal(rate_row.expr, band[n], s.upsilon);
    } else {
      std::vector<double> gains(num);
      for (int k = 0; k < num; ++k) gains[k] = inst.devices[k].channel_gain;
      const auto s = noma_rate_lower(bar.tx_power, bar.tau_tx, n, gains, sys.noise_density,
                                     sys.bandwidth);
      rate_row.expr.add_constant(sys.model_size_bits * kLn2 / sys.bandwidth - s.lambda -
                                 2.0 * s.mu + s.mu * s.noise_floor / s.denom_anchor);
      Builder::reciprocal(rate_row.expr, power[n], s.mu * s.p_anchor);
      for (int k = n + 1; k < num; ++k) {
        Builder::affine(rate_row.expr, power[k],
                        s.mu * inst.devices[k].channel_gain / s.denom_anchor);
      }
      Builder::reciprocal(rate_row.expr, tau_c, s.upsilon);
    }
    b.prog.constraints.push_back(std::move(rate_row));

    // sensing data requirement
    ConstraintRow sense_row;
    sense_row.label = "sensing_data[" + tag + "]";
    Builder::affine(sense_row.expr, tau_s, -d.sensing_rate);
    sense_row.expr.add_constant(sys.sensing_bits_required);
    b.prog.constraints.push_back(std::move(sense_row));
  }

  ConstraintRow beam_row;
  beam_row.label = "beam_budget";
  for (int n = 0; n < num; ++n) Builder::affine(beam_row.expr, beam[n], 1.0);
  beam_row.expr.add_constant(-sys.power_budget);
  b.prog.constraints.push_back(std::move(beam_row));

  if (fdma) {
    ConstraintRow band_row;
    band_row.label = "band_budget";
    for (int n = 0; n < num; ++n) Builder::affine(band_row.expr, band[n], 1.0);
    band_row.expr.add_constant(-sys.bandwidth);
    b.prog.constraints.push_back(std::move(band_row));
  }

  if (std::isfinite(sys.source_energy_cap)) {
    // sum_n P_n tau_h <= E_max via the bilinear upper bound (inner)
    ConstraintRow cap_row;
    cap_row.label = "source_energy";
    for (int n = 0; n < num; ++n) {
      const double beam_bar = beam[n].idx >= 0 ? bar.beam_power[n] : clampf(beam[n].value);
      Builder::square(cap_row.expr, beam[n], 0.5 * bar.tau_harvest / beam_bar);
      Builder::square(cap_row.expr, tau_h, 0.5 * beam_bar / bar.tau_harvest);
    }
    cap_row.expr.add_constant(-sys.source_energy_cap);
    b.prog.constraints.push_back(std::move(cap_row));
  }

  prune_constant_rows(b.prog);
  return std::move(b.prog);
}

Allocation resource_step(const ProblemInstance& inst, double local_accuracy,
                         const Allocation& anchor, const Freezes& freezes,
                         const DriverOptions& opts) {
  const auto prog = build_resource_program(inst, local_accuracy, anchor, freezes);
  std::vector<double> start(prog.vars.size());
  for (size_t i = 0; i < prog.vars.size(); ++i) start[i] = prog.vars[i].start;
  const auto res = solve(prog, start, opts.solver_tol);
  if (res.status == SolveStatus::Infeasible) {
    throw InfeasibleInstance("resource", "resource subproblem infeasible: " + res.message);
  }
  return unpack_point(inst, local_accuracy, freezes, res.point);
}

Trace run(const ProblemInstance& inst, Uplink mode, const DriverOptions& opts,
          const Freezes& freezes) {
  ProblemInstance work = inst;
  work.system.uplink = mode;
  // the NOMA rows assume devices appear in SIC decode order; solve in that
  // order and map allocations back to the caller's indexing afterwards
  std::vector<int> perm(inst.devices.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  if (mode == Uplink::Noma) {
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
      return inst.devices[a].channel_gain > inst.devices[b].channel_gain;
    });
    for (size_t i = 0; i < perm.size(); ++i) work.devices[i] = inst.devices[perm[i]];
  }
  const auto unpermute = [&](const Allocation& a) {
    Allocation out = a;
    for (size_t i = 0; i < perm.size(); ++i) {
      if (i < a.beam_power.size()) out.beam_power[perm[i]] = a.beam_power[i];
      if (i < a.tx_power.size()) out.tx_power[perm[i]] = a.tx_power[i];
      if (i < a.cpu_rate.size()) out.cpu_rate[perm[i]] = a.cpu_rate[i];
      if (i < a.bandwidth.size()) out.bandwidth[perm[i]] = a.bandwidth[i];
    }
    return out;
  };
  work.validate();

  Trace trace;
  trace.mode = mode;
  Allocation current = init_feasible(work, freezes, opts.seed, opts.init_jitter);
  trace.initial = unpermute(current);
  trace.initial_objective = total_completion_time(trace.initial, work.learning);
  double prev_obj = trace.initial_objective;
  for (int k = 1; k <= opts.max_iter; ++k) {
    IterationRecord rec;
    rec.index = k;
    rec.anchor = unpermute(current);

    double eta;
    if (freezes.local_accuracy) {
      eta = *freezes.local_accuracy;
    } else {
      const auto prog = build_accuracy_program(work, current, opts.accuracy_floor);
      std::vector<double> start(prog.vars.size());
      for (size_t i = 0; i < prog.vars.size(); ++i) start[i] = prog.vars[i].start;
      rec.accuracy_solve = solve(prog, start, opts.solver_tol);
      if (rec.accuracy_solve.status == SolveStatus::Infeasible) {
        throw InfeasibleInstance("accuracy",
                                 "accuracy subproblem infeasible at iteration " +
                                     std::to_string(k) + ": " + rec.accuracy_solve.message);
      }
      eta = rec.accuracy_solve.point[0];
      // re-anchor the resource surrogates at the accuracy block's feasible
      // (tau_l, tau_h) so the energy rows stay tight at the new eta
      current.tau_local = rec.accuracy_solve.point[1];
      current.tau_harvest = rec.accuracy_solve.point[2];
    }
    rec.local_accuracy = eta;

    const auto prog = build_resource_program(work, eta, current, freezes);
    std::vector<double> start(prog.vars.size());
    for (size_t i = 0; i < prog.vars.size(); ++i) start[i] = prog.vars[i].start;
    rec.resource_solve = solve(prog, start, opts.solver_tol);
    if (rec.resource_solve.status == SolveStatus::Infeasible) {
      throw InfeasibleInstance("resource", "resource subproblem infeasible at iteration " +
                                               std::to_string(k) + ": " +
                                               rec.resource_solve.message);
    }
    current = unpack_point(work, eta, freezes, rec.resource_solve.point);
    rec.alloc = unpermute(current);
    rec.objective = total_completion_time(current, work.learning);
    trace.iterations.push_back(std::move(rec));

    const double obj = trace.iterations.back().objective;
    if (std::abs(obj - prev_obj) / std::max(prev_obj, 1e-300) <= opts.eps) {
      trace.status = TraceStatus::Converged;
      break;
    }
    prev_obj = obj;
  }
  return trace;
}

}  // namespace s2fl
