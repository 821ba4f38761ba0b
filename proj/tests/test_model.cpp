#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "s2fl/channel.hpp"
#include "s2fl/model.hpp"
#include "s2fl/rng.hpp"

using namespace s2fl;

namespace {

ProblemInstance tiny_instance(int num_devices, Uplink uplink = Uplink::Fdma) {
  ProblemInstance inst;
  inst.system.num_devices = num_devices;
  inst.system.power_budget = 15.8489;
  inst.system.bandwidth = 5e5;
  inst.system.noise_density = 1e-14;
  inst.system.harvest_efficiency = 0.9;
  inst.system.model_size_bits = 28.1e3;
  inst.system.sensing_bits_required = 1e5;
  inst.system.uplink = uplink;
  inst.learning = derive_learning_constants(4.0, 2.0, 0.25, 1.0 / 3.0, 1e-3);
  for (int n = 0; n < num_devices; ++n) {
    DeviceParams d;
    d.index = n;
    d.sensing_rate = 2e6;
    d.sense_energy_per_bit = 5e-12;
    d.reward_per_bit = 5e-12;
    d.cycles_per_bit = 15;
    d.cpu_energy_coeff = 1e-28;
    d.cpu_rate_min = 1e8;
    d.cpu_rate_max = 2e9;
    d.tx_power_max = 0.01;
    d.channel_gain = 1e-4 / (1.0 + n);  // non-increasing, valid SIC order
    inst.devices.push_back(d);
  }
  return inst;
}

Allocation uniform_allocation(const ProblemInstance& inst) {
  const int num = inst.system.num_devices;
  Allocation a;
  a.beam_power.assign(num, inst.system.power_budget / num);
  a.tx_power.assign(num, 0.01);
  a.cpu_rate.assign(num, 5e8);
  a.bandwidth.assign(num, inst.system.bandwidth / num);
  a.tau_harvest = 1.0;
  a.tau_sense = 0.05;
  a.tau_local = 0.5;
  a.tau_tx = 0.5;
  a.local_accuracy = 0.5;
  return a;
}

}  // namespace

TEST_CASE("derive_learning_constants matches the closed forms") {
  // eps0 = 1 makes ln(eps0) = 0, so no global rounds are needed
  const auto zero = derive_learning_constants(4.0, 2.0, 0.25, 1.0 / 3.0, 1.0);
  CHECK(zero.global_round_scale == doctest::Approx(0.0));

  // a = 2 L^2 / (gamma^2 xi) at eps0 = e^-1
  const auto lp = derive_learning_constants(4.0, 2.0, 0.25, 1.0 / 3.0, std::exp(-1.0));
  CHECK(lp.global_round_scale == doctest::Approx(24.0).epsilon(1e-12));
  CHECK(lp.local_round_scale ==
        doctest::Approx(2.0 / ((2.0 - 4.0 * 0.25) * 0.25 * 2.0 * std::log(2.0))).epsilon(1e-12));

  CHECK_THROWS_AS(derive_learning_constants(4.0, 2.0, 0.5, 1.0 / 3.0, 1e-3),
                  std::invalid_argument);   // delta must be < 2/L
  CHECK_THROWS_AS(derive_learning_constants(4.0, 2.0, 0.25, 0.6, 1e-3),
                  std::invalid_argument);   // xi must be < gamma/L
  CHECK_THROWS_AS(derive_learning_constants(4.0, 2.0, 0.25, 1.0 / 3.0, 1.5),
                  std::invalid_argument);   // eps0 in (0,1]
}

TEST_CASE("round_counts follows the log2 / geometric forms") {
  LearningParams lp;
  lp.local_round_scale = 5.7708;
  lp.global_round_scale = 24.0;

  auto rc = round_counts(lp, 1.0);
  CHECK(rc.local_rounds == doctest::Approx(0.0));
  CHECK(rc.unbounded);  // a > 0 with eta = 1 has no finite global count

  rc = round_counts(lp, 0.25);
  CHECK(rc.local_rounds == doctest::Approx(11.5416).epsilon(1e-12));

  rc = round_counts(lp, 0.5);
  CHECK(rc.global_rounds == doctest::Approx(48.0).epsilon(1e-12));
  CHECK_FALSE(rc.unbounded);

  // eta_glo grows with eta whenever a > 0
  CHECK(round_counts(lp, 0.6).global_rounds > round_counts(lp, 0.4).global_rounds);
}

TEST_CASE("energy_breakdown evaluates the per-device components") {
  auto inst = tiny_instance(1);
  auto alloc = uniform_allocation(inst);

  SUBCASE("zero harvest time harvests nothing") {
    alloc.tau_harvest = 0;
    CHECK(energy_breakdown(inst, alloc)[0].harvested == doctest::Approx(0.0));
  }

  SUBCASE("harvest is phi tau_h P h") {
    inst.devices[0].channel_gain = 1e-3;
    alloc.beam_power[0] = 1.0;
    alloc.tau_harvest = 1.0;
    CHECK(energy_breakdown(inst, alloc)[0].harvested == doctest::Approx(9e-4).epsilon(1e-12));
  }

  SUBCASE("no sensing means no data-driven energy") {
    alloc.tau_sense = 0;
    const auto e = energy_breakdown(inst, alloc)[0];
    CHECK(e.reward == doctest::Approx(0.0));
    CHECK(e.sensing == doctest::Approx(0.0));
    CHECK(e.computing == doctest::Approx(0.0));
  }

  SUBCASE("components match the closed forms") {
    const auto e = energy_breakdown(inst, alloc)[0];
    const double bits = inst.devices[0].sensing_rate * alloc.tau_sense;
    const auto rc = round_counts(inst.learning, alloc.local_accuracy);
    CHECK(e.reward == doctest::Approx(inst.devices[0].reward_per_bit * bits));
    CHECK(e.sensing == doctest::Approx(inst.devices[0].sense_energy_per_bit * bits));
    CHECK(e.computing == doctest::Approx(rc.local_rounds * inst.devices[0].cpu_energy_coeff *
                                         inst.devices[0].cycles_per_bit * bits * 5e8 * 5e8));
    CHECK(e.transmit == doctest::Approx(alloc.tx_power[0] * alloc.tau_tx));
  }
}

TEST_CASE("achievable_rate covers both uplinks") {
  auto inst = tiny_instance(3);
  auto alloc = uniform_allocation(inst);

  SUBCASE("zero power means zero rate") {
    alloc.tx_power[1] = 0;
    CHECK(achievable_rate(inst, alloc, 1) == doctest::Approx(0.0));
  }

  SUBCASE("FDMA closed form") {
    inst.devices[0].channel_gain = 1e-3;
    alloc.bandwidth[0] = 1e5;
    alloc.tx_power[0] = 0.01;
    CHECK(achievable_rate(inst, alloc, 0) ==
          doctest::Approx(1e5 * std::log2(1.0 + 1e4)).epsilon(1e-12));
  }

  SUBCASE("FDMA rate vanishes continuously as b -> 0") {
    alloc.bandwidth[0] = 1e-6 * inst.system.bandwidth;
    const double tiny = achievable_rate(inst, alloc, 0);
    alloc.bandwidth[0] = 0;
    CHECK(achievable_rate(inst, alloc, 0) == doctest::Approx(0.0));
    CHECK(tiny < 1e-6 * inst.system.bandwidth * 60);  // b log2(1 + h p / (n0 b)) -> 0
  }

  SUBCASE("NOMA single user equals FDMA at full bandwidth") {
    auto noma = tiny_instance(1, Uplink::Noma);
    auto fdma = tiny_instance(1, Uplink::Fdma);
    auto na = uniform_allocation(noma);
    auto fa = uniform_allocation(fdma);
    fa.bandwidth[0] = fdma.system.bandwidth;
    CHECK(achievable_rate(noma, na, 0) == doctest::Approx(achievable_rate(fdma, fa, 0)));
  }

  SUBCASE("NOMA rate is non-increasing in interferer power") {
    auto noma = tiny_instance(3, Uplink::Noma);
    auto na = uniform_allocation(noma);
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      na.tx_power = {rng.uniform(1e-4, 0.01), rng.uniform(1e-4, 0.01), rng.uniform(1e-4, 0.01)};
      const double before = achievable_rate(noma, na, 0);
      na.tx_power[2] *= 1.5;  // weaker-gain device is decoded after device 0
      CHECK(achievable_rate(noma, na, 0) <= before + 1e-12);
    }
  }

  SUBCASE("NOMA interference follows gain order, not index order") {
    auto noma = tiny_instance(2, Uplink::Noma);
    std::swap(noma.devices[0], noma.devices[1]);  // devices now in increasing gain
    auto na = uniform_allocation(noma);
    // device 1 has the larger gain, so it is decoded first and sees device 0
    const double h1 = noma.devices[1].channel_gain;
    const double interference = na.tx_power[0] * noma.devices[0].channel_gain;
    const double expect = noma.system.bandwidth *
                          std::log2(1.0 + h1 * na.tx_power[1] /
                                    (noma.system.noise_density * noma.system.bandwidth +
                                     interference));
    CHECK(achievable_rate(noma, na, 1) == doctest::Approx(expect).epsilon(1e-12));
  }

  SUBCASE("FDMA rate is concave in (b, p)") {
    Rng rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
      const double b1 = rng.uniform(1e3, 5e5), p1 = rng.uniform(1e-4, 0.01);
      const double b2 = rng.uniform(1e3, 5e5), p2 = rng.uniform(1e-4, 0.01);
      auto at = [&](double b, double p) {
        alloc.bandwidth[0] = b;
        alloc.tx_power[0] = p;
        return achievable_rate(inst, alloc, 0);
      };
      const double mid = at(0.5 * (b1 + b2), 0.5 * (p1 + p2));
      CHECK(mid >= 0.5 * (at(b1, p1) + at(b2, p2)) - 1e-6 * std::abs(mid));
    }
  }
}

TEST_CASE("total_completion_time is eta_glo times the phase sum") {
  LearningParams lp;
  lp.global_round_scale = 24.0;
  lp.local_round_scale = 5.7708;
  Allocation a;
  a.local_accuracy = 0.5;

  SUBCASE("all phases zero") {
    CHECK(total_completion_time(a, lp) == doctest::Approx(0.0));
  }

  SUBCASE("worked value") {
    a.tau_harvest = 0.5;
    a.tau_sense = 0.5;
    a.tau_local = 0.5;
    a.tau_tx = 0.5;
    CHECK(total_completion_time(a, lp) == doctest::Approx(96.0).epsilon(1e-12));
  }

  SUBCASE("linear in the phase times") {
    a.tau_harvest = 0.3;
    a.tau_sense = 0.1;
    a.tau_local = 0.4;
    a.tau_tx = 0.2;
    const double base = total_completion_time(a, lp);
    a.tau_harvest *= 3;
    a.tau_sense *= 3;
    a.tau_local *= 3;
    a.tau_tx *= 3;
    CHECK(total_completion_time(a, lp) == doctest::Approx(3 * base).epsilon(1e-12));
  }

  SUBCASE("eta = 1 is unbounded") {
    a.local_accuracy = 1.0;
    a.tau_harvest = 1.0;
    CHECK(std::isinf(total_completion_time(a, lp)));
  }
}

TEST_CASE("check_feasibility reports slacks, not errors") {
  auto inst = tiny_instance(2);

  SUBCASE("the all-zero allocation fails the sensing-data constraint") {
    Allocation zero;
    zero.beam_power.assign(2, 0.0);
    zero.tx_power.assign(2, 0.0);
    zero.cpu_rate.assign(2, inst.devices[0].cpu_rate_min);
    zero.bandwidth.assign(2, 0.0);
    zero.local_accuracy = 0.5;
    const auto rep = check_feasibility(inst, zero, 1e-6);
    CHECK_FALSE(rep.feasible);
    const auto* row = rep.find("sensing_data[0]");
    REQUIRE(row != nullptr);
    CHECK_FALSE(row->ok);
  }

  SUBCASE("beam budget at exact equality is feasible with zero slack") {
    auto a = uniform_allocation(inst);
    a.tau_sense = inst.system.sensing_bits_required / inst.devices[0].sensing_rate;
    a.tau_harvest = 10.0;  // plenty of harvested energy
    a.tau_tx = 10.0;
    a.tau_local = 10.0;
    const auto rep = check_feasibility(inst, a, 1e-6);
    const auto* row = rep.find("beam_budget");
    REQUIRE(row != nullptr);
    CHECK(row->slack == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(row->ok);
  }
}

TEST_CASE("dbm conversion") {
  CHECK(dbm_to_watt(42.0) == doctest::Approx(15.8489).epsilon(1e-4));
  CHECK(dbm_to_watt(10.0) == doctest::Approx(0.01).epsilon(1e-12));
}
