#include "s2fl/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace s2fl {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// infinity is not representable in JSON; use null for the energy cap
ordered_json cap_to_json(double cap) {
  if (std::isinf(cap)) return nullptr;
  return cap;
}

double cap_from_json(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ordered_json to_json(const ProblemInstance& inst) {
  ordered_json doc;
  doc["version"] = kInstanceSchemaVersion;
  doc["seed"] = inst.seed;
  auto& sys = doc["system"];
  sys["num_devices"] = inst.system.num_devices;
  sys["power_budget"] = inst.system.power_budget;
  sys["bandwidth"] = inst.system.bandwidth;
  sys["noise_density"] = inst.system.noise_density;
  sys["harvest_efficiency"] = inst.system.harvest_efficiency;
  sys["model_size_bits"] = inst.system.model_size_bits;
  sys["sensing_bits_required"] = inst.system.sensing_bits_required;
  sys["source_energy_cap"] = cap_to_json(inst.system.source_energy_cap);
  sys["uplink"] = to_string(inst.system.uplink);
  auto& lp = doc["learning"];
  lp["lipschitz"] = inst.learning.lipschitz;
  lp["strong_convexity"] = inst.learning.strong_convexity;
  lp["step_size"] = inst.learning.step_size;
  lp["hyper_rate"] = inst.learning.hyper_rate;
  lp["target_accuracy"] = inst.learning.target_accuracy;
  lp["global_round_scale"] = inst.learning.global_round_scale;
  lp["local_round_scale"] = inst.learning.local_round_scale;
  doc["devices"] = ordered_json::array();
  for (const auto& d : inst.devices) {
    ordered_json jd;
    jd["index"] = d.index;
    jd["sensing_rate"] = d.sensing_rate;
    jd["sense_energy_per_bit"] = d.sense_energy_per_bit;
    jd["reward_per_bit"] = d.reward_per_bit;
    jd["cycles_per_bit"] = d.cycles_per_bit;
    jd["cpu_energy_coeff"] = d.cpu_energy_coeff;
    jd["cpu_rate_min"] = d.cpu_rate_min;
    jd["cpu_rate_max"] = d.cpu_rate_max;
    jd["tx_power_max"] = d.tx_power_max;
    jd["channel_gain"] = d.channel_gain;
    doc["devices"].push_back(std::move(jd));
  }
  return doc;
}

ProblemInstance instance_from_json(const json& doc) {
  if (!doc.contains("version") || doc["version"].get<int>() != kInstanceSchemaVersion) {
    throw std::invalid_argument("unsupported instance document version");
  }
  ProblemInstance inst;
  inst.seed = doc.at("seed").get<uint64_t>();
  const auto& sys = doc.at("system");
  inst.system.num_devices = sys.at("num_devices").get<int>();
  inst.system.power_budget = sys.at("power_budget").get<double>();
  inst.system.bandwidth = sys.at("bandwidth").get<double>();
  inst.system.noise_density = sys.at("noise_density").get<double>();
  inst.system.harvest_efficiency = sys.at("harvest_efficiency").get<double>();
  inst.system.model_size_bits = sys.at("model_size_bits").get<double>();
  inst.system.sensing_bits_required = sys.at("sensing_bits_required").get<double>();
  inst.system.source_energy_cap = cap_from_json(sys.at("source_energy_cap"));
  inst.system.uplink = uplink_from_string(sys.at("uplink").get<std::string>());
  const auto& lp = doc.at("learning");
  inst.learning.lipschitz = lp.at("lipschitz").get<double>();
  inst.learning.strong_convexity = lp.at("strong_convexity").get<double>();
  inst.learning.step_size = lp.at("step_size").get<double>();
  inst.learning.hyper_rate = lp.at("hyper_rate").get<double>();
  inst.learning.target_accuracy = lp.at("target_accuracy").get<double>();
  inst.learning.global_round_scale = lp.at("global_round_scale").get<double>();
  inst.learning.local_round_scale = lp.at("local_round_scale").get<double>();
  for (const auto& jd : doc.at("devices")) {
    DeviceParams d;
    d.index = jd.at("index").get<int>();
    d.sensing_rate = jd.at("sensing_rate").get<double>();
    d.sense_energy_per_bit = jd.at("sense_energy_per_bit").get<double>();
    d.reward_per_bit = jd.at("reward_per_bit").get<double>();
    d.cycles_per_bit = jd.at("cycles_per_bit").get<double>();
    d.cpu_energy_coeff = jd.at("cpu_energy_coeff").get<double>();
    d.cpu_rate_min = jd.at("cpu_rate_min").get<double>();
    d.cpu_rate_max = jd.at("cpu_rate_max").get<double>();
    d.tx_power_max = jd.at("tx_power_max").get<double>();
    d.channel_gain = jd.at("channel_gain").get<double>();
    inst.devices.push_back(d);
  }
  inst.validate();
  return inst;
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json(inst).dump(2) << '\n';
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  in >> doc;
  return instance_from_json(doc);
}

ordered_json to_json(const Allocation& alloc) {
  ordered_json j;
  j["tau_harvest"] = alloc.tau_harvest;
  j["tau_sense"] = alloc.tau_sense;
  j["tau_local"] = alloc.tau_local;
  j["tau_tx"] = alloc.tau_tx;
  j["local_accuracy"] = alloc.local_accuracy;
  j["beam_power"] = alloc.beam_power;
  j["tx_power"] = alloc.tx_power;
  j["cpu_rate"] = alloc.cpu_rate;
  j["bandwidth"] = alloc.bandwidth;
  return j;
}

ordered_json to_json(const Trace& trace) {
  ordered_json j;
  j["mode"] = to_string(trace.mode);
  j["status"] = trace.status == TraceStatus::Converged ? "converged" : "iteration_cap";
  j["initial_objective"] = trace.initial_objective;
  j["initial"] = to_json(trace.initial);
  j["iterations"] = ordered_json::array();
  for (const auto& rec : trace.iterations) {
    ordered_json jr;
    jr["kappa"] = rec.index;
    jr["objective"] = rec.objective;
    jr["local_accuracy"] = rec.local_accuracy;
    jr["allocation"] = to_json(rec.alloc);
    jr["resource_newton_steps"] = rec.resource_solve.iterations;
    j["iterations"].push_back(std::move(jr));
  }
  return j;
}

std::string trace_csv(const Trace& trace) {
  std::string out = "kappa,objective,local_accuracy,tau_harvest,tau_sense,tau_local,tau_tx\n";
  auto row = [&](int k, double obj, const Allocation& a) {
    out += std::to_string(k) + ',' + fmt(obj) + ',' + fmt(a.local_accuracy) + ',' +
           fmt(a.tau_harvest) + ',' + fmt(a.tau_sense) + ',' + fmt(a.tau_local) + ',' +
           fmt(a.tau_tx) + '\n';
  };
  row(0, trace.initial_objective, trace.initial);
  for (const auto& rec : trace.iterations) row(rec.index, rec.objective, rec.alloc);
  return out;
}

void save_trace(const Trace& trace, const std::string& json_path,
                const std::string& csv_path) {
  std::ofstream out(json_path);
  if (!out) throw std::runtime_error("cannot open " + json_path + " for writing");
  out << to_json(trace).dump(2) << '\n';
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open " + csv_path + " for writing");
    csv << trace_csv(trace);
  }
}

}  // namespace s2fl
