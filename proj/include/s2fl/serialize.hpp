#pragma once

#include <string>

#include "s2fl/channel.hpp"
#include "s2fl/sca.hpp"

#include <json.hpp>

namespace s2fl {

// Versioned instance document; refuses to load documents with a different
// major version.
inline constexpr int kInstanceSchemaVersion = 1;

nlohmann::ordered_json to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const nlohmann::json& doc);

void save_instance(const ProblemInstance& inst, const std::string& path);
ProblemInstance load_instance(const std::string& path);

nlohmann::ordered_json to_json(const Allocation& alloc);
nlohmann::ordered_json to_json(const Trace& trace);

// One row per iteration: kappa, objective, local accuracy and the four
// phase times.
std::string trace_csv(const Trace& trace);
void save_trace(const Trace& trace, const std::string& json_path,
                const std::string& csv_path = "");

}  // namespace s2fl
