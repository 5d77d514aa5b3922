#pragma once

#include <string>

#include <json.hpp>

#include "rwmax/rng.hpp"

namespace rwmax {

inline constexpr const char* kToolName = "rwmax";
inline constexpr const char* kToolVersion = "0.1.0";

/// Common header carried by every report: tool identity, the PRNG
/// algorithm, and an echo of the effective configuration, so a report is
/// reproducible from its own content.
inline nlohmann::json report_header(const std::string& command, const nlohmann::json& config) {
    return nlohmann::json{{"tool", kToolName},
                          {"version", kToolVersion},
                          {"prng", SplitMix64::kAlgorithm},
                          {"command", command},
                          {"config", config}};
}

}  // namespace rwmax
