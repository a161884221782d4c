#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipursuit/theory.hpp"

namespace ipursuit::cli {

inline constexpr const char* kVersion = "0.1.0";
// Default worker count when --workers is not given.
inline constexpr const char* kWorkersEnv = "IPURSUIT_WORKERS";

// Exit codes: 0 success, 2 usage or validation, 1 runtime failure.
// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

nlohmann::json report_to_json(const TheoryReport& r);
TheoryReport report_from_json(const nlohmann::json& j);

}  // namespace ipursuit::cli
