#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lacldp/cli/config.hpp"

namespace lacldp::cli {

struct CheckResult {
  std::string name;
  bool pass = false;
  nlohmann::json details;
};

// Regression suite over the worked examples, the lemma identity, the ratio
// limit and the operator-vs-quadrature equivalence. Only deterministic
// quantities are recorded.
std::vector<CheckResult> run_verify_suite(const RunConfig& config);

nlohmann::json verify_report(const RunConfig& config, const std::vector<CheckResult>& checks);

}  // namespace lacldp::cli
