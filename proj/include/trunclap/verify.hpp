#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace trunclap {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  // Multiplies every numeric threshold; 0 is the detector-sanity hook (must fail).
  double tolerance_scale = 1.0;
};

const std::vector<std::string>& verify_suite_names();  // excludes "all"
// Throws std::invalid_argument for an unknown suite.
std::vector<CheckResult> run_verify_suite(const std::string& suite, const VerifyOptions& opts = {});
nlohmann::json verify_summary_json(const std::vector<CheckResult>& results);

}  // namespace trunclap
