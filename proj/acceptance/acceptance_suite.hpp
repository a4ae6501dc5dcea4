#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace starform::acceptance {

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  /// Measured quantities; deterministic for a given seed (no timings).
  nlohmann::json detail;
};

struct SuiteReport {
  std::uint64_t seed;
  std::vector<CriterionResult> criteria;

  bool pass() const;
  nlohmann::json to_json() const;
};

inline constexpr int kCriterionCount = 10;

/// "all", or a comma-separated list of criterion ids ("1,4,7").
/// Throws InvalidArgument on anything else.
std::vector<int> parse_suite(const std::string& suite);

std::string criterion_name(int id);

SuiteReport run_suite(const std::vector<int>& ids, std::uint64_t seed);

}  // namespace starform::acceptance
