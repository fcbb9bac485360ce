#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crs {

// Deliberate perturbation of one closed form, used to check that the
// matching criterion notices.
enum class Mutation {
  None,
  OptimalPower,    // criterion 1
  RelayPlacement,  // criterion 2
  DelayFormula,    // criterion 3
  BufferGain,      // criterion 4
  BlDelay,         // criterion 5
  BdfDelay,        // criterion 6
  SdfDelay,        // criterion 7
  ClearProb,       // criterion 8
  GainTrend,       // criterion 9
  Seed,            // criterion 10
};

std::string_view to_string(Mutation m);
Mutation parse_mutation(std::string_view name);

struct ValidationOptions {
  std::uint64_t seed = 2024;
  unsigned workers = 1;
  Mutation mutation = Mutation::None;
};

struct CriterionInfo {
  int id = 0;
  std::string name;
  double budget_seconds = 0.0;
};

struct CriterionResult {
  CriterionInfo info;
  bool checks_passed = false;
  double seconds = 0.0;
  std::string detail;

  bool passed() const { return checks_passed && seconds < info.budget_seconds; }
};

const std::vector<CriterionInfo>& criteria();

CriterionResult run_criterion(int id, const ValidationOptions& opts);

// "[PASS] c01 optimal power oracle (0.12 s / 5 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace crs
