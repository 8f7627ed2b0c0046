#pragma once

// Reference-number acceptance runs: one verdict per criterion.

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace catkerr {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  ///< measured values against their targets
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::set<int> only;  ///< empty runs all of 1..11
  std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int kCriterionCount = 11;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

/// "criterion  N  PASS|FAIL  title: detail  [t s]"
std::string format_result(const CriterionResult& r);

}  // namespace catkerr
