#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dmnls/grid.hpp"

namespace dmnls {

enum class VerifyLevel { fast, full };

VerifyLevel parse_verify_level(const std::string& s);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      ///< measured quantity
  double tolerance = 0.0;  ///< pass threshold on `value`
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::fast;
  /// Transform kernel used by the grid-level checks; `flipped` demonstrates
  /// which checks catch a wrong sign.
  KernelSign sign = KernelSign::standard;
  /// Called after each check.
  std::function<void(const CheckResult&)> on_result;
};

/// Names of the checks in the order they run.
std::vector<std::string> verify_check_names(VerifyLevel level);

std::vector<CheckResult> run_verify(const VerifyOptions& opt = {});

}  // namespace dmnls
