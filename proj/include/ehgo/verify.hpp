#pragma once

#include <string>
#include <vector>

namespace ehgo {

struct VerifyOptions {
  /// Test hook: flips the thrust direction used by the harness plant model so
  /// the feedback-linearization checks must fail.
  bool inject_r3_sign_fault = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Property battery over every module. Deterministic: fixed seeds, no timing.
std::vector<CheckResult> run_verification(const VerifyOptions& options = {});

std::string format_report(const std::vector<CheckResult>& results);

}  // namespace ehgo
