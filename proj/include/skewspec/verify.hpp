#pragma once

#include <string>
#include <vector>

namespace skewspec {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // the numbers behind the verdict
};

// Quick structural identities (closed forms, exact invariants, small frozen
// draws). Deterministic; a couple of seconds end to end.
std::vector<CheckResult> fast_checks(int threads = 1);

// The twelve acceptance checks, frozen seeds throughout. scratch_dir receives
// the rerun artifacts of the determinism check and must be writable. Checks
// never throw; a failure inside one is reported as that check failing.
std::vector<CheckResult> acceptance_checks(int threads, const std::string& scratch_dir);

}  // namespace skewspec
