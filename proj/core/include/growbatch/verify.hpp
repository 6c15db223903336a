#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace growbatch {

/// One inequality (or family of inequalities) checked empirically.  margin is
/// the smallest slack observed, in the check's own normalized units; negative
/// means violated.
struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool pass() const;
};

/// Names accepted by run_verify_suite: lemma, strong, weak, strong-expected,
/// sublinear, sampling.
const std::vector<std::string>& verify_suite_names();

/// Runs one named verification recipe.  Throws std::invalid_argument for an
/// unknown name.  The recipes are deterministic: fixed problems, seeds and
/// iteration counts.
SuiteReport run_verify_suite(const std::string& name);

/// "suite <name>: PASS" header plus one line per check with its worst margin.
void print_report(const SuiteReport& report, std::ostream& out);

}  // namespace growbatch
