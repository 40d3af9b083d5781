#pragma once

#include <string>
#include <vector>

#include "rchaos/kernel.hpp"
#include "rchaos/law.hpp"
#include "rchaos/rng.hpp"

namespace rchaos {

struct CheckRow {
  std::string suite;
  std::string check;
  long trial = 0;
  double deviation = 0.0;  // measured violation/deviation (0 is perfect)
  double tolerance = 0.0;
  bool pass = false;
  std::string mode = "exact";  // provenance: exact | mc(se=...)
};

struct SuiteResult {
  std::vector<CheckRow> rows;
  bool all_pass() const;
  int failures() const;
};

/// Runs a module invariant suite with seeded random trials.
/// Suites: algebra | chaos | coupling | bounds | all. Unknown -> InputError.
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

/// Random biased law with p_k uniform in [lo, hi].
RademacherLaw random_biased_law(int dim, CounterRng& rng, double lo = 0.1,
                                double hi = 0.9);

}  // namespace rchaos
