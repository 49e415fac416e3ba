#pragma once

#include "hilbert/scene.hpp"

namespace hilbert {

struct CheckResult {
  std::string name;
  long trials = 0;
  long violations = 0;
  double worst_margin = 0.0;  // most negative slack observed (<0 is a violation)
  std::string note;           // "skipped: ..." when not applicable to the scene
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  long total_violations() const {
    long v = 0;
    for (const auto& c : checks) v += c.violations;
    return v;
  }
  nlohmann::json to_json() const;
};

/// Named property suites over a scene: metric, busemann, measures, barycenter,
/// cusp, eccentricity, or all.
SuiteReport run_suite(const Scene& scene, const std::string& suite);

std::vector<std::string> suite_names();

}  // namespace hilbert
