#pragma once

#include "hilbert/scene.hpp"

namespace hilbert {

struct ExperimentOverrides {
  std::optional<uint64_t> seed;
  std::optional<int> shards;
  std::optional<long> budget;  // stratified-sampling budget cap
};

/// Runs one named experiment and writes its CSV/JSON artifacts under out_dir.
/// Returns the number of detected violations (0 is success). Artifacts are
/// byte-deterministic for fixed scene and seed; timestamps go to the separate
/// metadata file.
int run_experiment(const Scene& scene, const std::string& name,
                   const std::filesystem::path& out_dir,
                   const ExperimentOverrides& overrides = {});

std::vector<std::string> experiment_names();

}  // namespace hilbert
