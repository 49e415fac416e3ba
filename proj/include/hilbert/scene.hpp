#pragma once

#include <filesystem>
#include <optional>

#include "hilbert/group.hpp"
#include "json.hpp"

namespace hilbert {

/// Group record with the extra handles the built-in constructions provide.
struct GroupBundle {
  ProjectiveGroup group;
  std::string builtin;  // empty for descriptor-defined groups
  std::optional<ProjectivePoint> preferred_basepoint;
  std::optional<ProjectivePoint> cusp;
  std::optional<ProjectiveMap> cusp_parabolic;
  std::vector<ProjectiveMap> parabolic_gens;  // cusp subgroup generators
  std::optional<Vec> chart_functional;        // orbit-hull chart for Coxeter groups
  // Matched hyperbolic triangle data for deformed Coxeter groups.
  std::optional<int> tri_p, tri_q, tri_r;
  double mu = 1.0;
};

/// Parsed scene: domain, optional group, basepoints and experiment knobs.
struct Scene {
  std::string label;
  uint64_t seed = 0;
  int shards = 1;
  std::shared_ptr<ConvexDomain> domain;
  std::optional<GroupBundle> group;
  ProjectivePoint basepoint;           // interior; defaults to the domain basepoint
  std::vector<ProjectivePoint> points; // sample points (chart coords in JSON)
  nlohmann::json params;               // raw scene JSON for experiment knobs
  std::filesystem::path source;

  const ProjectiveGroup& require_group() const;
  // Value of params[section][key] with a default.
  double knob(const std::string& section, const std::string& key, double fallback) const;
};

Scene load_scene(const std::filesystem::path& path);
Scene load_scene_json(const nlohmann::json& j, const std::filesystem::path& source = {});

std::string describe_scene(const Scene& scene);

}  // namespace hilbert
