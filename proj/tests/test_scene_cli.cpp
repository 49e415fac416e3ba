#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hilbert/cli_runner.hpp"
#include "hilbert/experiments.hpp"
#include "hilbert/suites.hpp"

using namespace hilbert;
namespace fs = std::filesystem;

namespace {

nlohmann::json tiny_scene() {
  nlohmann::json j;
  j["label"] = "tiny";
  j["seed"] = 7;
  j["domain"] = {{"kind", "unit_ball"}, {"n", 2}};
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scene loading: defaults, validation, schema errors") {
  const Scene s = load_scene_json(tiny_scene());
  CHECK(s.domain->kind() == "ellipsoid");
  CHECK(s.domain->contains(s.basepoint));

  nlohmann::json bad = tiny_scene();
  bad.erase("seed");
  CHECK_THROWS_AS(load_scene_json(bad), SchemaError);

  bad = tiny_scene();
  bad["domain"] = {{"kind", "nonsense"}};
  CHECK_THROWS_AS(load_scene_json(bad), SchemaError);

  bad = tiny_scene();
  bad["basepoint"] = {2.0, 0.0};
  CHECK_THROWS_AS(load_scene_json(bad), SchemaError);

  // A non-invariant "group" is rejected by the sampled preservation check.
  bad = tiny_scene();
  bad["group"] = {{"label", "broken"},
                  {"generators", {{{2.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}}};
  CHECK_THROWS_AS(load_scene_json(bad), SchemaError);
}

TEST_CASE("scene loading: builtin groups resolve with their handles") {
  nlohmann::json j = tiny_scene();
  j["group"] = {{"builtin", "triangle"}, {"p", 2}, {"q", 3}, {"r", "inf"}};
  const Scene s = load_scene_json(j);
  REQUIRE(s.group.has_value());
  CHECK(s.group->cusp.has_value());
  CHECK(s.group->parabolic_gens.size() == 1);
  CHECK(s.domain->contains(s.basepoint));  // incenter becomes the basepoint
  CHECK(describe_scene(s).find("cusp point present") != std::string::npos);
}

TEST_CASE("verify suite: tiny scene runs clean and deterministically") {
  nlohmann::json j = tiny_scene();
  j["group"] = {{"builtin", "triangle"}, {"p", 2}, {"q", 3}, {"r", "inf"}};
  j["ps"] = {{"R_max_unit", 6.0}, {"s", 1.25}};
  const Scene s = load_scene_json(j);

  const SuiteReport a = run_suite(s, "metric");
  CHECK(a.total_violations() == 0);
  const SuiteReport b = run_suite(s, "metric");
  CHECK(a.to_json().dump() == b.to_json().dump());  // byte-identical

  CHECK_THROWS_AS(run_suite(s, "bogus"), SchemaError);
}

TEST_CASE("cli: describe, verify, experiment round trip with exit codes") {
  const fs::path dir = fs::temp_directory_path() / "hilbertlab_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path scene_path = dir / "scene.json";
  {
    nlohmann::json j = tiny_scene();
    j["group"] = {{"builtin", "triangle"}, {"p", 2}, {"q", 3}, {"r", "inf"}};
    j["volume"] = {{"R", {1.0}}, {"density_nodes", 1024}};
    std::ofstream(scene_path) << j.dump(2);
  }

  CHECK(run_cli({"describe", "--scene", scene_path.string()}) == 0);
  CHECK(run_cli({"describe", "--scene", (dir / "missing.json").string()}) == 2);

  const fs::path out1 = dir / "out1", out2 = dir / "out2";
  CHECK(run_cli({"verify", "--scene", scene_path.string(), "--suite", "eccentricity", "--out",
                 out1.string()}) == 0);
  CHECK(run_cli({"verify", "--scene", scene_path.string(), "--suite", "eccentricity", "--out",
                 out2.string()}) == 0);
  CHECK(slurp(out1 / "report.json") == slurp(out2 / "report.json"));

  CHECK(run_cli({"experiment", "--scene", scene_path.string(), "--name", "volume", "--out",
                 (dir / "vol1").string()}) == 0);
  CHECK(run_cli({"experiment", "--scene", scene_path.string(), "--name", "volume", "--out",
                 (dir / "vol2").string()}) == 0);
  CHECK(slurp(dir / "vol1" / "volume.csv") == slurp(dir / "vol2" / "volume.csv"));
  CHECK(slurp(dir / "vol1" / "volume.csv").find("ball_volume") != std::string::npos);

  CHECK(run_cli({"experiment", "--scene", scene_path.string(), "--name", "bogus", "--out",
                 (dir / "x").string()}) == 2);
  fs::remove_all(dir);
}
