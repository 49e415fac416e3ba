#include "hilbert/cli_runner.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hilbert/experiments.hpp"
#include "hilbert/suites.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hilbert {

namespace {

void write_metadata(const std::filesystem::path& out_dir, const Scene& scene,
                    const std::string& action) {
  nlohmann::json meta;
  meta["action"] = action;
  meta["scene"] = scene.source.string();
  meta["label"] = scene.label;
  meta["version"] = kVersion;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  meta["timestamp_s"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
#ifdef _OPENMP
  meta["omp_max_threads"] = omp_get_max_threads();
#else
  meta["omp_max_threads"] = 1;
#endif
  std::ofstream(out_dir / "metadata.json") << meta.dump(2) << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Hilbert geometry laboratory"};
  app.require_subcommand(1);

  std::string scene_path, suite = "all", name, out_dir = "runs";
  uint64_t seed_override = 0;
  bool have_seed = false;
  int shards = 0;
  long budget = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scene", scene_path, "scene JSON path")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed_override, "override the scene seed")
        ->each([&](const std::string&) { have_seed = true; });
    cmd->add_option("--shards", shards, "worker shard count (recorded)");
    cmd->add_option("--budget", budget, "sample budget cap");
  };

  CLI::App* verify = app.add_subcommand("verify", "run invariant suites");
  add_common(verify);
  verify->add_option("--suite", suite, "metric|busemann|measures|barycenter|cusp|eccentricity|all");

  CLI::App* experiment = app.add_subcommand("experiment", "run a named experiment");
  add_common(experiment);
  experiment->add_option("--name", name, "entropy|volume|natural-map|homotopy|jacobian-bound|rigidity-ratio")
      ->required();

  CLI::App* describe = app.add_subcommand("describe", "print the scene interpretation");
  describe->add_option("--scene", scene_path, "scene JSON path")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    std::cerr << (e.get_exit_code() == 0 ? "" : "usage error: ") << e.what() << "\n";
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    Scene scene = load_scene(scene_path);
    if (have_seed) scene.seed = seed_override;
    if (shards > 0) scene.shards = shards;

    if (describe->parsed()) {
      std::cout << describe_scene(scene);
      return 0;
    }

    std::filesystem::create_directories(out_dir);
    if (verify->parsed()) {
      const SuiteReport report = run_suite(scene, suite);
      std::ofstream(std::filesystem::path(out_dir) / "report.json")
          << report.to_json().dump(2) << "\n";
      write_metadata(out_dir, scene, "verify:" + suite);
      for (const auto& c : report.checks) {
        std::cout << (c.violations ? "FAIL " : (c.trials ? "pass " : "skip ")) << c.name
                  << "  trials=" << c.trials << " violations=" << c.violations
                  << " worst_margin=" << c.worst_margin
                  << (c.note.empty() ? "" : "  [" + c.note + "]") << "\n";
      }
      std::cout << (report.total_violations() ? "RESULT: FAIL (" : "RESULT: ok (")
                << report.total_violations() << " violations)\n";
      return report.total_violations() ? 1 : 0;
    }

    if (experiment->parsed()) {
      ExperimentOverrides ov;
      if (have_seed) ov.seed = seed_override;
      if (shards > 0) ov.shards = shards;
      if (budget > 0) ov.budget = budget;
      const int violations = run_experiment(scene, name, out_dir, ov);
      write_metadata(out_dir, scene, "experiment:" + name);
      std::cout << "experiment " << name << ": "
                << (violations ? "violations=" + std::to_string(violations) : "ok") << "\n";
      return violations ? 1 : 0;
    }
  } catch (const SchemaError& e) {
    std::cerr << "scene error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace hilbert
