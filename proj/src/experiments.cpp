#include "hilbert/experiments.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "hilbert/barycenter.hpp"
#include "hilbert/volume.hpp"

namespace hilbert {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class Csv {
 public:
  Csv(std::vector<std::string> columns, std::string version_tag, uint64_t param_hash)
      : columns_(std::move(columns)), version_(std::move(version_tag)), hash_(param_hash) {}

  void row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw Error("csv row arity mismatch");
    rows_.push_back(std::move(cells));
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    for (size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << ",version,params\n";
    char hash_buf[24];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(hash_));
    for (const auto& r : rows_) {
      for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << "," << version_ << "," << hash_buf << "\n";
    }
  }

 private:
  std::vector<std::string> columns_;
  std::string version_;
  uint64_t hash_;
  std::vector<std::string> rows_;
};

struct Ctx {
  const Scene& scene;
  std::filesystem::path out;
  uint64_t seed;
  int shards;
  long budget;
  uint64_t param_hash;
};

std::vector<double> number_list(const json& params, const std::string& section,
                                const std::string& key, std::vector<double> fallback) {
  if (!params.contains(section) || !params[section].contains(key)) return fallback;
  const auto& v = params[section][key];
  if (v.is_number()) return {v.get<double>()};
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.get<double>());
  return out;
}

BallVolumeOptions ball_options(const Ctx& ctx) {
  BallVolumeOptions opt;
  opt.shards = ctx.shards;
  if (ctx.budget > 0) opt.max_strata = static_cast<int>(ctx.budget);
  opt.density_nodes = static_cast<int>(ctx.scene.knob("volume", "density_nodes", 1 << 12));
  opt.radial_nodes = static_cast<int>(ctx.scene.knob("volume", "radial_nodes", 48));
  return opt;
}

// Sample points for pointwise experiments: scene points, else interior draws.
std::vector<ProjectivePoint> experiment_points(const Ctx& ctx, int fallback_count,
                                               double max_frac = 0.5) {
  if (!ctx.scene.points.empty()) return ctx.scene.points;
  std::vector<ProjectivePoint> pts;
  std::mt19937_64 rng(splitmix64(substream(ctx.seed, fnv1a("experiment-points"))));
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, max_frac);
  const ConvexDomain& dom = *ctx.scene.domain;
  const CVec base = dom.chart().to_chart(ctx.scene.basepoint);
  for (int i = 0; i < fallback_count; ++i) {
    CVec dir(dom.dim());
    for (int k = 0; k < dir.size(); ++k) dir[k] = gauss(rng);
    dir.normalize();
    const auto [tm, tp] = dom.chord_params(base, dir);
    pts.push_back(dom.chart().point(CVec(base + unif(rng) * tp * dir)));
  }
  return pts;
}

// Correspondence to the reference hyperbolic model for the scene's domain.
struct ReferenceData {
  Correspondence corr;
  std::shared_ptr<const OrbitBall> orbit;
  bool has_interior;
};

ReferenceData reference_correspondence(const Ctx& ctx, double R_max) {
  const Scene& sc = ctx.scene;
  auto orbit = std::make_shared<OrbitBall>(
      orbit_ball(*sc.domain, sc.require_group(), sc.basepoint, R_max));
  if (const auto* ell = dynamic_cast<const EllipsoidDomain*>(sc.domain.get())) {
    return {Correspondence::projective(ell->normalizing_map()), orbit, true};
  }
  if (!sc.group->tri_p || !sc.group->tri_r) {
    throw SchemaError("deformed scene needs matched triangle data (p,q,r) for the reference");
  }
  const TriangleGroupData tri =
      triangle_group(*sc.group->tri_p, *sc.group->tri_q, *sc.group->tri_r);
  return {Correspondence::orbit_relabel(
              orbit, tri.group, HyperbolicPoint::from_vector(tri.incenter.coords())),
          orbit, false};
}

// ---------------------------------------------------------------------------

int run_entropy(const Ctx& ctx) {
  Csv csv({"method", "R1", "R2", "count_or_volume", "estimate", "stderr", "seed", "shards"},
          kVersion, ctx.param_hash);
  const Scene& sc = ctx.scene;
  const int n = sc.domain->dim();

  if (sc.group) {
    for (double r_max : number_list(sc.params, "entropy", "R_max", {10.0})) {
      const PoincareResult res =
          entropy_poincare(*sc.domain, sc.require_group(), sc.basepoint, r_max, ctx.seed);
      csv.row({"poincare", fmt(res.estimate.R1), fmt(res.estimate.R2),
               std::to_string(res.profile.counts.back()), fmt(res.estimate.value),
               fmt(res.estimate.std_error), std::to_string(ctx.seed),
               std::to_string(ctx.shards)});
    }
  }
  if (sc.knob("entropy", "ball_growth", 1.0) != 0.0) {
    const double r1 = sc.knob("entropy", "R1", 5.0);
    const double r2 = sc.knob("entropy", "R2", n == 3 ? 8.0 : 9.0);
    const EntropyEstimate est =
        entropy_ball_growth(*sc.domain, sc.basepoint, r1, r2, ctx.seed, ball_options(ctx));
    csv.row({"ball_growth", fmt(est.R1), fmt(est.R2), "", fmt(est.value), fmt(est.std_error),
             std::to_string(ctx.seed), std::to_string(ctx.shards)});
  }
  csv.write(ctx.out / "entropy.csv");
  return 0;
}

int run_volume(const Ctx& ctx) {
  Csv csv({"kind", "R", "value", "stderr", "seed", "shards"}, kVersion, ctx.param_hash);
  const Scene& sc = ctx.scene;
  csv.row({"density_at_basepoint", "", fmt(volume_density(*sc.domain, sc.basepoint)), "",
           std::to_string(ctx.seed), std::to_string(ctx.shards)});
  for (double r : number_list(sc.params, "volume", "R", {1.0, 2.0})) {
    const MonteCarloValue v = ball_volume(*sc.domain, sc.basepoint, r,
                                          substream(ctx.seed, fnv1a("vol"), (uint64_t)(r * 64)),
                                          ball_options(ctx));
    csv.row({"ball_volume", fmt(r), fmt(v.value), fmt(v.std_error), std::to_string(ctx.seed),
             std::to_string(ctx.shards)});
  }
  csv.write(ctx.out / "volume.csv");
  return 0;
}

int run_natural_map(const Ctx& ctx) {
  const Scene& sc = ctx.scene;
  const double r_max = sc.knob("ps", "R_max", 10.0);
  const double h_est = sc.knob("ps", "h_est", sc.domain->dim() - 1.0);
  const ReferenceData ref = reference_correspondence(ctx, r_max);
  const auto points = experiment_points(ctx, 6);

  Csv csv({"point", "s", "R_max", "atoms", "bar_iterations", "klein_x", "klein_y", "klein_z",
           "dist_to_reference"},
          kVersion, ctx.param_hash);
  for (double offset : number_list(sc.params, "ps", "s_offsets", {0.2, 0.1, 0.05})) {
    PsParams ps{h_est + offset, r_max, ctx.seed};
    for (size_t i = 0; i < points.size(); ++i) {
      const NaturalMapResult nm =
          natural_map(*sc.domain, *ref.orbit, points[i], sc.basepoint, ps, ref.corr);
      const CVec k = nm.point.klein();
      std::string dist;
      if (ref.has_interior) {
        dist = fmt(hyp_distance(nm.point, ref.corr.interior(points[i])));
      }
      csv.row({std::to_string(i), fmt(ps.s), fmt(ps.R_max), std::to_string(nm.atom_count),
               std::to_string(nm.bar.iterations), fmt(k[0]), fmt(k[1]),
               k.size() > 2 ? fmt(k[2]) : "", dist});
    }
  }
  csv.write(ctx.out / "natural_map.csv");
  return 0;
}

int run_homotopy(const Ctx& ctx) {
  const Scene& sc = ctx.scene;
  const auto* ell = dynamic_cast<const EllipsoidDomain*>(sc.domain.get());
  if (ell == nullptr) throw SchemaError("homotopy tracks run on ellipsoid scenes");
  if (!sc.group || !sc.group->cusp) throw SchemaError("homotopy experiment needs a cusp");

  const double r_max = sc.knob("ps", "R_max", 10.0);
  const double h_est = sc.knob("ps", "h_est", 1.0);
  const double s = h_est + sc.knob("ps", "s_offset", 0.1);
  auto orbit = std::make_shared<OrbitBall>(
      orbit_ball(*sc.domain, sc.require_group(), sc.basepoint, r_max));
  const Correspondence corr = Correspondence::projective(ell->normalizing_map());

  // Deep points along the ray into the cusp, one halfspace holding the cusp
  // cap, and the control constant.
  const BoundaryPoint theta = make_boundary_point(*sc.domain, *sc.group->cusp);
  const AffineChart klein = AffineChart::standard(sc.domain->dim());
  const IdealPoint cusp_dir =
      IdealPoint::from_klein_dir(klein.to_chart(ell->normalizing_map().apply(theta.point)));
  const auto h1 = HalfspaceAtInfinity::from_chart(cusp_dir.klein_dir(), 0.55);
  const double D = halfspace_control_D(sc.domain->dim());
  const auto h0 = h1.neighborhood_cover(D);

  std::vector<double> grid;
  const int steps = static_cast<int>(sc.knob("homotopy", "t_steps", 10));
  for (int i = 0; i <= steps; ++i) grid.push_back(static_cast<double>(i) / steps);

  json records = json::array();
  int violations = 0;
  const int deep_points = static_cast<int>(sc.knob("homotopy", "deep_points", 10));
  const double depth0 = sc.knob("homotopy", "depth0", 4.0);
  PsParams ps{s, r_max, ctx.seed};
  for (int i = 0; i < deep_points; ++i) {
    const double depth = depth0 + 0.35 * i;
    const ProjectivePoint x = geodesic_point(*sc.domain, sc.basepoint, theta, depth);
    const HomotopyTrack track = homotopy_track(*sc.domain, *orbit, x, sc.basepoint, ps, corr,
                                               grid, 4096, substream(ctx.seed, 71, i), &cusp_dir);
    bool stayed = true;
    for (const auto& hp : track.points) {
      json rec;
      rec["point"] = i;
      rec["depth"] = depth;
      rec["t"] = hp.t;
      const CVec k = hp.point.klein();
      rec["klein"] = std::vector<double>(k.data(), k.data() + k.size());
      rec["busemann_depth"] = hp.busemann_depth;
      rec["in_H0"] = h0.contains(hp.point);
      stayed = stayed && h0.contains(hp.point);
      records.push_back(rec);
    }
    if (!stayed) ++violations;
  }
  json out;
  out["tracks"] = records;
  out["halfspace_D"] = D;
  out["violations"] = violations;
  std::ofstream(ctx.out / "homotopy.json") << out.dump(2) << "\n";
  return violations;
}

int run_jacobian(const Ctx& ctx) {
  const Scene& sc = ctx.scene;
  const double r_max = sc.knob("ps", "R_max", 10.0);
  const double h0 = sc.domain->dim() - 1.0;
  const double h_est = sc.knob("ps", "h_est", h0);
  const double s = h_est + sc.knob("ps", "s_offset", 0.05);
  const ReferenceData ref = reference_correspondence(ctx, r_max);
  const auto points = experiment_points(ctx, static_cast<int>(sc.knob("jacobian", "points", 8)),
                                        0.4);
  const EccentricityReport ecc = eccentricity(*sc.domain, points);

  Csv csv({"point", "jacobian", "bound", "ratio", "richardson_gap", "violation"}, kVersion,
          ctx.param_hash);
  int violations = 0;
  PsParams ps{s, r_max, ctx.seed};
  for (size_t i = 0; i < points.size(); ++i) {
    const JacobianReport rep = jacobian_check(*sc.domain, *ref.orbit, points[i], sc.basepoint,
                                              ps, ref.corr, h_est, h0, ecc.N_sup,
                                              sc.knob("jacobian", "step", 1e-3));
    violations += rep.violation ? 1 : 0;
    csv.row({std::to_string(i), fmt(rep.jacobian), fmt(rep.bound), fmt(rep.ratio),
             fmt(rep.richardson_gap), rep.violation ? "1" : "0"});
  }
  csv.write(ctx.out / "jacobian.csv");
  return violations;
}

int run_rigidity(const Ctx& ctx) {
  const Scene& sc = ctx.scene;
  const int n = sc.domain->dim();
  const double h0 = n - 1.0;

  // Hilbert side: eccentricity sup, entropy, fundamental-domain volume.
  const auto points = experiment_points(ctx, 8, 0.5);
  const EccentricityReport ecc = eccentricity(*sc.domain, points);
  const double r_max = sc.knob("entropy", "R_max", 10.0);
  const PoincareResult h_f =
      entropy_poincare(*sc.domain, sc.require_group(), sc.basepoint, r_max, ctx.seed);
  const OrbitBall cell_orbit =
      orbit_ball(*sc.domain, sc.require_group(), sc.basepoint, sc.knob("rigidity", "cell_R", 4.0));
  const MonteCarloValue vol_f = dirichlet_volume(*sc.domain, cell_orbit, sc.basepoint,
                                                 substream(ctx.seed, fnv1a("volF")),
                                                 ball_options(ctx));

  // Reference side: the matched hyperbolic lattice on the unit ball.
  std::shared_ptr<ConvexDomain> ref_domain;
  ProjectivePoint ref_base;
  std::optional<ProjectiveGroup> ref_group;
  if (const auto* ell = dynamic_cast<const EllipsoidDomain*>(sc.domain.get())) {
    ref_domain = sc.domain;
    ref_base = sc.basepoint;
    ref_group = sc.require_group();
  } else {
    if (!sc.group->tri_p || !sc.group->tri_r) {
      throw SchemaError("rigidity on a deformed scene needs matched (p,q,r)");
    }
    const TriangleGroupData tri =
        triangle_group(*sc.group->tri_p, *sc.group->tri_q, *sc.group->tri_r);
    ref_domain = EllipsoidDomain::unit_ball(n);
    ref_base = tri.incenter;
    ref_group = tri.group;
  }
  const OrbitBall ref_orbit = orbit_ball(*ref_domain, *ref_group, ref_base,
                                         sc.knob("rigidity", "cell_R", 4.0));
  const MonteCarloValue vol_0 = dirichlet_volume(*ref_domain, ref_orbit, ref_base,
                                                 substream(ctx.seed, fnv1a("vol0")),
                                                 ball_options(ctx));

  const double lhs = ecc.N_sup * std::pow(h_f.estimate.value, n) * vol_f.value;
  const double rhs = std::pow(h0, n) * vol_0.value;
  const double lhs_rel = std::sqrt(std::pow(n * h_f.estimate.std_error / h_f.estimate.value, 2) +
                                   std::pow(vol_f.std_error / vol_f.value, 2));
  const double rhs_rel = vol_0.std_error / vol_0.value;

  Csv csv({"quantity", "value", "stderr", "seed", "shards"}, kVersion, ctx.param_hash);
  csv.row({"N_sup", fmt(ecc.N_sup), "", std::to_string(ctx.seed), std::to_string(ctx.shards)});
  csv.row({"h_F", fmt(h_f.estimate.value), fmt(h_f.estimate.std_error), std::to_string(ctx.seed),
           std::to_string(ctx.shards)});
  csv.row({"vol_F", fmt(vol_f.value), fmt(vol_f.std_error), std::to_string(ctx.seed),
           std::to_string(ctx.shards)});
  csv.row({"h_0", fmt(h0), "", std::to_string(ctx.seed), std::to_string(ctx.shards)});
  csv.row({"vol_0", fmt(vol_0.value), fmt(vol_0.std_error), std::to_string(ctx.seed),
           std::to_string(ctx.shards)});
  csv.row({"lhs", fmt(lhs), fmt(lhs * lhs_rel), std::to_string(ctx.seed),
           std::to_string(ctx.shards)});
  csv.row({"rhs", fmt(rhs), fmt(rhs * rhs_rel), std::to_string(ctx.seed),
           std::to_string(ctx.shards)});
  csv.row({"lhs_over_rhs", fmt(lhs / rhs), fmt(lhs / rhs * (lhs_rel + rhs_rel)),
           std::to_string(ctx.seed), std::to_string(ctx.shards)});
  csv.write(ctx.out / "rigidity.csv");

  // The inequality itself, within the combined error.
  return lhs >= rhs * (1.0 - 3.0 * (lhs_rel + rhs_rel)) ? 0 : 1;
}

}  // namespace

std::vector<std::string> experiment_names() {
  return {"entropy", "volume", "natural-map", "homotopy", "jacobian-bound", "rigidity-ratio"};
}

int run_experiment(const Scene& scene, const std::string& name,
                   const std::filesystem::path& out_dir, const ExperimentOverrides& overrides) {
  std::filesystem::create_directories(out_dir);
  Ctx ctx{scene,
          out_dir,
          overrides.seed.value_or(scene.seed),
          overrides.shards.value_or(scene.shards),
          overrides.budget.value_or(0),
          fnv1a(scene.params.dump() + "|" + name)};

  int violations = 0;
  if (name == "entropy") {
    violations = run_entropy(ctx);
  } else if (name == "volume") {
    violations = run_volume(ctx);
  } else if (name == "natural-map") {
    violations = run_natural_map(ctx);
  } else if (name == "homotopy") {
    violations = run_homotopy(ctx);
  } else if (name == "jacobian-bound") {
    violations = run_jacobian(ctx);
  } else if (name == "rigidity-ratio") {
    violations = run_rigidity(ctx);
  } else {
    throw SchemaError("unknown experiment '" + name + "'");
  }
  return violations;
}

}  // namespace hilbert
