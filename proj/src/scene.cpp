#include "hilbert/scene.hpp"

#include <fstream>
#include <sstream>

namespace hilbert {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) { throw SchemaError(what); }

Mat parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) schema_error(what + " must be a matrix");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) schema_error(what + " has ragged rows");
    for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Vec parse_vector(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) schema_error(what + " must be a number array");
  Vec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

GroupBundle parse_group(const json& j) {
  GroupBundle b;
  if (j.contains("builtin")) {
    const std::string kind = j["builtin"].get<std::string>();
    b.builtin = kind;
    if (kind == "triangle") {
      const int p = j.at("p").get<int>();
      const int q = j.at("q").get<int>();
      const bool ideal = j.at("r").is_string();
      if (ideal && j["r"].get<std::string>() != "inf") schema_error("r must be a number or \"inf\"");
      TriangleGroupData data = ideal ? triangle_group_ideal(p, q)
                                     : triangle_group(p, q, j["r"].get<int>());
      b.group = data.group;
      b.preferred_basepoint = data.incenter;
      b.cusp = data.cusp;
      b.cusp_parabolic = data.cusp_parabolic;
      if (data.cusp_parabolic) b.parabolic_gens = {*data.cusp_parabolic};
      b.tri_p = p;
      b.tri_q = q;
      if (!ideal) b.tri_r = j["r"].get<int>();
      return b;
    }
    if (kind == "kac_vinberg") {
      const int p = j.at("p").get<int>();
      const int q = j.at("q").get<int>();
      const int r = j.at("r").get<int>();
      const double mu = j.at("mu").get<double>();
      KacVinbergData data = kac_vinberg_group(p, q, r, mu);
      b.group = data.group;
      b.preferred_basepoint = data.chamber_point;
      b.chart_functional = data.chart_functional;
      b.tri_p = p;
      b.tri_q = q;
      b.tri_r = r;
      b.mu = mu;
      return b;
    }
    if (kind == "parabolic") {
      const int n = j.at("n").get<int>();
      ParabolicSubgroupData data = parabolic_subgroup(n);
      b.group = data.group;
      b.cusp = data.fixed_point;
      for (int i = 0; i < data.group.num_generators(); i += 2) {
        b.parabolic_gens.push_back(data.group.gen(i));
      }
      return b;
    }
    if (kind == "cyclic_sl2") {
      Eigen::Matrix2d m;
      const Mat raw = parse_matrix(j.at("matrix"), "cyclic_sl2 matrix");
      if (raw.rows() != 2 || raw.cols() != 2) schema_error("cyclic_sl2 needs a 2x2 matrix");
      m << raw(0, 0), raw(0, 1), raw(1, 0), raw(1, 1);
      const ProjectiveMap g = sl2_klein_lift(m);
      b.group = ProjectiveGroup(j.value("label", std::string("cyclic")), {g, g.inverse()});
      return b;
    }
    schema_error("unknown builtin group '" + kind + "'");
  }
  if (!j.contains("generators")) schema_error("group needs 'builtin' or 'generators'");
  std::vector<ProjectiveMap> gens;
  for (const auto& g : j["generators"]) gens.push_back(ProjectiveMap(parse_matrix(g, "generator")));
  std::vector<Word> rels;
  if (j.contains("relations")) {
    for (const auto& r : j["relations"]) {
      Word w;
      for (const auto& letter : r) w.push_back(letter.get<int32_t>());
      rels.push_back(w);
    }
  }
  b.group = ProjectiveGroup(j.value("label", std::string("group")), gens, rels);
  if (b.group.relation_residual() > tol().relation_residual) {
    schema_error("declared group relations do not hold on the generators");
  }
  return b;
}

std::shared_ptr<ConvexDomain> parse_domain(const json& j, const std::optional<GroupBundle>& group) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "unit_ball") {
    return EllipsoidDomain::unit_ball(j.at("n").get<int>());
  }
  if (kind == "ellipsoid") {
    const Mat q = parse_matrix(j.at("Q"), "Q");
    const int n = static_cast<int>(q.rows()) - 1;
    AffineChart chart = j.contains("chart")
                            ? AffineChart(parse_vector(j["chart"], "chart"))
                            : AffineChart::standard(n);
    ProjectivePoint basepoint;
    if (j.contains("basepoint")) {
      basepoint = ProjectivePoint(parse_vector(j["basepoint"], "basepoint"));
    } else {
      // Center of the chart quadric: minimizer of the restricted form.
      Mat qq = 0.5 * (q + q.transpose());
      const Vec origin = chart.from_chart(CVec(CVec::Zero(n)));
      Mat lift(n + 1, n);
      for (int c = 0; c < n; ++c) {
        CVec e = CVec::Zero(n);
        e[c] = 1.0;
        lift.col(c) = chart.from_chart(e) - origin;
      }
      const CMat a = CMat(lift.transpose() * qq * lift);
      const CVec b = CVec(lift.transpose() * (qq * origin));
      const CVec center = CVec(-a.ldlt().solve(b));
      basepoint = ProjectivePoint(chart.from_chart(center));
    }
    return std::make_shared<EllipsoidDomain>(q, chart, basepoint);
  }
  if (kind == "pball") {
    const double p = j.at("p").get<double>();
    const int n = j.value("n", 2);
    CMat frame;
    if (j.contains("frame")) {
      const Mat raw = parse_matrix(j["frame"], "frame");
      frame = CMat(raw);
    }
    return std::make_shared<PNormBallDomain>(p, frame, n);
  }
  if (kind == "orbit_hull") {
    if (!group) schema_error("orbit_hull needs a group in the scene");
    const int depth = j.at("depth").get<int>();
    ProjectivePoint seed;
    if (j.contains("seed")) {
      seed = ProjectivePoint(parse_vector(j["seed"], "orbit hull seed"));
    } else if (group->preferred_basepoint) {
      seed = *group->preferred_basepoint;
    } else {
      schema_error("orbit_hull needs a seed point");
    }
    AffineChart chart;
    if (j.contains("chart")) {
      chart = AffineChart(parse_vector(j["chart"], "chart"));
    } else if (group->chart_functional) {
      chart = AffineChart(*group->chart_functional);
    } else {
      schema_error("orbit_hull needs a chart functional");
    }
    return std::make_shared<OrbitHullDomain>(group->group, seed, depth, chart);
  }
  schema_error("unknown domain kind '" + kind + "'");
}

}  // namespace

const ProjectiveGroup& Scene::require_group() const {
  if (!group) throw SchemaError("scene has no group but the operation needs one");
  return group->group;
}

double Scene::knob(const std::string& section, const std::string& key, double fallback) const {
  if (params.contains(section) && params[section].contains(key)) {
    return params[section][key].get<double>();
  }
  return fallback;
}

Scene load_scene_json(const nlohmann::json& j, const std::filesystem::path& source) {
  Scene s;
  s.source = source;
  try {
    s.label = j.value("label", std::string("scene"));
    if (!j.contains("seed")) throw SchemaError("scene needs a seed (stochastic experiments)");
    s.seed = j["seed"].get<uint64_t>();
    s.shards = j.value("shards", 1);
    if (j.contains("group")) s.group = parse_group(j["group"]);
    if (!j.contains("domain")) throw SchemaError("scene needs a domain");
    s.domain = parse_domain(j["domain"], s.group);

    if (s.group) {
      const std::string hull_group = j["domain"].value("group", std::string());
      if (!hull_group.empty() && j["group"].contains("label") &&
          hull_group != j["group"]["label"].get<std::string>()) {
        throw SchemaError("domain references group '" + hull_group + "' which is not in the scene");
      }
      // Generators must preserve the domain (sampled).
      s.group->group.validate_preserves(*s.domain);
    }

    if (j.contains("basepoint")) {
      const Vec b = parse_vector(j["basepoint"], "basepoint");
      if (b.size() == s.domain->dim()) {
        s.basepoint = s.domain->chart().point(CVec(b));
      } else {
        s.basepoint = ProjectivePoint(b);
      }
    } else if (s.group && s.group->preferred_basepoint) {
      s.basepoint = *s.group->preferred_basepoint;
    } else {
      s.basepoint = s.domain->basepoint();
    }
    if (!s.domain->contains(s.basepoint)) throw SchemaError("basepoint is not interior");

    if (j.contains("points")) {
      for (const auto& p : j["points"]) {
        const Vec v = parse_vector(p, "sample point");
        const ProjectivePoint pt = v.size() == s.domain->dim()
                                       ? s.domain->chart().point(CVec(v))
                                       : ProjectivePoint(v);
        if (!s.domain->contains(pt)) throw SchemaError("sample point is not interior");
        s.points.push_back(pt);
      }
    }
    s.params = j;
  } catch (const SchemaError&) {
    throw;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed scene JSON: ") + e.what());
  } catch (const Error& e) {
    throw SchemaError(std::string("invalid scene data: ") + e.what());
  }
  return s;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scene file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("scene is not valid JSON: ") + e.what());
  }
  return load_scene_json(j, path);
}

std::string describe_scene(const Scene& s) {
  std::ostringstream out;
  out << "scene '" << s.label << "' (seed " << s.seed << ", shards " << s.shards << ")\n";
  out << "  domain: " << s.domain->kind() << ", dim " << s.domain->dim()
      << (s.domain->approximation() ? ", approximation" : "") << "\n";
  out << "  basepoint chart coords: [";
  const CVec b = s.domain->chart().to_chart(s.basepoint);
  for (int i = 0; i < b.size(); ++i) out << (i ? ", " : "") << b[i];
  out << "]\n";
  if (s.group) {
    out << "  group: " << s.group->group.label() << ", " << s.group->group.num_generators()
        << " generators, relation residual " << s.group->group.relation_residual() << "\n";
    if (s.group->cusp) out << "  cusp point present\n";
  }
  if (!s.points.empty()) out << "  sample points: " << s.points.size() << "\n";
  return out.str();
}

}  // namespace hilbert
