#include <cmath>

#include "hilbert/group.hpp"
#include "hilbert/hyperbolic.hpp"

namespace hilbert {

namespace {

Mat minkowski_j(int n) {
  Mat j = Mat::Identity(n + 1, n + 1);
  j(n, n) = -1.0;
  return j;
}

// Reflection x -> x - 2 <x,w> w for a spacelike unit wall normal.
Mat wall_reflection(const Vec& w) {
  const int n1 = static_cast<int>(w.size());
  return Mat(Mat::Identity(n1, n1) - 2.0 * w * (minkowski_j(n1 - 1) * w).transpose());
}

TriangleGroupData build_triangle(int p, int q, int r, bool ideal_r) {
  if (!ideal_r && 1.0 / p + 1.0 / q + 1.0 / r >= 1.0) {
    throw InvalidMap("triangle group must be hyperbolic");
  }
  // Wall normals with <w_i,w_j> = -cos(pi/m_ij); m_12 = p, m_13 = q, m_23 = r.
  const double c12 = std::cos(M_PI / p);
  const double c13 = std::cos(M_PI / q);
  const double c23 = ideal_r ? 1.0 : std::cos(M_PI / r);
  const double s12 = std::sin(M_PI / p);

  Vec w1(3), w2(3), w3(3);
  w1 << 1.0, 0.0, 0.0;
  w2 << -c12, s12, 0.0;
  const double a = -c13;
  const double b = (a * c12 - c23) / s12;
  const double cc = a * a + b * b - 1.0;
  if (!(cc > 0.0)) throw InvalidMap("wall configuration is not hyperbolic");
  w3 << a, b, std::sqrt(cc);

  std::vector<ProjectiveMap> gens{ProjectiveMap(wall_reflection(w1)),
                                  ProjectiveMap(wall_reflection(w2)),
                                  ProjectiveMap(wall_reflection(w3))};
  std::vector<Word> rels;
  for (int i = 0; i < 3; ++i) rels.push_back(Word{i, i});
  auto power_rel = [](int i, int j, int m) {
    Word w;
    for (int k = 0; k < m; ++k) {
      w.push_back(i);
      w.push_back(j);
    }
    return w;
  };
  rels.push_back(power_rel(0, 1, p));
  rels.push_back(power_rel(0, 2, q));
  if (!ideal_r) rels.push_back(power_rel(1, 2, r));

  std::string label = "triangle(" + std::to_string(p) + "," + std::to_string(q) + "," +
                      (ideal_r ? std::string("inf") : std::to_string(r)) + ")";
  TriangleGroupData data{ProjectiveGroup(label, gens, rels), {}, {}, {}};
  if (data.group.relation_residual() > tol().relation_residual) {
    throw InvalidMap("triangle group relations failed validation");
  }

  // Incenter: equal Minkowski pairing with all three walls.
  Mat m(3, 3);
  m.row(0) = (minkowski_j(2) * w1).transpose();
  m.row(1) = (minkowski_j(2) * w2).transpose();
  m.row(2) = (minkowski_j(2) * w3).transpose();
  Vec rhs(3);
  rhs << -1.0, -1.0, -1.0;
  Vec x = m.colPivHouseholderQr().solve(rhs);
  if (minkowski(x, x) >= 0.0) throw InvalidMap("incenter construction failed");
  if (x[2] < 0.0) x = -x;
  data.incenter = ProjectivePoint(x);

  if (ideal_r) {
    // Ideal vertex: the null direction orthogonal to both parallel walls.
    Eigen::Vector3d jw2 = Eigen::Vector3d(minkowski_j(2) * w2);
    Eigen::Vector3d jw3 = Eigen::Vector3d(minkowski_j(2) * w3);
    Eigen::Vector3d theta = jw2.cross(jw3);
    Vec th(3);
    th << theta[0], theta[1], theta[2];
    if (th[2] < 0.0) th = -th;
    if (std::abs(minkowski(th, th)) > 1e-9 * th.squaredNorm()) {
      throw InvalidMap("ideal vertex is not null");
    }
    data.cusp = ProjectivePoint(th);
    data.cusp_parabolic = gens[1].compose(gens[2]);
  }
  return data;
}

}  // namespace

TriangleGroupData triangle_group(int p, int q, int r) { return build_triangle(p, q, r, false); }

TriangleGroupData triangle_group_ideal(int p, int q) { return build_triangle(p, q, 2, true); }

ProjectiveMap sl2_klein_lift(const Eigen::Matrix2d& g) {
  // Action on symmetric matrices S = [[t+x1, x2], [x2, t-x1]] by S -> g S g^T
  // preserves det S = t^2 - x1^2 - x2^2.
  Mat rho(3, 3);
  const Eigen::Matrix2d basis[3] = {
      (Eigen::Matrix2d() << 1, 0, 0, -1).finished(),  // x1
      (Eigen::Matrix2d() << 0, 1, 1, 0).finished(),   // x2
      Eigen::Matrix2d::Identity(),                    // t
  };
  for (int j = 0; j < 3; ++j) {
    const Eigen::Matrix2d s = g * basis[j] * g.transpose();
    rho(0, j) = 0.5 * (s(0, 0) - s(1, 1));
    rho(1, j) = s(0, 1);
    rho(2, j) = 0.5 * (s(0, 0) + s(1, 1));
  }
  return ProjectiveMap(rho);
}

KacVinbergData kac_vinberg_group(int p, int q, int r, double mu, int chart_orbit_depth) {
  if (!(mu > 0.0)) throw InvalidMap("deformation parameter must be positive");
  if (1.0 / p + 1.0 / q + 1.0 / r >= 1.0) throw InvalidMap("Coxeter triangle must be hyperbolic");
  // Cartan matrix: A_ii = 2, A_ij A_ji = 4 cos^2(pi/m_ij), asymmetry mu on
  // the (1,2) pair; mu = 1 is the symmetrizable (hyperbolic) point.
  const double c12 = 2.0 * std::cos(M_PI / p);
  const double c13 = 2.0 * std::cos(M_PI / q);
  const double c23 = 2.0 * std::cos(M_PI / r);
  Mat a(3, 3);
  a << 2.0, -c12 * mu, -c13,
      -c12 / mu, 2.0, -c23,
      -c13, -c23, 2.0;

  // With alpha_i the coordinate functionals, v_j is the j-th column of A and
  // sigma_j = Id - v_j alpha_j^T.
  std::vector<ProjectiveMap> gens;
  for (int j = 0; j < 3; ++j) {
    gens.push_back(ProjectiveMap(Mat(Mat::Identity(3, 3) - a.col(j) * Mat::Identity(3, 3).row(j))));
  }
  std::vector<Word> rels;
  for (int i = 0; i < 3; ++i) rels.push_back(Word{i, i});
  auto power_rel = [](int i, int j, int m) {
    Word w;
    for (int k = 0; k < m; ++k) {
      w.push_back(i);
      w.push_back(j);
    }
    return w;
  };
  rels.push_back(power_rel(0, 1, p));
  rels.push_back(power_rel(0, 2, q));
  rels.push_back(power_rel(1, 2, r));

  char buf[96];
  std::snprintf(buf, sizeof(buf), "kac_vinberg(%d,%d,%d;mu=%.6g)", p, q, r, mu);
  KacVinbergData data{ProjectiveGroup(buf, gens, rels), {}, {}};
  if (data.group.relation_residual() > tol().relation_residual) {
    throw InvalidMap("Coxeter relations failed validation");
  }

  Vec chamber(3);
  chamber << 1.0, 1.0, 1.0;
  data.chamber_point = ProjectivePoint(chamber);

  // Chart functional: sum of sign-aligned orbit directions; validated to be
  // positive with margin on the sampled orbit.
  std::vector<ProjectivePoint> orbit = data.group.orbit_points(data.chamber_point, chart_orbit_depth);
  Vec ref = data.chamber_point.coords();
  Vec sum = Vec::Zero(3);
  for (const auto& pnt : orbit) {
    Vec v = pnt.coords();
    if (v.dot(ref) < 0.0) v = -v;
    sum += v;
  }
  sum.normalize();
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& pnt : orbit) {
    Vec v = pnt.coords();
    if (v.dot(ref) < 0.0) v = -v;
    worst = std::min(worst, sum.dot(v));
  }
  if (!(worst > 1e-4)) {
    throw InvalidMap("orbit cone is not bounded in any sampled chart; deformation too extreme");
  }
  data.chart_functional = sum;
  return data;
}

ParabolicSubgroupData parabolic_subgroup(int n) {
  if (n < 2 || n > kMaxDim) throw NotSupported("parabolic_subgroup needs 2 <= n <= kMaxDim");
  Vec xi = Vec::Zero(n + 1);
  xi[0] = 1.0;
  xi[n] = 1.0;
  const Mat j = minkowski_j(n);

  std::vector<ProjectiveMap> gens;
  std::vector<Mat> logs;
  std::vector<Word> rels;
  for (int i = 1; i < n; ++i) {
    Vec u = Vec::Zero(n + 1);
    u[i] = 1.0;
    Mat nmat = u * (j * xi).transpose() - xi * (j * u).transpose();
    Mat pmat = Mat::Identity(n + 1, n + 1) + nmat + 0.5 * nmat * nmat;
    gens.push_back(ProjectiveMap(pmat));
    logs.push_back(nmat);
    gens.push_back(ProjectiveMap(Mat(Mat::Identity(n + 1, n + 1) - nmat + 0.5 * nmat * nmat)));
    logs.push_back(Mat(-nmat));
  }
  // Inverse pairs and commutators as validation relations.
  const int k = static_cast<int>(gens.size());
  for (int i = 0; i + 1 < k; i += 2) rels.push_back(Word{i, i + 1});
  for (int i = 0; i < k; i += 2) {
    for (int m = i + 2; m < k; m += 2) {
      rels.push_back(Word{i, m, i + 1, m + 1});
    }
  }
  ParabolicSubgroupData data{
      ProjectiveGroup("parabolic(rank " + std::to_string(n - 1) + ")", gens, rels),
      ProjectivePoint(xi), logs};
  if (data.group.relation_residual() > tol().relation_residual) {
    throw InvalidMap("parabolic subgroup relations failed validation");
  }
  return data;
}

}  // namespace hilbert
