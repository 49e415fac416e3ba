#include <cmath>
#include <random>

#include "doctest.h"
#include "hilbert/barycenter.hpp"

using namespace hilbert;

namespace {

CVec c2(double a, double b) {
  CVec v(2);
  v << a, b;
  return v;
}

BoundaryMeasure atoms_at_angles(const std::vector<double>& angles,
                                const std::vector<double>& weights) {
  std::vector<BoundaryAtom> atoms;
  for (size_t i = 0; i < angles.size(); ++i) {
    Vec p(3);
    p << std::cos(angles[i]), std::sin(angles[i]), 1.0;
    atoms.push_back({ProjectivePoint(p), weights[i], -1});
  }
  return BoundaryMeasure(std::move(atoms), MeasureTag::visual);
}

}  // namespace

TEST_CASE("bar: three equal atoms at cube roots of unity give the origin") {
  const BoundaryMeasure m =
      atoms_at_angles({0.0, 2.0 * M_PI / 3.0, 4.0 * M_PI / 3.0}, {1.0, 1.0, 1.0});
  const BarycenterResult r = bar(m, HyperbolicPoint::origin(2));
  CHECK(r.point.klein().norm() < 1e-8);
  CHECK(r.gradient_norm <= 1e-8 * m.total_mass());
}

TEST_CASE("bar: barycenter of the visual measure returns the base point") {
  for (int n : {2, 3}) {
    std::mt19937_64 rng(13 + n);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    for (int trial = 0; trial < 5; ++trial) {
      CVec k(n);
      for (int i = 0; i < n; ++i) k[i] = unif(rng);
      if (k.squaredNorm() > 0.8) continue;
      const HyperbolicPoint y = HyperbolicPoint::from_klein(k);
      const BoundaryMeasure nu = visual_measure(y, 4096, 17 + trial);
      const BarycenterResult r = bar(nu, HyperbolicPoint::origin(n));
      CHECK(hyp_distance(r.point, y) < 0.05);
    }
  }
}

TEST_CASE("bar: equivariance and zero-homogeneity") {
  const BoundaryMeasure m = atoms_at_angles({0.1, 1.3, 2.9, 4.4, 5.6}, {0.5, 1.2, 0.8, 1.0, 0.6});
  const BarycenterResult base = bar(m, HyperbolicPoint::origin(2));

  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat g = random_isometry(2, 400 + trial);
    const BoundaryMeasure pushed = Correspondence::projective(ProjectiveMap(g)).push(m);
    const BarycenterResult moved = bar(pushed, HyperbolicPoint::origin(2));
    const HyperbolicPoint expected = HyperbolicPoint::from_vector(Vec(g * base.point.x));
    CHECK(hyp_distance(moved.point, expected) < 1e-7);
  }

  const BarycenterResult scaled = bar(m.scaled(3.7), HyperbolicPoint::origin(2));
  CHECK(hyp_distance(scaled.point, base.point) < 1e-9);
}

TEST_CASE("bar: functional is convex along geodesics and rejects concentrated mass") {
  const BoundaryMeasure m = atoms_at_angles({0.3, 1.9, 3.7, 5.1}, {1.0, 0.7, 1.1, 0.9});
  // Too much mass on one atom.
  CHECK_THROWS_AS(bar(atoms_at_angles({0.0, 2.0}, {3.0, 1.0}), HyperbolicPoint::origin(2)),
                  MassTooConcentrated);

  // Midpoint value of B(., m) never exceeds the endpoint average.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(-0.6, 0.6);
  auto value = [&](const HyperbolicPoint& y) {
    double acc = 0.0;
    const HyperbolicPoint o = HyperbolicPoint::origin(2);
    for (const auto& a : m.atoms()) {
      const IdealPoint xi = IdealPoint::from_vector(a.point.coords());
      acc += a.weight * busemann_hyperbolic(o, xi, y);
    }
    return acc;
  };
  for (int trial = 0; trial < 40; ++trial) {
    const HyperbolicPoint a = HyperbolicPoint::from_klein(c2(unif(rng), unif(rng)));
    const HyperbolicPoint b = HyperbolicPoint::from_klein(c2(unif(rng), unif(rng)));
    const double d = hyp_distance(a, b);
    if (d < 1e-3) continue;
    const double c0 = -minkowski(a.x, b.x);
    const Vec v = (b.x - c0 * a.x) / std::sqrt(c0 * c0 - 1.0);
    const HyperbolicPoint mid = geodesic(a, v, 0.5 * d);
    CHECK(value(mid) <= 0.5 * (value(a) + value(b)) + 1e-9);
  }
}

TEST_CASE("halfspace control: D = arctanh(1/2), angle condition, barycenter control") {
  const double D = halfspace_control_D(2);
  CHECK(D == doctest::Approx(std::atanh(0.5)).epsilon(1e-6));
  CHECK(halfspace_control_D(3) == doctest::Approx(D).epsilon(1e-9));

  // Angle condition: beyond D the inner product with every cap direction
  // exceeds one half.
  const auto h = HalfspaceAtInfinity::from_chart(c2(1.0, 0.0), 0.0);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const HyperbolicPoint o = HyperbolicPoint::origin(2);
  for (int trial = 0; trial < 2000; ++trial) {
    // Point at distance d > D from the hyperplane, reached along the normal
    // geodesic from a point sliding on the hyperplane.
    const HyperbolicPoint p0 = HyperbolicPoint::from_klein(c2(0.0, 1.6 * (unif(rng) - 0.5)));
    const double d = D + 0.01 + 2.0 * unif(rng);
    const HyperbolicPoint q = geodesic(p0, h.w, d);
    const double ang = M_PI / 2 + unif(rng) * M_PI;
    const IdealPoint alpha = IdealPoint::from_klein_dir(c2(std::cos(ang), std::sin(ang)));
    if (!h.cap_contains(alpha)) continue;
    const Vec va = unit_toward(q, alpha);
    const Vec vh = h.unit_toward_halfspace(q);
    CHECK(minkowski(va, vh) > 0.5 - 1e-9);
  }

  // Two-thirds concentrated measures land within D of the halfspace.
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> angles;
    std::vector<double> weights;
    double cap_mass = 0.0, total = 0.0;
    std::mt19937_64 trng(1000 + trial);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k = 0; k < 40; ++k) {
      const double ang = 2.0 * M_PI * u01(trng);
      const double w = 0.1 + u01(trng);
      Vec p(3);
      p << std::cos(ang), std::sin(ang), 1.0;
      const bool in_cap = std::cos(ang) <= 0.0;  // cap of {x1 <= 0}
      angles.push_back(ang);
      weights.push_back(w);
      cap_mass += in_cap ? w : 0.0;
      total += w;
    }
    if (cap_mass <= (2.0 / 3.0) * total) continue;
    const BoundaryMeasure m = atoms_at_angles(angles, weights);
    const BarycenterResult r = bar(m, o);
    const auto hs = HalfspaceAtInfinity::from_chart(c2(1.0, 0.0), 0.0);
    CHECK(hs.distance(r.point) <= D + 1e-6);
  }
}

TEST_CASE("eccentricity: exactly one on ellipsoids, sandwich on the deformed hull") {
  auto disc = EllipsoidDomain::unit_ball(2);
  std::vector<ProjectivePoint> pts;
  for (double r : {0.0, 0.3, 0.6}) {
    pts.push_back(ProjectivePoint(disc->chart().from_chart(c2(r, 0.1 * r))));
  }
  const EccentricityReport rep = eccentricity(*disc, pts);
  for (const auto& p : rep.points) {
    CHECK(p.N_value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(p.K_value == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(p.sandwich_ok);
  }

  auto ball3 = EllipsoidDomain::unit_ball(3);
  CVec k3(3);
  k3 << 0.25, -0.1, 0.3;
  const EccentricityReport rep3 =
      eccentricity(*ball3, {ProjectivePoint(ball3->chart().from_chart(k3))}, 1 << 12);
  CHECK(rep3.points[0].N_value == doctest::Approx(1.0).epsilon(1e-6));

  auto kv = kac_vinberg_group(3, 3, 4, 1.5);
  OrbitHullDomain hull(kv.group, kv.chamber_point, 8, AffineChart(kv.chart_functional));
  std::vector<ProjectivePoint> hull_pts;
  const CVec hc = hull.chart().to_chart(hull.basepoint());
  for (double r : {0.0, 0.4}) {
    for (double ang : {0.3, 2.1, 4.0}) {
      const CVec dir = c2(std::cos(ang), std::sin(ang));
      const Chord ch = hull.chord_chart(hc, dir);
      hull_pts.push_back(ProjectivePoint(hull.chart().from_chart(CVec(hc + r * ch.t_plus * dir))));
    }
  }
  const EccentricityReport hrep = eccentricity(hull, hull_pts);
  CHECK(hrep.all_sandwich_ok);
  for (const auto& p : hrep.points) {
    CHECK(p.N_value >= 1.0 - 1e-9);
  }
  CHECK(hrep.N_sup > 1.0 + 1e-6);  // a polygonal ball is never an ellipsoid
}

TEST_CASE("natural map and homotopy on the disc lattice (small orbit)") {
  auto disc = EllipsoidDomain::unit_ball(2);
  auto lat = triangle_group_ideal(2, 3);
  auto orbit = std::make_shared<OrbitBall>(orbit_ball(*disc, lat.group, lat.incenter, 8.0));
  PsParams ps{1.15, 8.0, 0};
  const Correspondence corr = Correspondence::identity(2);

  // Identity case: the natural map stays near the point at modest truncation.
  const ProjectivePoint x(disc->chart().from_chart(c2(0.15, -0.1)));
  const NaturalMapResult nm = natural_map(*disc, *orbit, x, lat.incenter, ps, corr);
  const HyperbolicPoint fx = corr.interior(x);
  CHECK(hyp_distance(nm.point, fx) < 0.25);

  // Homotopy endpoints: t=0 is the visual barycenter of f(x), t=1 is the map.
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const HomotopyTrack track =
      homotopy_track(*disc, *orbit, x, lat.incenter, ps, corr, grid, 2048, 33);
  REQUIRE(track.points.size() == 3);
  CHECK(hyp_distance(track.points.front().point, fx) < 0.05);
  CHECK(hyp_distance(track.points.back().point, nm.point) < 1e-9);

  // Equivariance at the atomic level: pushing the pushed measure by the
  // matched isometry moves the barycenter exactly.
  const ProjectiveMap gamma = lat.group.gen(0).compose(lat.group.gen(1));
  const Correspondence relabel = Correspondence::orbit_relabel(
      orbit, lat.group, HyperbolicPoint::from_vector(lat.incenter.coords()));
  const BoundaryMeasure pushed = relabel.push(ps_approximant(*disc, *orbit, x, lat.incenter, ps));
  const BarycenterResult bar_x = bar(pushed, HyperbolicPoint::origin(2));
  const BarycenterResult bar_gx =
      bar(Correspondence::projective(gamma).push(pushed), HyperbolicPoint::origin(2));
  CHECK(hyp_distance(bar_gx.point, HyperbolicPoint::from_vector(Vec(gamma.matrix() * bar_x.point.x))) <
        1e-6);

  // Recomputing at gamma.x instead reuses the same orbit ball, so the index
  // set shifts by one shell; the mismatch stays small.
  const NaturalMapResult b = natural_map(*disc, *orbit, gamma.apply(x), lat.incenter, ps, relabel);
  const HyperbolicPoint moved = HyperbolicPoint::from_vector(Vec(gamma.matrix() * bar_x.point.x));
  CHECK(hyp_distance(b.point, moved) < 0.35);
}

TEST_CASE("jacobian check: identity case stays near one and below the bound") {
  auto disc = EllipsoidDomain::unit_ball(2);
  auto lat = triangle_group_ideal(2, 3);
  auto orbit = std::make_shared<OrbitBall>(orbit_ball(*disc, lat.group, lat.incenter, 9.0));
  PsParams ps{1.1, 9.0, 0};
  const ProjectivePoint x(disc->chart().from_chart(c2(0.1, 0.05)));
  const JacobianReport rep = jacobian_check(*disc, *orbit, x, lat.incenter, ps,
                                            Correspondence::identity(2), 1.0, 1.0, 1.0, 1e-3);
  CHECK(std::abs(rep.jacobian - 1.0) < 0.6);  // smoke gate; the acceptance suite calibrates
  CHECK_FALSE(rep.violation);
}
