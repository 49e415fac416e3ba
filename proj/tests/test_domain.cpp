#include <random>

#include "doctest.h"
#include "hilbert/domain.hpp"
#include "hilbert/group.hpp"

using namespace hilbert;

namespace {

CVec c2(double a, double b) {
  CVec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("unit ball membership") {
  auto ball = EllipsoidDomain::unit_ball(3);
  CHECK(ball->contains(ball->basepoint()));
  CVec boundary(3);
  boundary << 1.0, 0.0, 0.0;
  CHECK_FALSE(ball->contains_chart(boundary));  // open domain
  CVec outside(3);
  outside << 2.0, 0.0, 0.0;
  CHECK_FALSE(ball->contains_chart(outside));
}

TEST_CASE("unit ball chords: symmetry and hand-solved quadratic") {
  auto ball = EllipsoidDomain::unit_ball(2);
  const Chord center = ball->chord_chart(c2(0, 0), c2(1, 0));
  CHECK(center.t_plus == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(center.t_minus == doctest::Approx(-1.0).epsilon(1e-14));

  const Chord off = ball->chord_chart(c2(0.5, 0), c2(1, 0));
  CHECK(off.t_plus == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(off.t_minus == doctest::Approx(-1.5).epsilon(1e-13));
  CHECK(ball->chart().to_chart(off.b)[0] == doctest::Approx(1.0));
  CHECK(ball->chart().to_chart(off.a)[0] == doctest::Approx(-1.0));
}

TEST_CASE("pball: central symmetry and boundary norm") {
  PNormBallDomain pball(4.0, CMat(), 2);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 25; ++trial) {
    CVec v = c2(gauss(rng), gauss(rng));
    if (v.norm() < 0.1) continue;
    const Chord ch = pball.chord_chart(c2(0, 0), v);
    CHECK(ch.t_plus == doctest::Approx(-ch.t_minus).epsilon(1e-10));
    const CVec b = pball.chart().to_chart(ch.b);
    const double p4 = std::pow(std::abs(b[0]), 4.0) + std::pow(std::abs(b[1]), 4.0);
    CHECK(std::pow(p4, 0.25) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("chord equivariance under projective maps") {
  auto ball = EllipsoidDomain::unit_ball(2);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 30; ++trial) {
    Mat m = Mat::Identity(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) += 0.15 * gauss(rng);
    ProjectiveMap g(m);
    EllipsoidDomain mapped = ball->transformed(g);

    const CVec x = c2(0.2, -0.3);
    const CVec v = c2(gauss(rng), gauss(rng));
    if (v.norm() < 0.1) continue;
    const Chord ch = ball->chord_chart(x, v);

    const ProjectivePoint gx = g.apply(ProjectivePoint(ball->chart().from_chart(x)));
    const CVec gx_chart = mapped.chart().to_chart(gx);
    const ProjectivePoint nudged =
        g.apply(ProjectivePoint(ball->chart().from_chart(CVec(x + 1e-4 * v / v.norm()))));
    const CVec gv = mapped.chart().to_chart(nudged) - gx_chart;
    const Chord gch = mapped.chord_chart(gx_chart, gv);
    CHECK(gch.a.approx_equal(g.apply(ch.a), 1e-9));
    CHECK(gch.b.approx_equal(g.apply(ch.b), 1e-9));
  }
}

TEST_CASE("nested ellipsoids: chords of the inner lie inside the outer chord") {
  auto disc = EllipsoidDomain::unit_ball(2);
  // Horoball-shaped ellipse tangent at e1 (level -0.3 Busemann sublevel).
  const double e2l = std::exp(2.0 * -0.3);
  Mat q(3, 3);
  Vec w(3);
  w << -1.0, 0.0, 1.0;  // (1 - x1) functional
  q = w * w.transpose();
  q(0, 0) += e2l;
  q(1, 1) += e2l;
  q(2, 2) -= e2l;
  CVec inside = c2(0.9, 0.0);
  EllipsoidDomain horo(q, AffineChart::standard(2), ProjectivePoint(disc->chart().from_chart(inside)));

  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 25; ++trial) {
    CVec v = c2(gauss(rng), gauss(rng));
    if (v.norm() < 0.1) continue;
    const Chord inner = horo.chord_chart(inside, v);
    const Chord outer = disc->chord_chart(inside, v);
    CHECK(inner.t_plus <= outer.t_plus + 1e-12);
    CHECK(inner.t_minus >= outer.t_minus - 1e-12);
  }
}

TEST_CASE("orbit hull: membership, monotonicity in depth, boundedness") {
  auto kv = kac_vinberg_group(3, 3, 4, 1.4);
  const AffineChart chart(kv.chart_functional);
  OrbitHullDomain hull4(kv.group, kv.chamber_point, 4, chart);
  OrbitHullDomain hull6(kv.group, kv.chamber_point, 6, chart);
  CHECK(hull4.approximation());
  CHECK(hull4.contains(hull4.basepoint()));

  // Monotone in depth: hull4 vertices are members of hull6.
  for (const auto& v : hull4.vertices()) {
    CHECK(hull6.margin(v) > -1e-10);
  }
  for (const auto& v : hull6.vertices()) {
    CHECK(v.norm() < 1e6);
  }

  // Chord endpoints agree between the exact polygon path and the generic
  // bisection path (exercised through the base-class helper on a copy).
  const CVec x = hull6.chart().to_chart(hull6.basepoint());
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    CVec v = c2(gauss(rng), gauss(rng));
    if (v.norm() < 0.1) continue;
    const Chord ch = hull6.chord_chart(x, v);
    CHECK(std::abs(hull6.margin(hull6.chart().to_chart(ch.b))) < 1e-10);
    CHECK(std::abs(hull6.margin(hull6.chart().to_chart(ch.a))) < 1e-10);
  }
}

TEST_CASE("chord errors") {
  auto ball = EllipsoidDomain::unit_ball(2);
  CHECK_THROWS_AS(ball->chord_chart(c2(2.0, 0.0), c2(1, 0)), PointOutsideDomain);
  CHECK_THROWS_AS(ball->chord_chart(c2(0.0, 0.0), c2(0, 0)), DegenerateChord);
}
