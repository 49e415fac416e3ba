#include <cmath>
#include <random>

#include "doctest.h"
#include "hilbert/hyperbolic.hpp"
#include "hilbert/metric.hpp"
#include "hilbert/group.hpp"

using namespace hilbert;

namespace {

CVec c2(double a, double b) {
  CVec v(2);
  v << a, b;
  return v;
}

// Interior sample: random direction, random fraction of the chord.
CVec interior_point(const ConvexDomain& dom, std::mt19937_64& rng, double max_frac = 0.9) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, max_frac);
  const CVec base = dom.chart().to_chart(dom.basepoint());
  CVec dir(dom.dim());
  for (int i = 0; i < dir.size(); ++i) dir[i] = gauss(rng);
  dir.normalize();
  const Chord ch = dom.chord_chart(base, dir);
  const double t = unif(rng);
  return base + (t > 0.5 ? t * ch.t_plus : (t / max_frac) * max_frac * ch.t_minus) * ch.dir;
}

}  // namespace

TEST_CASE("hilbert distance: hand value and symmetry on the disc") {
  auto disc = EllipsoidDomain::unit_ball(2);
  const CVec o = c2(0, 0), y = c2(0.5, 0);
  const double d = hilbert_distance_chart(*disc, o, y);
  CHECK(d == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-12));
  CHECK(d == doctest::Approx(std::atanh(0.5)).epsilon(1e-12));
  CHECK(hilbert_distance_chart(*disc, y, o) == doctest::Approx(d).epsilon(1e-12));
  CHECK(hilbert_distance_chart(*disc, y, y) == 0.0);
}

TEST_CASE("hilbert distance equals Beltrami-Klein distance on ellipsoids") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> gauss;
  Mat m = Mat::Identity(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) += 0.2 * gauss(rng);
  auto disc = EllipsoidDomain::unit_ball(2);
  EllipsoidDomain dom = disc->transformed(ProjectiveMap(m));

  for (int trial = 0; trial < 200; ++trial) {
    const CVec x = interior_point(dom, rng), y = interior_point(dom, rng);
    const ProjectivePoint px(dom.chart().from_chart(x)), py(dom.chart().from_chart(y));
    const double d = hilbert_distance(dom, px, py);
    CHECK(d == doctest::Approx(dom.klein_distance(px, py)).epsilon(1e-9));
  }
}

TEST_CASE("metric axioms on random triples (disc and pball)") {
  std::mt19937_64 rng(31);
  auto disc = EllipsoidDomain::unit_ball(2);
  PNormBallDomain pball(4.0, CMat(), 2);
  const ConvexDomain* doms[2] = {disc.get(), &pball};
  for (const ConvexDomain* dom : doms) {
    for (int trial = 0; trial < 100; ++trial) {
      const CVec a = interior_point(*dom, rng), b = interior_point(*dom, rng),
                 c = interior_point(*dom, rng);
      const double dab = hilbert_distance_chart(*dom, a, b);
      const double dba = hilbert_distance_chart(*dom, b, a);
      const double dac = hilbert_distance_chart(*dom, a, c);
      const double dcb = hilbert_distance_chart(*dom, c, b);
      CHECK(dab == doctest::Approx(dba).epsilon(1e-10));
      CHECK(dab <= dac + dcb + 1e-9);
    }
  }
}

TEST_CASE("projective invariance of the distance") {
  auto disc = EllipsoidDomain::unit_ball(2);
  std::mt19937_64 rng(37);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 30; ++trial) {
    Mat m = Mat::Identity(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) += 0.1 * gauss(rng);
    const ProjectiveMap g(m);
    EllipsoidDomain mapped = disc->transformed(g);
    const CVec x = interior_point(*disc, rng), y = interior_point(*disc, rng);
    const ProjectivePoint px(disc->chart().from_chart(x)), py(disc->chart().from_chart(y));
    const double d0 = hilbert_distance(*disc, px, py);
    const double d1 = hilbert_distance(mapped, g.apply(px), g.apply(py));
    CHECK(d1 == doctest::Approx(d0).epsilon(1e-9));
  }
}

TEST_CASE("domain monotonicity: smaller domain, larger distance") {
  auto disc = EllipsoidDomain::unit_ball(2);
  const double e2l = std::exp(-0.6);
  Mat q(3, 3);
  Vec w(3);
  w << -1.0, 0.0, 1.0;
  q = w * w.transpose();
  q(0, 0) += e2l;
  q(1, 1) += e2l;
  q(2, 2) -= e2l;
  EllipsoidDomain horo(q, AffineChart::standard(2),
                       ProjectivePoint(disc->chart().from_chart(c2(0.9, 0.0))));
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const CVec x = interior_point(horo, rng), y = interior_point(horo, rng);
    const double d_small = hilbert_distance_chart(horo, x, y);
    const double d_big = hilbert_distance_chart(*disc, x, y);
    CHECK(d_small >= d_big - 1e-9);
  }
}

TEST_CASE("finsler norm: hand values, symmetry, finite-difference consistency") {
  auto disc = EllipsoidDomain::unit_ball(2);
  CHECK(finsler_norm_chart(*disc, c2(0, 0), c2(0.7, 0)) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(finsler_norm_chart(*disc, c2(0.5, 0), c2(1, 0)) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  PNormBallDomain pball(4.0, CMat(), 2);

  std::mt19937_64 rng(43);
  std::normal_distribution<double> gauss;
  const ConvexDomain* doms[2] = {disc.get(), &pball};
  for (const ConvexDomain* dom : doms) {
    for (int trial = 0; trial < 50; ++trial) {
      const CVec x = interior_point(*dom, rng, 0.8);
      CVec v = c2(gauss(rng), gauss(rng));
      if (v.norm() < 0.1) continue;
      const double f = finsler_norm_chart(*dom, x, v);
      CHECK(finsler_norm_chart(*dom, x, CVec(-v)) == doctest::Approx(f).epsilon(1e-12));
      // Homogeneity.
      CHECK(finsler_norm_chart(*dom, x, CVec(2.5 * v)) == doctest::Approx(2.5 * f).epsilon(1e-12));
      // Symmetric finite difference of the distance.
      const double t = tol().finsler_fd_step;
      const double fd = (hilbert_distance_chart(*dom, x, CVec(x + t * v)) +
                         hilbert_distance_chart(*dom, x, CVec(x - t * v))) /
                        (2.0 * t);
      CHECK(std::abs(fd - f) <= tol().finsler_fd * std::max(1.0, f));
    }
  }
}

TEST_CASE("geodesic points: additivity and the arctanh example") {
  auto disc = EllipsoidDomain::unit_ball(2);
  const ProjectivePoint o = disc->basepoint();
  const BoundaryPoint e1 = make_boundary_point(*disc, ProjectivePoint(disc->chart().from_chart(c2(1, 0))));
  CHECK(geodesic_point(*disc, o, e1, 0.0) == o);
  const ProjectivePoint p = geodesic_point(*disc, o, e1, std::atanh(0.5));
  CHECK(disc->chart().to_chart(p)[0] == doctest::Approx(0.5).epsilon(1e-12));

  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> s_dist(0.0, 8.0);
  for (int trial = 0; trial < 40; ++trial) {
    const CVec x = interior_point(*disc, rng);
    const ProjectivePoint px(disc->chart().from_chart(x));
    const double s = s_dist(rng);
    const ProjectivePoint y = geodesic_point(*disc, px, e1, s);
    CHECK(hilbert_distance(*disc, px, y) == doctest::Approx(s).epsilon(1e-9));
  }
}

TEST_CASE("busemann: center value, closed-form match, Lipschitz, convexity") {
  auto disc = EllipsoidDomain::unit_ball(2);
  const ProjectivePoint o = disc->basepoint();
  const BoundaryPoint e1 =
      make_boundary_point(*disc, ProjectivePoint(disc->chart().from_chart(c2(1, 0))));

  CHECK(busemann(*disc, o, e1, o).value == 0.0);

  const BusemannValue at_half = busemann(*disc, o, e1, ProjectivePoint(disc->chart().from_chart(c2(0.5, 0))));
  CHECK(at_half.value == doctest::Approx(-std::atanh(0.5)).epsilon(1e-8));

  // Closed form in the Klein model: B(y) = log((1 - y.u)/sqrt(1-|y|^2)).
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 60; ++trial) {
    const CVec y = interior_point(*disc, rng);
    const double closed = std::log((1.0 - y[0]) / std::sqrt(1.0 - y.squaredNorm()));
    const BusemannValue bv = busemann(*disc, o, e1, ProjectivePoint(disc->chart().from_chart(y)));
    CHECK(bv.value == doctest::Approx(closed).epsilon(1e-8));

    const CVec y2 = interior_point(*disc, rng);
    const BusemannValue bv2 = busemann(*disc, o, e1, ProjectivePoint(disc->chart().from_chart(y2)));
    const double d = hilbert_distance_chart(*disc, y, y2);
    CHECK(std::abs(bv.value - bv2.value) <= d + 1e-8);

    // Convexity along geodesics, evaluated at the arc-length midpoint.
    if (d > 1e-6) {
      const ProjectivePoint py(disc->chart().from_chart(y));
      const Chord ch = disc->chord_through(py, ProjectivePoint(disc->chart().from_chart(y2)));
      const ProjectivePoint mid =
          geodesic_point(*disc, py, make_boundary_point(*disc, ch.b,
                                                        BoundaryPoint::Provenance::chord_endpoint),
                         0.5 * d);
      const BusemannValue bm = busemann(*disc, o, e1, mid);
      CHECK(bm.value <= 0.5 * (bv.value + bv2.value) + 1e-8);
    }
  }
}

TEST_CASE("horoball membership is a busemann sublevel and is convex on samples") {
  auto disc = EllipsoidDomain::unit_ball(2);
  const BoundaryPoint e1 =
      make_boundary_point(*disc, ProjectivePoint(disc->chart().from_chart(c2(1, 0))));
  Horoball hb{e1, disc->basepoint(), -0.4};
  std::mt19937_64 rng(59);
  int tested = 0;
  for (int trial = 0; trial < 200 && tested < 40; ++trial) {
    const CVec a = interior_point(*disc, rng), b = interior_point(*disc, rng);
    const ProjectivePoint pa(disc->chart().from_chart(a)), pb(disc->chart().from_chart(b));
    if (!hb.contains(*disc, pa) || !hb.contains(*disc, pb)) continue;
    ++tested;
    const CVec mid = 0.5 * (a + b);
    CHECK(hb.contains(*disc, ProjectivePoint(disc->chart().from_chart(mid))));
  }
  CHECK(tested > 0);
}
