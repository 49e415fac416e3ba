#include <cmath>
#include <random>

#include "doctest.h"
#include "hilbert/hyperbolic.hpp"
#include "hilbert/metric.hpp"

using namespace hilbert;

namespace {

CVec c2(double a, double b) {
  CVec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("hyperboloid basics: klein round trip, distance, tangent basis") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unif(-0.7, 0.7);
  for (int trial = 0; trial < 40; ++trial) {
    const CVec k = c2(unif(rng), unif(rng));
    const HyperbolicPoint y = HyperbolicPoint::from_klein(k);
    CHECK(minkowski(y.x, y.x) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK((y.klein() - k).norm() < 1e-12);

    const Mat basis = tangent_basis(y);
    for (int i = 0; i < 2; ++i) {
      CHECK(minkowski(basis.col(i), y.x) == doctest::Approx(0.0).epsilon(1e-10));
      for (int j = 0; j < 2; ++j) {
        CHECK(minkowski(basis.col(i), basis.col(j)) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
      }
    }
  }

  // Klein distance of 0.5 e1 from the origin.
  const HyperbolicPoint o = HyperbolicPoint::origin(2);
  CHECK(hyp_distance(o, HyperbolicPoint::from_klein(c2(0.5, 0))) ==
        doctest::Approx(std::atanh(0.5)).epsilon(1e-12));
}

TEST_CASE("hyperbolic busemann: ray values and agreement with the Hilbert path") {
  const HyperbolicPoint o = HyperbolicPoint::origin(2);
  const IdealPoint xi = IdealPoint::from_klein_dir(c2(1, 0));
  CHECK(busemann_hyperbolic(o, xi, o) == doctest::Approx(0.0));

  // Along the ray toward xi the value is exactly -s.
  const Vec v = unit_toward(o, xi);
  for (double s : {0.3, 1.0, 2.5, 7.0}) {
    const HyperbolicPoint y = geodesic(o, v, s);
    CHECK(busemann_hyperbolic(o, xi, y) == doctest::Approx(-s).epsilon(1e-9));
  }

  // Two independent code paths: hyperboloid closed form vs Hilbert metric
  // finite-t extrapolation on the unit disc.
  auto disc = EllipsoidDomain::unit_ball(2);
  const BoundaryPoint bxi =
      make_boundary_point(*disc, ProjectivePoint(disc->chart().from_chart(c2(1, 0))));
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> unif(-0.6, 0.6);
  for (int trial = 0; trial < 30; ++trial) {
    const CVec k = c2(unif(rng), unif(rng));
    const double closed = busemann_hyperbolic(o, xi, HyperbolicPoint::from_klein(k));
    const BusemannValue bv =
        busemann(*disc, disc->basepoint(), bxi, ProjectivePoint(disc->chart().from_chart(k)));
    CHECK(bv.value == doctest::Approx(closed).epsilon(1e-6));
  }
}

TEST_CASE("unit_toward is the busemann gradient direction") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> unif(-0.6, 0.6);
  const HyperbolicPoint o = HyperbolicPoint::origin(2);
  for (int trial = 0; trial < 20; ++trial) {
    const HyperbolicPoint y = HyperbolicPoint::from_klein(c2(unif(rng), unif(rng)));
    const IdealPoint xi = IdealPoint::from_klein_dir(c2(std::cos(trial), std::sin(trial)));
    const Vec v = unit_toward(y, xi);
    CHECK(minkowski(v, v) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(minkowski(v, y.x) == doctest::Approx(0.0).epsilon(1e-10));
    // Central difference of B along exp_y(t v) should be -1 (steepest descent).
    const double h = 1e-6;
    const double bp = busemann_hyperbolic(o, xi, geodesic(y, v, h));
    const double bm = busemann_hyperbolic(o, xi, geodesic(y, v, -h));
    CHECK((bp - bm) / (2 * h) == doctest::Approx(-1.0).epsilon(1e-6));
  }
}

TEST_CASE("halfspaces: side tests, distance, offsets") {
  const HalfspaceAtInfinity h = HalfspaceAtInfinity::from_chart(c2(1, 0), 0.3);
  CHECK(h.contains(HyperbolicPoint::from_klein(c2(0.0, 0.0))));
  CHECK_FALSE(h.contains(HyperbolicPoint::from_klein(c2(0.8, 0.0))));
  CHECK(h.cap_contains(IdealPoint::from_klein_dir(c2(-1, 0))));
  CHECK_FALSE(h.cap_contains(IdealPoint::from_klein_dir(c2(1, 0))));

  // Distance: point on the normal geodesic at parameter t beyond the wall.
  const HyperbolicPoint y = HyperbolicPoint::from_klein(c2(0.9, 0.0));
  const double d = h.distance(y);
  CHECK(d > 0.0);
  // The grown halfspace absorbs y once the offset exceeds d.
  CHECK(h.offset(d + 0.01).contains(y));
  CHECK_FALSE(h.offset(d - 0.01).contains(y));

  // neighborhood_cover contains points within the radius.
  const auto cover = h.neighborhood_cover(0.5);
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> unif(-0.95, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    CVec k = c2(unif(rng), unif(rng));
    if (k.squaredNorm() >= 0.95) continue;
    const HyperbolicPoint p = HyperbolicPoint::from_klein(k);
    if (h.distance(p) <= 0.5) CHECK(cover.contains(p));
  }
}

TEST_CASE("random isometries preserve the form and the distance") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> unif(-0.6, 0.6);
  for (int trial = 0; trial < 15; ++trial) {
    const Mat g = random_isometry(3, 1000 + trial);
    CHECK(is_isometry(g));
    const HyperbolicPoint a = HyperbolicPoint::from_klein(
        (CVec(3) << unif(rng), unif(rng), unif(rng)).finished());
    const HyperbolicPoint b = HyperbolicPoint::from_klein(
        (CVec(3) << unif(rng), unif(rng), unif(rng)).finished());
    const HyperbolicPoint ga = HyperbolicPoint::from_vector(Vec(g * a.x));
    const HyperbolicPoint gb = HyperbolicPoint::from_vector(Vec(g * b.x));
    CHECK(hyp_distance(ga, gb) == doctest::Approx(hyp_distance(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("sphere area and ball volume constants") {
  CHECK(sphere_area(2) == doctest::Approx(2 * M_PI));
  CHECK(sphere_area(3) == doctest::Approx(4 * M_PI));
  CHECK(unit_ball_volume(2) == doctest::Approx(M_PI));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0));
}
