#include "hilbert/metric.hpp"

#include <cmath>

namespace hilbert {

BoundaryPoint make_boundary_point(const ConvexDomain& domain, const ProjectivePoint& p,
                                  BoundaryPoint::Provenance prov) {
  const CVec c = domain.chart().to_chart(p);
  if (std::abs(domain.margin(c)) > tol().boundary_margin) {
    throw InvalidPoint("point is not on the domain boundary");
  }
  return BoundaryPoint{p, prov};
}

double hilbert_distance_chart(const ConvexDomain& domain, const CVec& x, const CVec& y) {
  if (!(domain.margin(x) > 0.0) || !(domain.margin(y) > 0.0)) {
    throw PointOutsideDomain("hilbert_distance");
  }
  const CVec v = y - x;
  const double ty = v.norm();
  if (ty == 0.0) return 0.0;
  const auto [tm, tp] = domain.chord_params(x, CVec(v / ty));
  // d = 1/2 log [a:x:y:b]; the ratio minus one has the closed form below,
  // which stays accurate for nearby points.
  const double cr_m1 = ty * (tp - tm) / ((-tm) * (tp - ty));
  if (!(cr_m1 > -1.0)) throw PointOutsideDomain("second point beyond the boundary");
  return 0.5 * std::log1p(cr_m1);
}

double hilbert_distance(const ConvexDomain& domain, const ProjectivePoint& x,
                        const ProjectivePoint& y) {
  return hilbert_distance_chart(domain, domain.chart().to_chart(x), domain.chart().to_chart(y));
}

double finsler_norm_chart(const ConvexDomain& domain, const CVec& x, const CVec& v) {
  if (!(domain.margin(x) > 0.0)) throw PointOutsideDomain("finsler_norm");
  const double vn = v.norm();
  if (vn == 0.0) return 0.0;
  const auto [tm, tp] = domain.chord_params(x, CVec(v / vn));
  return 0.5 * vn * (1.0 / (-tm) + 1.0 / tp);
}

double finsler_norm(const ConvexDomain& domain, const ProjectivePoint& x, const CVec& v) {
  return finsler_norm_chart(domain, domain.chart().to_chart(x), v);
}

namespace {

struct Ray {
  CVec base;   // chart point
  CVec dir;    // unit, toward the boundary point
  double alpha = 0.0;  // distance backward to the boundary
  double beta = 0.0;   // distance forward to the boundary (the target point)
};

Ray ray_to_boundary(const ConvexDomain& domain, const CVec& from, const ProjectivePoint& xi) {
  const CVec cxi = domain.chart().to_chart(xi);
  CVec w = cxi - from;
  const double wn = w.norm();
  if (wn == 0.0) throw DegenerateConfiguration("boundary point equals the base point");
  const Chord ch = domain.chord_chart(from, w);
  if (std::abs(ch.t_plus - wn) > 1e-6 * (1.0 + wn)) {
    throw InvalidPoint("boundary point is not the forward chord endpoint");
  }
  return Ray{from, w / wn, -ch.t_minus, ch.t_plus};
}

}  // namespace

ProjectivePoint geodesic_point(const ConvexDomain& domain, const ProjectivePoint& x,
                               const BoundaryPoint& xi, double s) {
  const CVec cx = domain.chart().to_chart(x);
  if (!(domain.margin(cx) > 0.0)) throw PointOutsideDomain("geodesic_point");
  if (s == 0.0) return x;
  const Ray r = ray_to_boundary(domain, cx, xi.point);
  // Solve 1/2 log [a:x:c(t):b] = s along the chord; exact in the parameter.
  const double E = std::exp(2.0 * s);
  const double t = r.alpha * r.beta * (E - 1.0) / (r.beta + E * r.alpha);
  return ProjectivePoint(domain.chart().from_chart(CVec(cx + t * r.dir)));
}

BusemannValue busemann(const ConvexDomain& domain, const ProjectivePoint& o,
                       const BoundaryPoint& xi, const ProjectivePoint& y) {
  const CVec co = domain.chart().to_chart(o);
  const CVec cy = domain.chart().to_chart(y);
  if (!(domain.margin(co) > 0.0) || !(domain.margin(cy) > 0.0)) {
    throw PointOutsideDomain("busemann");
  }
  if (y.approx_equal(o)) return {0.0, 0.0};

  const Ray r = ray_to_boundary(domain, co, xi.point);
  const double t0 = tol().busemann_t0, dt = tol().busemann_dt;

  double b[3];
  for (int k = 0; k < 3; ++k) {
    const double t = t0 + k * dt;
    const double E = std::exp(2.0 * t);
    // Distance from the boundary target along the ray; exact, no cancellation.
    const double delta = r.beta * (r.alpha + r.beta) / (r.beta + E * r.alpha);
    const CVec c = co + (r.beta - delta) * r.dir;
    const double d_oc =
        0.5 * std::log(((r.beta - delta + r.alpha) * r.beta) / (r.alpha * delta));

    const CVec u = c - cy;
    const double tc = u.norm();
    const Chord ch = domain.chord_chart(cy, u);
    const double eps = ch.t_plus - tc;
    if (!(eps > 0.0)) throw NonConvergent("ray point reached the boundary numerically");
    const double d_yc =
        0.5 * std::log(((tc - ch.t_minus) * ch.t_plus) / ((-ch.t_minus) * eps));
    b[k] = d_yc - d_oc;
  }

  // Two-stage extrapolation at rates e^{-2t} and e^{-4t}.
  const double q = std::exp(-2.0 * dt);
  const double b12 = (b[1] - q * b[0]) / (1.0 - q);
  const double b23 = (b[2] - q * b[1]) / (1.0 - q);
  const double value = (b23 - q * q * b12) / (1.0 - q * q);
  const double spread = std::max(std::abs(b23 - b12), std::abs(value - b23));
  if (spread > tol().busemann_spread) {
    throw NonConvergent("busemann extrapolation spread " + std::to_string(spread));
  }
  return {value, spread};
}

bool Horoball::contains(const ConvexDomain& domain, const ProjectivePoint& y) const {
  return busemann(domain, basepoint, center, y).value < level;
}

}  // namespace hilbert
