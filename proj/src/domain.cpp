#include "hilbert/domain.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "hilbert/group.hpp"

namespace hilbert {

bool ConvexDomain::contains(const ProjectivePoint& p) const {
  if (!chart_.covers(p.coords())) return false;
  return margin(chart_.to_chart(p)) > 0.0;
}

double ConvexDomain::boundary_parameter(const CVec& x, const CVec& dir) const {
  // Exponential bracketing, 80 bisection steps, short Newton polish on the
  // 1-D margin. Boundary regularity may be only C^{1+alpha}, so bisection
  // carries the convergence and Newton is a final polish.
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (margin(x + hi * dir) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 60) throw DegenerateChord("no boundary found along the ray");
  }
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (margin(x + mid * dir) > 0.0 ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  const double h = 1e-7 * std::max(1.0, t);
  for (int i = 0; i < 5; ++i) {
    const double m = margin(x + t * dir);
    const double dm = (margin(x + (t + h) * dir) - margin(x + (t - h) * dir)) / (2.0 * h);
    if (dm == 0.0) break;
    const double step = m / dm;
    if (!std::isfinite(step) || std::abs(step) > (hi - lo) + h) break;
    t -= step;
  }
  return std::clamp(t, lo - h, hi + h);
}

Chord ConvexDomain::chord_chart(const CVec& x, const CVec& v) const {
  if (!(margin(x) > 0.0)) throw PointOutsideDomain("chord base point");
  const double vn = v.norm();
  if (!(vn > 0.0)) throw DegenerateChord("zero direction");
  Chord c;
  c.x_chart = x;
  c.dir = v / vn;
  c.t_plus = boundary_parameter(x, c.dir);
  c.t_minus = -boundary_parameter(x, CVec(-c.dir));
  c.a = ProjectivePoint(chart_.from_chart(CVec(x + c.t_minus * c.dir)));
  c.b = ProjectivePoint(chart_.from_chart(CVec(x + c.t_plus * c.dir)));
  return c;
}

Chord ConvexDomain::chord(const ProjectivePoint& x, const CVec& v) const {
  return chord_chart(chart_.to_chart(x), v);
}

Chord ConvexDomain::chord_through(const ProjectivePoint& x, const ProjectivePoint& y) const {
  const CVec cx = chart_.to_chart(x), cy = chart_.to_chart(y);
  return chord_chart(cx, CVec(cy - cx));
}

// ---------------------------------------------------------------------------

EllipsoidDomain::EllipsoidDomain(const Mat& quadratic_form, const AffineChart& chart,
                                 const ProjectivePoint& basepoint) {
  chart_ = chart;
  basepoint_ = basepoint;
  Mat q = 0.5 * (quadratic_form + quadratic_form.transpose());
  q /= q.norm();
  const double at_base = basepoint.coords().dot(q * basepoint.coords());
  if (at_base == 0.0) throw InvalidPoint("basepoint lies on the quadric");
  if (at_base > 0.0) q = -q;
  q_ = q;

  Eigen::SelfAdjointEigenSolver<Mat> es(q_);
  int negatives = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] < 0) ++negatives;
    if (std::abs(es.eigenvalues()[i]) < 1e-12) throw InvalidMap("degenerate quadratic form");
  }
  if (negatives != 1) throw InvalidMap("quadratic form must have signature (1,n)");

  // Chart-restricted quadratic coefficients; the chart block must be
  // positive definite for the domain to be bounded there.
  const int n = dim();
  const Vec origin = chart_.from_chart(CVec(CVec::Zero(n)));
  Mat lift(n + 1, n);
  for (int j = 0; j < n; ++j) {
    CVec e = CVec::Zero(n);
    e[j] = 1.0;
    lift.col(j) = chart_.from_chart(e) - origin;
  }
  qa_ = CMat(lift.transpose() * q_ * lift);
  qb_ = CVec(lift.transpose() * (q_ * origin));
  qc_ = origin.dot(q_ * origin);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bs{Eigen::MatrixXd(qa_)};
  if (bs.eigenvalues().minCoeff() <= 0) {
    throw InvalidMap("ellipsoid is not bounded in the given chart");
  }
  if (!(margin(chart_.to_chart(basepoint)) > 0.0)) {
    throw InvalidPoint("basepoint is not interior");
  }
}

std::shared_ptr<EllipsoidDomain> EllipsoidDomain::unit_ball(int n) {
  Mat q = Mat::Identity(n + 1, n + 1);
  q(n, n) = -1.0;
  Vec origin = Vec::Zero(n + 1);
  origin[n] = 1.0;
  return std::make_shared<EllipsoidDomain>(q, AffineChart::standard(n),
                                           ProjectivePoint(origin));
}

double EllipsoidDomain::margin(const CVec& c) const {
  return -(c.dot(qa_ * c) + 2.0 * qb_.dot(c) + qc_);
}

std::pair<double, double> EllipsoidDomain::chord_params(const CVec& x, const CVec& dir) const {
  const CVec ad = qa_ * dir;
  const double A = dir.dot(ad);
  const double B = 2.0 * (x.dot(ad) + qb_.dot(dir));
  const double C = x.dot(qa_ * x) + 2.0 * qb_.dot(x) + qc_;  // < 0 inside
  if (!(A > 0.0)) throw DegenerateChord("direction does not exit the ellipsoid");
  const double sq = std::sqrt(B * B - 4.0 * A * C);
  // Stable quadratic roots; C < 0 guarantees one of each sign.
  if (B > 0.0) {
    return {-(B + sq) / (2.0 * A), (-2.0 * C) / (B + sq)};
  }
  return {(2.0 * C) / (sq - B), (sq - B) / (2.0 * A)};
}

double EllipsoidDomain::boundary_parameter(const CVec& x, const CVec& dir) const {
  return chord_params(x, dir).second;  // the quadratic is exact at any scale
}

ProjectiveMap EllipsoidDomain::normalizing_map() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(q_);
  const int n1 = static_cast<int>(q_.rows());
  // Ascending eigenvalues: index 0 is the negative one.
  Mat w(n1, n1);
  for (int i = 1; i < n1; ++i) {
    w.row(i - 1) = std::sqrt(es.eigenvalues()[i]) * es.eigenvectors().col(i).transpose();
  }
  w.row(n1 - 1) = std::sqrt(-es.eigenvalues()[0]) * es.eigenvectors().col(0).transpose();
  return ProjectiveMap(w);
}

double EllipsoidDomain::klein_distance(const ProjectivePoint& x, const ProjectivePoint& y) const {
  const double qxx = x.coords().dot(q_ * x.coords());
  const double qyy = y.coords().dot(q_ * y.coords());
  const double qxy = x.coords().dot(q_ * y.coords());
  if (!(qxx < 0.0) || !(qyy < 0.0)) throw PointOutsideDomain("klein_distance");
  const double c = std::abs(qxy) / std::sqrt(qxx * qyy);
  return std::acosh(std::max(1.0, c));
}

EllipsoidDomain EllipsoidDomain::transformed(const ProjectiveMap& g) const {
  const Mat gi = g.inverse().matrix();
  Mat q2 = gi.transpose() * q_ * gi;
  Vec ell2 = gi.transpose() * chart_.functional();
  return EllipsoidDomain(q2, AffineChart(ell2), g.apply(basepoint_));
}

// ---------------------------------------------------------------------------

PNormBallDomain::PNormBallDomain(double p, const CMat& frame, int n) {
  if (!(p > 1.0)) throw InvalidMap("pball exponent must exceed 1");
  p_ = p;
  chart_ = AffineChart::standard(n);
  Vec origin = Vec::Zero(n + 1);
  origin[n] = 1.0;
  basepoint_ = ProjectivePoint(origin);
  CMat f = frame.size() == 0 ? CMat(CMat::Identity(n, n)) : frame;
  if (f.rows() != n || f.cols() != n) throw InvalidMap("frame must be n x n");
  frame_inv_ = f.inverse();
  if (!frame_inv_.allFinite()) throw InvalidMap("frame is singular");
}

double PNormBallDomain::margin(const CVec& c) const {
  const CVec u = frame_inv_ * c;
  double s = 0.0;
  for (int i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]), p_);
  return 1.0 - std::pow(s, 1.0 / p_);
}

// ---------------------------------------------------------------------------

namespace {

// Monotone chain hull of 2-D points, CCW without repeated endpoint.
std::vector<CVec> hull_2d(std::vector<CVec> pts) {
  std::sort(pts.begin(), pts.end(), [](const CVec& a, const CVec& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const CVec& a, const CVec& b) { return (a - b).norm() < 1e-13; }),
            pts.end());
  const auto cross = [](const CVec& o, const CVec& a, const CVec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  if (pts.size() < 3) throw InvalidMap("orbit hull needs at least 3 points");
  std::vector<CVec> h(2 * pts.size());
  size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  const size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
    while (k >= lower && cross(h[k - 2], h[k - 1], *it) <= 0) --k;
    h[k++] = *it;
  }
  h.resize(k - 1);
  return h;
}

}  // namespace

OrbitHullDomain::OrbitHullDomain(const ProjectiveGroup& group, const ProjectivePoint& seed,
                                 int depth, const AffineChart& chart) {
  if (chart.dim() != 2) throw NotSupported("orbit hulls are implemented for n = 2 only");
  chart_ = chart;
  approximation_ = true;
  depth_ = depth;

  std::vector<CVec> pts;
  for (const auto& p : group.orbit_points(seed, depth)) {
    if (!chart_.covers(p.coords())) throw DegenerateChord("orbit point outside the chart");
    CVec c = chart_.to_chart(p);
    if (c.norm() > 1e6) throw InvalidMap("orbit point unbounded in the chart");
    pts.push_back(c);
  }
  vertices_ = hull_2d(std::move(pts));

  centroid_ = CVec::Zero(2);
  for (const auto& v : vertices_) centroid_ += v;
  centroid_ /= static_cast<double>(vertices_.size());

  const size_t m = vertices_.size();
  normals_.reserve(m);
  offsets_.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    const CVec& v0 = vertices_[i];
    const CVec& v1 = vertices_[(i + 1) % m];
    CVec e = v1 - v0;
    CVec nrm(2);
    nrm << e[1], -e[0];  // outward for CCW
    nrm /= nrm.norm();
    normals_.push_back(nrm);
    offsets_.push_back(nrm.dot(v0));
  }
  basepoint_ = ProjectivePoint(chart_.from_chart(centroid_));
  if (!(margin(centroid_) > 0.0)) throw InvalidMap("degenerate orbit hull");
}

double OrbitHullDomain::margin(const CVec& c) const {
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < normals_.size(); ++i) {
    m = std::min(m, offsets_[i] - normals_[i].dot(c));
  }
  return m;
}

double OrbitHullDomain::boundary_parameter(const CVec& x, const CVec& dir) const {
  // Exact ray-polygon exit: nearest crossing among outgoing edge lines.
  double t = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < normals_.size(); ++i) {
    const double dn = normals_[i].dot(dir);
    if (dn > 1e-300) {
      t = std::min(t, (offsets_[i] - normals_[i].dot(x)) / dn);
    }
  }
  if (!std::isfinite(t)) throw DegenerateChord("ray does not exit the hull");
  return std::max(t, 0.0);
}

std::pair<double, double> OrbitHullDomain::chord_params(const CVec& x, const CVec& dir) const {
  double tp = std::numeric_limits<double>::infinity();
  double tm = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < normals_.size(); ++i) {
    const double dn = normals_[i].dot(dir);
    if (dn == 0.0) continue;
    const double c = (offsets_[i] - normals_[i].dot(x)) / dn;
    if (dn > 0.0) {
      tp = std::min(tp, c);
    } else {
      tm = std::max(tm, c);
    }
  }
  if (!std::isfinite(tp) || !std::isfinite(tm)) {
    throw DegenerateChord("ray does not exit the hull");
  }
  return {std::min(tm, 0.0), std::max(tp, 0.0)};
}

// ---------------------------------------------------------------------------

TransformedDomain::TransformedDomain(std::shared_ptr<const ConvexDomain> inner,
                                     const ProjectiveMap& g)
    : inner_(std::move(inner)), g_inv_(g.inverse()) {
  Vec ell2 = g_inv_.matrix().transpose() * inner_->chart().functional();
  chart_ = AffineChart(ell2);
  basepoint_ = g.apply(inner_->basepoint());
  approximation_ = inner_->approximation();
}

double TransformedDomain::margin(const CVec& c) const {
  const Vec p = g_inv_.matrix() * chart_.from_chart(c);
  if (!inner_->chart().covers(p)) return -1.0;
  return inner_->margin(inner_->chart().to_chart(p));
}

}  // namespace hilbert
