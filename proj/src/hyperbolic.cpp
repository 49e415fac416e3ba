#include "hilbert/hyperbolic.hpp"

#include <cmath>
#include <random>

namespace hilbert {

double minkowski(const Vec& a, const Vec& b) {
  const int n = static_cast<int>(a.size()) - 1;
  return a.head(n).dot(b.head(n)) - a[n] * b[n];
}

CVec HyperbolicPoint::klein() const {
  const int n = dim();
  return x.head(n) / x[n];
}

HyperbolicPoint HyperbolicPoint::from_klein(const CVec& k) {
  const double r2 = k.squaredNorm();
  if (!(r2 < 1.0)) throw PointOutsideDomain("Klein coordinates outside the unit ball");
  const int n = static_cast<int>(k.size());
  Vec x(n + 1);
  x.head(n) = k;
  x[n] = 1.0;
  x /= std::sqrt(1.0 - r2);
  return HyperbolicPoint{x};
}

HyperbolicPoint HyperbolicPoint::from_vector(const Vec& v) {
  const double m = minkowski(v, v);
  if (!(m < 0.0)) throw InvalidPoint("vector is not timelike");
  Vec x = v / std::sqrt(-m);
  if (x[x.size() - 1] < 0.0) x = -x;
  return HyperbolicPoint{x};
}

HyperbolicPoint HyperbolicPoint::origin(int n) {
  Vec x = Vec::Zero(n + 1);
  x[n] = 1.0;
  return HyperbolicPoint{x};
}

double hyp_distance(const HyperbolicPoint& a, const HyperbolicPoint& b) {
  // 2 asinh(|a-b|/2) in the Minkowski norm; the difference-based form has no
  // cancellation floor for nearby points, unlike acosh(-<a,b>).
  const Vec d = a.x - b.x;
  return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, minkowski(d, d))));
}

IdealPoint IdealPoint::from_klein_dir(const CVec& u) {
  const int n = static_cast<int>(u.size());
  Vec xi(n + 1);
  xi.head(n) = u / u.norm();
  xi[n] = 1.0;
  return IdealPoint{xi};
}

IdealPoint IdealPoint::from_vector(const Vec& v) {
  const int n = static_cast<int>(v.size()) - 1;
  if (std::abs(minkowski(v, v)) > 1e-8 * v.squaredNorm()) {
    throw InvalidPoint("vector is not null");
  }
  Vec xi = v / v[n];
  xi.head(n) /= xi.head(n).norm();  // exact Klein-sphere normalization
  xi[n] = 1.0;
  return IdealPoint{xi};
}

Vec unit_toward(const HyperbolicPoint& y, const IdealPoint& xi) {
  const double s = -minkowski(y.x, xi.xi);
  return Vec(xi.xi / s - y.x);
}

HyperbolicPoint geodesic(const HyperbolicPoint& y, const Vec& v, double s) {
  return HyperbolicPoint{Vec(y.x * std::cosh(s) + v * std::sinh(s))};
}

IdealPoint ray_endpoint(const HyperbolicPoint& y, const Vec& v) {
  return IdealPoint::from_vector(Vec(y.x + v));
}

double busemann_hyperbolic(const HyperbolicPoint& o, const IdealPoint& xi,
                           const HyperbolicPoint& y) {
  return std::log(-minkowski(y.x, xi.xi)) - std::log(-minkowski(o.x, xi.xi));
}

bool HalfspaceAtInfinity::cap_contains_homogeneous(const Vec& p) const {
  const double t = p[p.size() - 1];
  const double side = minkowski(p, w);
  return (t >= 0.0 ? side : -side) <= 0.0;
}

double HalfspaceAtInfinity::distance(const HyperbolicPoint& y) const {
  const double s = minkowski(y.x, w);
  return s <= 0.0 ? 0.0 : std::asinh(s);
}

Vec HalfspaceAtInfinity::unit_toward_halfspace(const HyperbolicPoint& y) const {
  const double s = minkowski(y.x, w);
  Vec wt = w + s * y.x;  // tangent component at y
  return Vec(-wt / std::sqrt(1.0 + s * s));
}

HalfspaceAtInfinity HalfspaceAtInfinity::from_chart(const CVec& a, double c) {
  const int n = static_cast<int>(a.size());
  Vec w(n + 1);
  w.head(n) = a;
  w[n] = c;
  const double m = minkowski(w, w);
  if (!(m > 0.0)) throw InvalidMap("halfspace normal must be spacelike");
  return HalfspaceAtInfinity{Vec(w / std::sqrt(m))};
}

HalfspaceAtInfinity HalfspaceAtInfinity::offset(double d) const {
  // Hyperplane translated by d along its normal flow, halfspace grown for
  // d > 0. With p a point of the hyperplane, w' = cosh(d) w + sinh(d) p:
  // for any x, <x,p> <= -1, so <x,w> <= 0 implies <x,w'> <= -sinh(d).
  HyperbolicPoint o = HyperbolicPoint::origin(dim());
  HyperbolicPoint p = HyperbolicPoint::from_vector(Vec(o.x - minkowski(o.x, w) * w));
  Vec w2 = std::cosh(d) * w + std::sinh(d) * p.x;
  return HalfspaceAtInfinity{Vec(w2 / std::sqrt(minkowski(w2, w2)))};
}

HalfspaceAtInfinity HalfspaceAtInfinity::neighborhood_cover(double radius) const {
  // Smallest normal translate containing {x : d(x, H) <= radius}. That set is
  // {<x,w> <= sinh(radius)}, and <x,w'> = cosh(t)<x,w> + sinh(t)<x,p> <= 0
  // holds on it once tanh(t) >= sinh(radius).
  if (!(std::sinh(radius) < 1.0)) {
    throw NotSupported("neighborhood_cover requires radius < arcsinh(1)");
  }
  return offset(std::atanh(std::sinh(radius)) + 1e-9);
}

Mat tangent_basis(const HyperbolicPoint& y) {
  const int n = y.dim();
  Mat basis(n + 1, n);
  // Gram-Schmidt of the coordinate axes against y in the Minkowski form.
  int col = 0;
  for (int i = 0; i <= n && col < n; ++i) {
    Vec e = Vec::Zero(n + 1);
    e[i] = 1.0;
    Vec v = e + minkowski(e, y.x) * y.x;  // project out y
    for (int j = 0; j < col; ++j) {
      v -= minkowski(v, basis.col(j)) * basis.col(j);
    }
    const double nn = minkowski(v, v);
    if (nn > 1e-12) {
      basis.col(col++) = v / std::sqrt(nn);
    }
  }
  if (col != n) throw Error("tangent basis construction failed");
  return basis;
}

double klein_volume_density(const CVec& k) {
  const int n = static_cast<int>(k.size());
  return std::pow(1.0 - k.squaredNorm(), -0.5 * (n + 1));
}

bool is_isometry(const Mat& m, double tolerance) {
  const int n1 = static_cast<int>(m.rows());
  Mat j = Mat::Identity(n1, n1);
  j(n1 - 1, n1 - 1) = -1.0;
  return (m.transpose() * j * m - j).norm() <= tolerance;
}

Mat boost_x1(int n, double length) {
  Mat m = Mat::Identity(n + 1, n + 1);
  m(0, 0) = std::cosh(length);
  m(0, n) = std::sinh(length);
  m(n, 0) = std::sinh(length);
  m(n, n) = std::cosh(length);
  return m;
}

Mat rotation_xy(int n, int i, int j, double angle) {
  Mat m = Mat::Identity(n + 1, n + 1);
  m(i, i) = std::cos(angle);
  m(j, j) = std::cos(angle);
  m(i, j) = -std::sin(angle);
  m(j, i) = std::sin(angle);
  return m;
}

Mat random_isometry(int n, uint64_t seed, double translation_scale) {
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  std::normal_distribution<double> len(0.0, translation_scale);
  Mat m = Mat::Identity(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      m = Mat(m * rotation_xy(n, i, j, ang(rng)));
    }
  }
  m = Mat(m * boost_x1(n, len(rng)));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      m = Mat(m * rotation_xy(n, i, j, ang(rng)));
    }
  }
  return m;
}

double sphere_area(int n) {
  // Area of S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

double unit_ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

}  // namespace hilbert
