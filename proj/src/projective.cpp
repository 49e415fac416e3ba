#include "hilbert/projective.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace hilbert {

namespace {
constexpr double kZeroEntry = 1e-12;  // entries below this count as zero after unit scaling
}

ProjectivePoint::ProjectivePoint(const Vec& homogeneous) {
  const double norm = homogeneous.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidPoint("homogeneous vector must be nonzero and finite");
  }
  if (homogeneous.size() > kMaxDim + 1 || homogeneous.size() < 2) {
    throw InvalidPoint("unsupported dimension");
  }
  coords_ = homogeneous / norm;
  for (int i = 0; i < coords_.size(); ++i) {
    if (std::abs(coords_[i]) > kZeroEntry) {
      if (coords_[i] < 0.0) coords_ = -coords_;
      break;
    }
  }
}

bool ProjectivePoint::approx_equal(const ProjectivePoint& other, double tolerance) const {
  if (coords_.size() != other.coords_.size()) return false;
  // Canonical forms agree up to the sign flip ambiguity near a zero leading entry.
  const double d1 = (coords_ - other.coords_).norm();
  const double d2 = (coords_ + other.coords_).norm();
  return std::min(d1, d2) <= tolerance;
}

ProjectiveMap::ProjectiveMap(const Mat& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 2 || matrix.rows() > kMaxDim + 1) {
    throw InvalidMap("matrix must be square, size 2..kMaxDim+1");
  }
  const double f = matrix.norm();
  if (!(f > 0.0) || !std::isfinite(f)) throw InvalidMap("matrix must be nonzero and finite");
  matrix_ = matrix / f;
  const double det = matrix_.determinant();
  if (std::abs(det) <= tol().map_det_min) throw InvalidMap("matrix is numerically singular");
}

ProjectiveMap ProjectiveMap::identity(int n) {
  return ProjectiveMap(Mat::Identity(n + 1, n + 1));
}

ProjectivePoint ProjectiveMap::apply(const ProjectivePoint& p) const {
  return ProjectivePoint(Vec(matrix_ * p.coords()));
}

ProjectiveMap ProjectiveMap::compose(const ProjectiveMap& rhs) const {
  return ProjectiveMap(Mat(matrix_ * rhs.matrix_));
}

ProjectiveMap ProjectiveMap::inverse() const {
  return ProjectiveMap(Mat(matrix_.inverse()));
}

AffineChart::AffineChart(const Vec& functional) {
  const double norm = functional.norm();
  if (!(norm > 0.0)) throw InvalidMap("chart functional must be nonzero");
  ell_ = functional / norm;
  const int n1 = static_cast<int>(ell_.size());

  // Last-coordinate functional keeps the literal "first n coordinates" chart.
  Vec en = Vec::Zero(n1);
  en[n1 - 1] = 1.0;
  if ((ell_ - en).norm() < 1e-14) {
    basis_ = Mat::Zero(n1, n1 - 1);
    basis_.topLeftCorner(n1 - 1, n1 - 1).setIdentity();
    origin_ = en;
    return;
  }
  // General functional: orthonormal completion of ell.
  Eigen::JacobiSVD<Mat> svd(ell_.transpose(), Eigen::ComputeFullV);
  basis_ = svd.matrixV().rightCols(n1 - 1);
  origin_ = ell_;  // ell(ell) = 1 after unit scaling
}

AffineChart AffineChart::standard(int n) {
  Vec ell = Vec::Zero(n + 1);
  ell[n] = 1.0;
  return AffineChart(ell);
}

bool AffineChart::covers(const Vec& homogeneous) const {
  return std::abs(ell_.dot(homogeneous)) > 1e-13 * homogeneous.norm();
}

CVec AffineChart::to_chart(const Vec& homogeneous) const {
  const double s = ell_.dot(homogeneous);
  if (std::abs(s) <= 1e-300 * homogeneous.norm()) {
    throw DegenerateChord("point at infinity of the chart");
  }
  Vec affine = homogeneous / s;
  return basis_.transpose() * (affine - origin_);
}

Vec AffineChart::from_chart(const CVec& c) const {
  return origin_ + basis_ * c;
}

CVec AffineChart::map_point(const ProjectiveMap& g, const CVec& c) const {
  return to_chart(Vec(g.matrix() * from_chart(c)));
}

CMat AffineChart::map_differential(const ProjectiveMap& g, const CVec& c) const {
  const Vec p = from_chart(c);
  const Vec w = g.matrix() * p;
  const double s = ell_.dot(w);
  const Mat gb = g.matrix() * basis_;
  // d/dv [ B^T (g(p+Bv) / ell(g(p+Bv))) ]
  CMat d = (basis_.transpose() * gb) / s;
  const CVec img = basis_.transpose() * (w / s - origin_);
  const Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, kMaxDim> row =
      (ell_.transpose() * gb) / s;
  d -= img * row;
  return d;
}

double cross_ratio(const ProjectivePoint& a, const ProjectivePoint& x,
                   const ProjectivePoint& y, const ProjectivePoint& b) {
  if (a == x || b == y) {
    throw DegenerateConfiguration("cross_ratio requires a != x and b != y");
  }
  const int n1 = a.dim() + 1;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, kMaxDim + 1> rows(4, n1);
  rows.row(0) = a.coords().transpose();
  rows.row(1) = x.coords().transpose();
  rows.row(2) = y.coords().transpose();
  rows.row(3) = b.coords().transpose();

  Eigen::JacobiSVD<decltype(rows)> svd(rows, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() > 2 && sv[2] > tol().collinear * sv[0]) {
    throw NonCollinear("points do not lie on a projective line");
  }

  // 2-D homogeneous coordinates in the span; the cross-ratio is a ratio of
  // 2x2 determinants, independent of the chart.
  const Vec e1 = svd.matrixV().col(0);
  const Vec e2 = svd.matrixV().col(1);
  auto proj = [&](const ProjectivePoint& p) {
    return Eigen::Vector2d(e1.dot(p.coords()), e2.dot(p.coords()));
  };
  const Eigen::Vector2d pa = proj(a), px = proj(x), py = proj(y), pb = proj(b);
  auto det2 = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return u[0] * v[1] - u[1] * v[0];
  };
  const double num = det2(pa, py) * det2(pb, px);
  const double den = det2(pa, px) * det2(pb, py);
  if (den == 0.0) throw DegenerateConfiguration("coincident points in cross_ratio");
  return num / den;
}

}  // namespace hilbert
