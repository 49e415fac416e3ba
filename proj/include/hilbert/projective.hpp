#pragma once

#include <optional>
#include <vector>

#include "hilbert/base.hpp"

namespace hilbert {

/// Point of RP^n stored canonically: unit Euclidean norm, first entry of
/// magnitude above the zero threshold is positive.
class ProjectivePoint {
 public:
  ProjectivePoint() = default;
  explicit ProjectivePoint(const Vec& homogeneous);

  const Vec& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()) - 1; }

  bool approx_equal(const ProjectivePoint& other, double tolerance = tol().point_eq) const;
  bool operator==(const ProjectivePoint& other) const { return approx_equal(other); }

 private:
  Vec coords_;
};

/// Invertible projective map, matrix scaled to unit Frobenius norm.
class ProjectiveMap {
 public:
  ProjectiveMap() = default;
  explicit ProjectiveMap(const Mat& matrix);

  static ProjectiveMap identity(int n);

  const Mat& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()) - 1; }

  ProjectivePoint apply(const ProjectivePoint& p) const;
  ProjectiveMap compose(const ProjectiveMap& rhs) const;  // this after rhs
  ProjectiveMap inverse() const;

 private:
  Mat matrix_;
};

inline ProjectivePoint apply_map(const ProjectiveMap& g, const ProjectivePoint& p) {
  return g.apply(p);
}

/// Affine chart {x : ell(x) = 1} identified with R^n through a fixed basis.
/// The default chart divides by the last homogeneous coordinate and keeps
/// the first n entries.
class AffineChart {
 public:
  AffineChart() = default;
  explicit AffineChart(const Vec& functional);

  static AffineChart standard(int n);

  const Vec& functional() const { return ell_; }
  int dim() const { return static_cast<int>(ell_.size()) - 1; }

  bool covers(const Vec& homogeneous) const;
  CVec to_chart(const Vec& homogeneous) const;
  CVec to_chart(const ProjectivePoint& p) const { return to_chart(p.coords()); }
  Vec from_chart(const CVec& c) const;
  ProjectivePoint point(const CVec& c) const { return ProjectivePoint(from_chart(c)); }

  // Derivative of the chart action c -> chart(g . unchart(c)).
  CMat map_differential(const ProjectiveMap& g, const CVec& c) const;
  CVec map_point(const ProjectiveMap& g, const CVec& c) const;

 private:
  Vec ell_;
  Mat basis_;   // (n+1) x n, columns span ker(ell) complement used as axes
  Vec origin_;  // point with ell = 1, basis coords 0
};

double cross_ratio(const ProjectivePoint& a, const ProjectivePoint& x,
                   const ProjectivePoint& y, const ProjectivePoint& b);

}  // namespace hilbert
