#pragma once

#include "hilbert/projective.hpp"

namespace hilbert {

// Hyperboloid model of H^n in R^{n,1} with the time coordinate last:
// <x,y> = sum_i x_i y_i - x_n y_n, points satisfy <x,x> = -1, x_n > 0.
// The Klein ball chart divides by the time coordinate.

double minkowski(const Vec& a, const Vec& b);

struct HyperbolicPoint {
  Vec x;

  int dim() const { return static_cast<int>(x.size()) - 1; }
  CVec klein() const;

  static HyperbolicPoint from_klein(const CVec& k);
  static HyperbolicPoint from_vector(const Vec& v);  // normalizes a timelike vector
  static HyperbolicPoint origin(int n);
};

double hyp_distance(const HyperbolicPoint& a, const HyperbolicPoint& b);

/// Boundary direction: future null vector normalized to time coordinate 1,
/// so the spatial part is the Klein-sphere unit vector.
struct IdealPoint {
  Vec xi;

  CVec klein_dir() const { return xi.head(xi.size() - 1); }
  static IdealPoint from_klein_dir(const CVec& u);
  static IdealPoint from_vector(const Vec& v);  // normalizes a null vector
};

/// Unit tangent at y pointing toward the ideal point.
Vec unit_toward(const HyperbolicPoint& y, const IdealPoint& xi);

/// exp_y(s * v) for unit tangent v.
HyperbolicPoint geodesic(const HyperbolicPoint& y, const Vec& v, double s);

/// Ideal endpoint of the ray exp_y(s v), s -> infinity.
IdealPoint ray_endpoint(const HyperbolicPoint& y, const Vec& v);

/// B_{o,xi}(y) = log( -<y,xi> / -<o,xi> ); gradient -unit_toward(y,xi).
double busemann_hyperbolic(const HyperbolicPoint& o, const IdealPoint& xi,
                           const HyperbolicPoint& y);

/// Closed halfspace {x : <x,w> <= 0} for a spacelike unit normal w.
struct HalfspaceAtInfinity {
  Vec w;

  int dim() const { return static_cast<int>(w.size()) - 1; }
  // Chart-linear description a.k <= c with (a, c) = (w_space, w_time).
  bool contains(const HyperbolicPoint& y) const { return minkowski(y.x, w) <= 0.0; }
  bool cap_contains(const IdealPoint& xi) const { return minkowski(xi.xi, w) <= 0.0; }
  // Homogeneous side test used for measure atoms (closed convention).
  bool cap_contains_homogeneous(const Vec& p) const;
  double distance(const HyperbolicPoint& y) const;  // 0 inside
  Vec unit_toward_halfspace(const HyperbolicPoint& y) const;  // for exterior y

  static HalfspaceAtInfinity from_chart(const CVec& a, double c);
  /// Halfspace with the boundary hyperplane translated by d along its normal
  /// flow; positive d grows the halfspace.
  HalfspaceAtInfinity offset(double d) const;
  /// Halfspace containing the hyperbolic radius-neighborhood of this one.
  HalfspaceAtInfinity neighborhood_cover(double radius) const;
};

/// Minkowski orthonormal tangent basis at y (n spacelike columns).
Mat tangent_basis(const HyperbolicPoint& y);

/// Hyperbolic volume density against Lebesgue measure of the Klein chart.
double klein_volume_density(const CVec& k);

// Isometries (O(n,1) matrices) -----------------------------------------------

bool is_isometry(const Mat& m, double tolerance = 1e-9);

Mat boost_x1(int n, double length);          // translation along the x1 axis
Mat rotation_xy(int n, int i, int j, double angle);
/// Random orientation-and-time preserving isometry.
Mat random_isometry(int n, uint64_t seed, double translation_scale = 1.0);

/// Surface area of the round unit (n-1)-sphere.
double sphere_area(int n);
/// Volume of the Euclidean unit n-ball.
double unit_ball_volume(int n);

}  // namespace hilbert
