#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hilbert/projective.hpp"

namespace hilbert {

/// Two boundary points of the line through x with chart direction v:
/// a is hit in direction -v, b in direction +v. t_minus/t_plus are the
/// signed chart-line parameters of a and b relative to x (t in x + t*v_hat).
struct Chord {
  ProjectivePoint a;
  ProjectivePoint b;
  CVec x_chart;
  CVec dir;  // unit chart direction
  double t_minus = 0.0;
  double t_plus = 0.0;
};

/// Properly convex open domain given by a membership margin and a chord
/// oracle. Margin is positive inside, negative outside, zero on the boundary,
/// with gradient of order one in chart units near the boundary.
class ConvexDomain {
 public:
  virtual ~ConvexDomain() = default;

  virtual std::string kind() const = 0;
  int dim() const { return chart_.dim(); }
  const AffineChart& chart() const { return chart_; }
  const ProjectivePoint& basepoint() const { return basepoint_; }
  bool approximation() const { return approximation_; }

  virtual double margin(const CVec& chart_point) const = 0;

  bool contains(const ProjectivePoint& p) const;
  bool contains_chart(const CVec& c) const { return margin(c) > 0.0; }

  Chord chord(const ProjectivePoint& x, const CVec& v) const;
  Chord chord_chart(const CVec& x, const CVec& v) const;

  // Chord through two interior points (direction y - x).
  Chord chord_through(const ProjectivePoint& x, const ProjectivePoint& y) const;

  // Line parameters only (t_minus, t_plus) for a unit direction; the hot
  // kernels need no boundary points.
  virtual std::pair<double, double> chord_params(const CVec& x, const CVec& unit_dir) const {
    return {-boundary_parameter(x, CVec(-unit_dir)), boundary_parameter(x, unit_dir)};
  }

 protected:
  // Positive root of margin(x + t*dir) = 0 for unit dir, margin(x) > 0.
  // Subclasses with closed forms override; the base implementation brackets
  // exponentially, bisects 80 steps, then polishes with a few Newton steps.
  virtual double boundary_parameter(const CVec& x, const CVec& dir) const;

  AffineChart chart_;
  ProjectivePoint basepoint_;
  bool approximation_ = false;
};

/// Interior of a nondegenerate quadric of signature (1,n) (or (n,1); the
/// stored form is normalized so the interior is the negative cone).
class EllipsoidDomain : public ConvexDomain {
 public:
  EllipsoidDomain(const Mat& quadratic_form, const AffineChart& chart,
                  const ProjectivePoint& basepoint);

  // Unit ball {|c| < 1} in the standard chart of R^n.
  static std::shared_ptr<EllipsoidDomain> unit_ball(int n);

  std::string kind() const override { return "ellipsoid"; }
  double margin(const CVec& c) const override;
  std::pair<double, double> chord_params(const CVec& x, const CVec& unit_dir) const override;

  const Mat& form() const { return q_; }

  // Projective map sending this domain onto the standard unit ball.
  ProjectiveMap normalizing_map() const;

  // Beltrami-Klein hyperbolic distance; the ground-truth anchor for the metric.
  double klein_distance(const ProjectivePoint& x, const ProjectivePoint& y) const;

  EllipsoidDomain transformed(const ProjectiveMap& g) const;

 protected:
  double boundary_parameter(const CVec& x, const CVec& dir) const override;

 private:
  Mat q_;  // interior = {p : p^T q p < 0}
  // Chart-restricted quadratic: q(lift(c)) = c^T A c + 2 b.c + c0.
  CMat qa_;
  CVec qb_;
  double qc_ = 0.0;
};

/// Image of the p-norm unit ball under a linear frame in the chart.
class PNormBallDomain : public ConvexDomain {
 public:
  PNormBallDomain(double p, const CMat& frame, int n);

  std::string kind() const override { return "pball"; }
  double margin(const CVec& c) const override;

  double p() const { return p_; }

 private:
  double p_ = 4.0;
  CMat frame_inv_;
};

class ProjectiveGroup;  // group.hpp

/// Chart-space convex hull of a group orbit; approximates the invariant
/// domain from inside. Only n = 2 hulls are supported.
class OrbitHullDomain : public ConvexDomain {
 public:
  OrbitHullDomain(const ProjectiveGroup& group, const ProjectivePoint& seed,
                  int depth, const AffineChart& chart);

  std::string kind() const override { return "orbit_hull"; }
  double margin(const CVec& c) const override;
  std::pair<double, double> chord_params(const CVec& x, const CVec& unit_dir) const override;

  int depth() const { return depth_; }
  const std::vector<CVec>& vertices() const { return vertices_; }

 protected:
  double boundary_parameter(const CVec& x, const CVec& dir) const override;

 private:
  int depth_ = 0;
  std::vector<CVec> vertices_;   // CCW
  std::vector<CVec> normals_;    // outward unit; inside means n.c <= offset
  std::vector<double> offsets_;
  CVec centroid_;
};

/// Generic image domain g(inner); used by equivariance checks.
class TransformedDomain : public ConvexDomain {
 public:
  TransformedDomain(std::shared_ptr<const ConvexDomain> inner, const ProjectiveMap& g);
  std::string kind() const override { return inner_->kind() + "+map"; }
  double margin(const CVec& c) const override;

 private:
  std::shared_ptr<const ConvexDomain> inner_;
  ProjectiveMap g_inv_;
};

}  // namespace hilbert
