#pragma once

#include "hilbert/domain.hpp"

namespace hilbert {

/// Point on the boundary of a domain, with how it was obtained.
struct BoundaryPoint {
  ProjectivePoint point;
  enum class Provenance { chord_endpoint, orbit_limit, explicit_input };
  Provenance provenance = Provenance::explicit_input;
};

BoundaryPoint make_boundary_point(const ConvexDomain& domain, const ProjectivePoint& p,
                                  BoundaryPoint::Provenance prov = BoundaryPoint::Provenance::explicit_input);

double hilbert_distance(const ConvexDomain& domain, const ProjectivePoint& x,
                        const ProjectivePoint& y);
double hilbert_distance_chart(const ConvexDomain& domain, const CVec& x, const CVec& y);

/// Infinitesimal norm of the Hilbert metric: F(x,v) = |v|/2 (1/|x-a| + 1/|x-b|).
double finsler_norm(const ConvexDomain& domain, const ProjectivePoint& x, const CVec& v);
double finsler_norm_chart(const ConvexDomain& domain, const CVec& x, const CVec& v);

/// Point on the segment [x, xi) at Hilbert distance s from x.
ProjectivePoint geodesic_point(const ConvexDomain& domain, const ProjectivePoint& x,
                               const BoundaryPoint& xi, double s);

struct BusemannValue {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// B_{o,xi}(y), evaluated by finite-t differences along the ray from o to xi
/// with two-stage extrapolation at rates e^{-2t}, e^{-4t}. Throws
/// NonConvergent when the extrapolation spread exceeds the gate.
BusemannValue busemann(const ConvexDomain& domain, const ProjectivePoint& o,
                       const BoundaryPoint& xi, const ProjectivePoint& y);

/// Sublevel set {y : B_{o,center}(y) < level}.
struct Horoball {
  BoundaryPoint center;
  ProjectivePoint basepoint;
  double level = 0.0;

  bool contains(const ConvexDomain& domain, const ProjectivePoint& y) const;
};

}  // namespace hilbert
