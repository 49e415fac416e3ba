#pragma once

#include <memory>

#include "hilbert/group.hpp"
#include "hilbert/hyperbolic.hpp"

namespace hilbert {

/// Finite atomic measure on a domain boundary. Atoms built from orbit data
/// carry the node index of the word tree so pushforwards can relabel them.
struct BoundaryAtom {
  ProjectivePoint point;
  double weight = 0.0;
  int32_t node = -1;
};

enum class MeasureTag { visual, patterson_sullivan, mixture };

class BoundaryMeasure {
 public:
  BoundaryMeasure() = default;
  BoundaryMeasure(std::vector<BoundaryAtom> atoms, MeasureTag tag);

  const std::vector<BoundaryAtom>& atoms() const { return atoms_; }
  double total_mass() const { return total_mass_; }
  MeasureTag tag() const { return tag_; }
  double max_atom_weight() const;

  BoundaryMeasure scaled(double c) const;
  static BoundaryMeasure mixture(const BoundaryMeasure& a, double wa,
                                 const BoundaryMeasure& b, double wb);

  // Patterson-Sullivan metadata, recorded so refinement studies can key on it.
  double ps_s = 0.0;
  double ps_R_max = 0.0;
  int ps_dropped = 0;

 private:
  std::vector<BoundaryAtom> atoms_;
  double total_mass_ = 0.0;
  MeasureTag tag_ = MeasureTag::visual;
};

/// Atoms drawn from the round measure on the unit tangent sphere at y, mapped
/// to the ideal endpoints of their rays. Low-discrepancy sets for n <= 3,
/// seeded offsets; total mass is the area of the round (n-1)-sphere.
BoundaryMeasure visual_measure(const HyperbolicPoint& y, int atom_count, uint64_t seed);

struct PsParams {
  double s = 1.2;
  double R_max = 10.0;
  uint64_t seed = 0;
};

/// Orbit approximant of the Patterson-Sullivan measure at x: one atom per
/// orbit point gamma.o within R_max, placed at the forward boundary endpoint
/// of the ray [x, gamma.o), weighted e^{-s d(x, gamma.o)} and normalized so
/// the basepoint measure has unit mass. Orbit points coinciding with x are
/// dropped and counted in ps_dropped.
BoundaryMeasure ps_approximant(const ConvexDomain& domain, const OrbitBall& orbit,
                               const ProjectivePoint& x, const ProjectivePoint& o,
                               const PsParams& params);

/// Boundary correspondence used to push measures to the hyperbolic model.
class Correspondence {
 public:
  // Atoms kept in place (domain boundary already is the Klein sphere).
  static Correspondence identity(int n);
  // Atoms moved by a projective map (an ellipsoid normalization).
  static Correspondence projective(const ProjectiveMap& m);
  // Atoms relabeled through the word tree: the atom of gamma goes to the
  // ideal endpoint of [base, matched_gamma . base) in the hyperbolic model.
  static Correspondence orbit_relabel(std::shared_ptr<const OrbitBall> orbit,
                                      const ProjectiveGroup& target_group,
                                      const HyperbolicPoint& target_base);

  BoundaryMeasure push(const BoundaryMeasure& m) const;

  bool has_interior_map() const { return kind_ != Kind::relabel; }
  HyperbolicPoint interior(const ProjectivePoint& x) const;

 private:
  enum class Kind { identity, projective, relabel };
  Kind kind_ = Kind::identity;
  int n_ = 2;
  ProjectiveMap map_;
  std::shared_ptr<const OrbitBall> orbit_;
  std::vector<Vec> relabel_targets_;  // per word-tree node
};

double halfspace_mass(const BoundaryMeasure& m, const HalfspaceAtInfinity& h,
                      bool closed = true);

}  // namespace hilbert
