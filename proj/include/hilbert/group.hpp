#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "hilbert/metric.hpp"

namespace hilbert {

/// Word in the generators: indices into the generator list.
using Word = std::vector<int32_t>;

/// Finitely generated group of projective maps. Generators are stored as
/// given; inverses are available through gen() with negative-style indexing
/// handled by the caller (builtin groups use involutions or list inverses
/// explicitly).
class ProjectiveGroup {
 public:
  ProjectiveGroup() = default;
  ProjectiveGroup(std::string label, std::vector<ProjectiveMap> generators,
                  std::vector<Word> relations = {});

  const std::string& label() const { return label_; }
  int dim() const { return generators_.empty() ? 0 : generators_[0].dim(); }
  int num_generators() const { return static_cast<int>(generators_.size()); }
  const ProjectiveMap& gen(int i) const { return generators_.at(i); }
  const std::vector<ProjectiveMap>& generators() const { return generators_; }
  const std::vector<Word>& relations() const { return relations_; }

  ProjectiveMap evaluate(const Word& w) const;

  // Largest Frobenius residual of the declared relations after projective
  // scaling; validated < tol at load for builtin groups.
  double relation_residual() const;

  // Orbit of seed under words of length <= depth, deduplicated.
  std::vector<ProjectivePoint> orbit_points(const ProjectivePoint& seed, int depth) const;

  // Sampled check that every generator maps interior points to interior points.
  void validate_preserves(const ConvexDomain& domain, int samples = 64, uint64_t seed = 7) const;

 private:
  std::string label_;
  std::vector<ProjectiveMap> generators_;
  std::vector<Word> relations_;
};

struct OrbitEntry {
  ProjectivePoint point;
  double distance = 0.0;
  int32_t node = -1;  // index into the word tree
};

/// Orbit ball {gamma.o : d(o, gamma.o) <= R_max} in breadth-first shortlex
/// order. The word tree covers every visited point, so prefixes that pass
/// through the pruning shell stay reconstructible.
struct OrbitBall {
  std::vector<OrbitEntry> entries;
  std::vector<int32_t> tree_parent;
  std::vector<int32_t> tree_letter;
  double R_max = 0.0;

  Word word(size_t i) const;
  size_t size() const { return entries.size(); }
  // Count of entries with distance <= R.
  size_t count_within(double R) const;
};

double displacement(const ConvexDomain& domain, const ProjectiveMap& g,
                    const ProjectivePoint& x);

struct IsometryClass {
  enum class Kind { hyperbolic, parabolic, elliptic_or_identity, inconclusive };
  Kind kind = Kind::inconclusive;
  double displacement_infimum = 0.0;
  bool attained = false;
  std::string note;
};

/// Metric classification by displacement-infimum sampling; heuristic, with an
/// explicit inconclusive outcome.
IsometryClass classify(const ConvexDomain& domain, const ProjectiveMap& g);

struct OrbitOptions {
  double prune_buffer_factor = 2.0;  // prune beyond R_max + factor * max gen displacement
  size_t max_points = 60'000'000;
  bool parallel = true;
};

OrbitBall orbit_ball(const ConvexDomain& domain, const ProjectiveGroup& group,
                     const ProjectivePoint& o, double R_max,
                     const OrbitOptions& options = {});

/// Horoball centered at theta on which all sampled displacements of the given
/// parabolic generators stay below eps0. Level found by bisection and
/// conservative by one step.
Horoball short_loop_horoball(const ConvexDomain& domain,
                             const std::vector<ProjectiveMap>& parabolic_gens,
                             const BoundaryPoint& theta, double eps0,
                             const ProjectivePoint& o, int horosphere_samples = 1000);

struct OsculatingReport {
  bool inner_contained = false;
  bool outer_contains = false;
  bool tangent_inner = false;
  bool tangent_outer = false;
  double worst_inner_margin = 0.0;
  double worst_outer_margin = 0.0;
  bool pass() const { return inner_contained && outer_contains && tangent_inner && tangent_outer; }
};

OsculatingReport osculating_ellipsoids(const EllipsoidDomain& inner, const ConvexDomain& domain,
                                       const EllipsoidDomain& outer, const BoundaryPoint& theta,
                                       int samples = 2000, uint64_t seed = 11);

// ---------------------------------------------------------------------------
// Built-in groups. All are validated on construction: relation residuals
// below tolerance, generators invertible.

/// Klein-model lift SL(2,R) -> SO(2,1) acting on the unit disc
/// (coordinates x1, x2, time).
ProjectiveMap sl2_klein_lift(const Eigen::Matrix2d& g);

/// Hyperbolic reflection triangle group (p,q,r); r < 0 encodes an ideal
/// vertex (the (p,q,infinity) lattice). Generators are the three wall
/// reflections in SO(2,1) with time coordinate last.
struct TriangleGroupData {
  ProjectiveGroup group;
  ProjectivePoint incenter;                 // interior basepoint
  std::optional<ProjectivePoint> cusp;      // ideal vertex for r = infinity
  std::optional<ProjectiveMap> cusp_parabolic;  // product of the two walls at the cusp
};
TriangleGroupData triangle_group(int p, int q, int r);
TriangleGroupData triangle_group_ideal(int p, int q);  // (p,q,infinity)

/// Coxeter reflection representation in SL(3,R) with Cartan matrix
/// A_ii = 2, A_ij A_ji = 4 cos^2(pi/m_ij), asymmetry mu on the (1,2) pair.
/// mu = 1 is the hyperbolic point of the family.
struct KacVinbergData {
  ProjectiveGroup group;
  ProjectivePoint chamber_point;  // interior seed
  Vec chart_functional;           // positive on the orbit cone
};
KacVinbergData kac_vinberg_group(int p, int q, int r, double mu, int chart_orbit_depth = 6);

/// Parabolic translations of the unit ball fixing the boundary point e1;
/// rank n-1, generated by unipotent shears P_i = exp(N_i).
struct ParabolicSubgroupData {
  ProjectiveGroup group;          // generators P_1 .. P_{n-1}
  ProjectivePoint fixed_point;    // boundary fixed point
  std::vector<Mat> log_generators;  // nilpotent N_i with P_i = exp(N_i)
};
ParabolicSubgroupData parabolic_subgroup(int n);

}  // namespace hilbert
