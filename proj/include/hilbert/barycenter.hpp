#pragma once

#include "hilbert/measures.hpp"

namespace hilbert {

struct BarycenterResult {
  HyperbolicPoint point;
  double gradient_norm = 0.0;
  int iterations = 0;
  double functional_value = 0.0;
};

/// Minimizer of B(y, lambda) = sum_i w_i B_{o,xi_i}(y) by Riemannian gradient
/// descent on the hyperboloid with Armijo backtracking. Requires no atom to
/// carry half the mass (coercivity surrogate for atomic approximants).
BarycenterResult bar(const BoundaryMeasure& measure, const HyperbolicPoint& o,
                     double tolerance = tol().bar_grad);

/// Smallest D such that d(y, H) > D forces <v(y,H), v(y,alpha)> > 1/2 for
/// every alpha in the cap of H. The minimum over the cap is attained on the
/// rim where the inner product is tanh(d).
double halfspace_control_D(int n);

struct NaturalMapResult {
  BarycenterResult bar;
  HyperbolicPoint point;  // == bar.point
  size_t atom_count = 0;
  double ps_mass = 0.0;
};

/// Natural map at x: barycenter of the pushed-forward PS approximant.
NaturalMapResult natural_map(const ConvexDomain& domain, const OrbitBall& orbit,
                             const ProjectivePoint& x, const ProjectivePoint& o,
                             const PsParams& ps, const Correspondence& corr,
                             double bar_tolerance = tol().bar_grad);

struct HomotopyPoint {
  double t = 0.0;
  HyperbolicPoint point;
  double busemann_depth = 0.0;  // toward the tracked cusp, if any
};

struct HomotopyTrack {
  std::vector<HomotopyPoint> points;
  double max_busemann_depth = 0.0;
};

/// Barycenters of t * f_* mu_x + (1-t) * nu_{f(x)} over the grid. The
/// correspondence must carry an interior map (f itself). An optional cusp
/// direction is tracked through the Busemann depth for the properness
/// diagnostic.
HomotopyTrack homotopy_track(const ConvexDomain& domain, const OrbitBall& orbit,
                             const ProjectivePoint& x, const ProjectivePoint& o,
                             const PsParams& ps, const Correspondence& corr,
                             const std::vector<double>& t_grid, int visual_atoms,
                             uint64_t seed, const IdealPoint* cusp = nullptr);

struct JacobianReport {
  double jacobian = 0.0;       // |det DPhi| in the volume-form sense
  double bound = 0.0;          // (h_Omega / h_0)^n * N_bound
  double ratio = 0.0;          // jacobian / bound
  double richardson_gap = 0.0; // disagreement of the two step levels
  bool violation = false;      // ratio > 1 beyond the propagated error
};

/// Central finite-difference Jacobian of the natural map against the bound
/// (h_Omega/h_0)^n N. Densities convert the chart determinant to the
/// Hilbert-to-hyperbolic volume Jacobian.
JacobianReport jacobian_check(const ConvexDomain& domain, const OrbitBall& orbit,
                              const ProjectivePoint& x, const ProjectivePoint& o,
                              const PsParams& ps, const Correspondence& corr,
                              double h_domain, double h_reference, double N_bound,
                              double step = 1e-3);

struct EccentricityPoint {
  double N_value = 1.0;
  double K_value = 1.0;
  bool sandwich_ok = true;  // K^{-2n} <= N <= K^{2n}
};

struct EccentricityReport {
  std::vector<EccentricityPoint> points;
  double N_sup = 1.0;
  double K_sup = 1.0;
  bool all_sandwich_ok = true;
};

/// Eccentricity factor of the Finsler norm against the moment-ellipsoid
/// comparison metric of its unit ball: the inertia matrix of {F <= 1} scaled
/// so an ellipsoidal ball reproduces itself, which makes N = 1 exact on
/// ellipsoid domains.
EccentricityReport eccentricity(const ConvexDomain& domain,
                                const std::vector<ProjectivePoint>& points,
                                int min_sphere_nodes = 1 << 13);

}  // namespace hilbert
