#pragma once

#include "hilbert/group.hpp"

namespace hilbert {

/// Lebesgue volume and inertia matrix of the unit Finsler ball at a point.
/// The quadrature runs in an adaptively rounded linear frame: near the
/// boundary the ball is extremely eccentric and a fixed node set would miss
/// its short axis entirely.
struct FinslerBallGeometry {
  double leb = 0.0;   // Lebesgue volume of {F <= 1} in chart coordinates
  CMat moment;        // second-moment (inertia) matrix of that ball
  int frame_passes = 0;
  double anisotropy = 1.0;  // max/min of F over the final frame's sphere
};
FinslerBallGeometry finsler_ball_geometry(const ConvexDomain& domain, const CVec& x,
                                          int min_sphere_nodes = 1 << 12);

/// Density of the Hilbert volume against Lebesgue measure of the chart:
/// omega_n / Leb(unit Finsler ball), 1 at the center of the unit ball.
double volume_density(const ConvexDomain& domain, const ProjectivePoint& x,
                      int min_sphere_nodes = 1 << 12);
double volume_density_chart(const ConvexDomain& domain, const CVec& x,
                            int min_sphere_nodes = 1 << 12);

/// Serial reference for the parallel density kernel; the two agree bitwise.
std::vector<double> density_batch(const ConvexDomain& domain, const std::vector<CVec>& points,
                                  int min_sphere_nodes = 1 << 12, bool parallel = true);

struct MonteCarloValue {
  double value = 0.0;
  double std_error = 0.0;
  size_t strata = 0;
  size_t evaluations = 0;
};

struct BallVolumeOptions {
  int initial_strata = 256;     // doubled until the error target is met
  int max_strata = 1 << 14;     // budget; exceeding it throws BudgetExceeded
  int radial_nodes = 48;
  int density_nodes = 1 << 12;
  double target_rel_error = tol().ball_rel_err;
  int shards = 1;               // recorded; estimates are shard-independent
  bool parallel = true;
};

/// Hilbert volume of the metric ball B(x, R): stratified directions, exact
/// radial Gauss-Legendre integration in the arc-length parameter, two sample
/// rays per stratum for an unbiased variance estimate. Deterministic for a
/// fixed seed regardless of thread count.
MonteCarloValue ball_volume(const ConvexDomain& domain, const ProjectivePoint& x, double R,
                            uint64_t seed, const BallVolumeOptions& options = {});

struct EntropyEstimate {
  double value = 0.0;
  double R1 = 0.0, R2 = 0.0;  // window
  double std_error = 0.0;
  std::string method;
};

EntropyEstimate entropy_ball_growth(const ConvexDomain& domain, const ProjectivePoint& x,
                                    double R1, double R2, uint64_t seed,
                                    const BallVolumeOptions& options = {});

struct OrbitCountProfile {
  std::vector<double> R;
  std::vector<size_t> counts;
};

struct PoincareResult {
  EntropyEstimate estimate;
  OrbitCountProfile profile;
};

/// Least-squares growth rate of log N(R) over the largest half-integer grid
/// window on which counts exceed 100.
PoincareResult entropy_poincare(const ConvexDomain& domain, const ProjectiveGroup& group,
                                const ProjectivePoint& o, double R_max, uint64_t seed,
                                const OrbitOptions& options = {});
PoincareResult entropy_poincare(const ConvexDomain& domain, const OrbitBall& orbit);

/// Hilbert volume of the Dirichlet cell of o (points nearer to o than to any
/// enumerated orbit point), for fundamental-domain volume estimates.
MonteCarloValue dirichlet_volume(const ConvexDomain& domain, const OrbitBall& orbit,
                                 const ProjectivePoint& o, uint64_t seed,
                                 const BallVolumeOptions& options = {});

}  // namespace hilbert
