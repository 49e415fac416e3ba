#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hilbert {

// Homogeneous vectors have n+1 entries; dimensions up to kMaxDim are
// supported with stack storage (experiments target n = 2 and n = 3).
constexpr int kMaxDim = 7;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim + 1, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim + 1, kMaxDim + 1>;
// Chart (affine) coordinates, length n.
using CVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using CMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

// All numeric tolerances in one place.
struct Tolerances {
  double point_eq = 1e-12;           // canonical-form equality of points
  double map_det_min = 1e-12;        // |det| after unit Frobenius scaling
  double collinear = 1e-9;           // third singular value / largest
  double cross_ratio_rel = 1e-10;    // chart/map invariance of cross-ratio
  double chord = 1e-12;              // chord endpoint accuracy (chart units)
  double boundary_margin = 1e-10;    // |margin| at a declared boundary point
  double busemann_spread = 1e-6;     // extrapolation spread gate
  double busemann_t0 = 4.0;          // finite-t grid {t0, t0+dt, t0+2dt}
  double busemann_dt = 2.0;
  double finsler_fd = 1e-6;          // symmetric finite-difference agreement
  double finsler_fd_step = 1e-5;
  double relation_residual = 1e-9;   // group relation residual
  double bar_grad = 1e-8;            // barycenter stop: |grad| <= tol * mass
  int bar_max_iter = 10000;
  double density_rel = 1e-4;         // sphere quadrature target
  double ball_rel_err = 0.02;        // Monte-Carlo target for ball volumes
  double ps_refine_band = 0.05;      // halfspace-mass stability gate
};

inline const Tolerances& tol() {
  static const Tolerances t;
  return t;
}

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define HILBERT_ERROR(Name)                                   \
  struct Name : Error {                                       \
    explicit Name(const std::string& w) : Error(#Name ": " + w) {} \
  }

HILBERT_ERROR(InvalidPoint);
HILBERT_ERROR(InvalidMap);
HILBERT_ERROR(NonCollinear);
HILBERT_ERROR(DegenerateConfiguration);
HILBERT_ERROR(PointOutsideDomain);
HILBERT_ERROR(DegenerateChord);
HILBERT_ERROR(NonConvergent);
HILBERT_ERROR(MapDoesNotPreserveDomain);
HILBERT_ERROR(OrbitTooSmall);
HILBERT_ERROR(LevelNotFound);
HILBERT_ERROR(MassTooConcentrated);
HILBERT_ERROR(NoConvergence);
HILBERT_ERROR(UnmappedAtom);
HILBERT_ERROR(BudgetExceeded);
HILBERT_ERROR(StepTooLarge);
HILBERT_ERROR(QuadratureUnconverged);
HILBERT_ERROR(SchemaError);
HILBERT_ERROR(NotSupported);

#undef HILBERT_ERROR

// Deterministic stream derivation: one master seed, independent substreams
// keyed by (tag, index). splitmix64 on the combined key.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t substream(uint64_t seed, uint64_t tag, uint64_t index = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(tag)) ^ index);
}

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

constexpr const char* kVersion = "hilbertlab 0.1.0";

}  // namespace hilbert
