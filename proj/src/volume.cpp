#include "hilbert/volume.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <random>

#include "hilbert/hyperbolic.hpp"
#include "hilbert/quadrature.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hilbert {

namespace {

struct MomentPass {
  double leb = 0.0;
  CMat moment;
  double anisotropy = 1.0;
};

MomentPass moment_pass(const ConvexDomain& domain, const CVec& x, const CMat& frame,
                       const std::vector<SphereNode>& nodes, bool parallel) {
  const int n = static_cast<int>(x.size());
  const size_t m = nodes.size();
  std::vector<double> f(m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel && m > 512)
#endif
  for (long long i = 0; i < static_cast<long long>(m); ++i) {
    f[i] = finsler_norm_chart(domain, x, CVec(frame * nodes[i].dir));
  }
  MomentPass out;
  out.moment = CMat::Zero(n, n);
  double fmin = std::numeric_limits<double>::infinity(), fmax = 0.0;
  for (size_t i = 0; i < m; ++i) {
    out.leb += nodes[i].weight * std::pow(f[i], -n) / n;
    out.moment += (nodes[i].weight * std::pow(f[i], -(n + 2)) / (n + 2)) *
                  (nodes[i].dir * nodes[i].dir.transpose());
    fmin = std::min(fmin, f[i]);
    fmax = std::max(fmax, f[i]);
  }
  out.anisotropy = fmax / fmin;
  return out;
}

}  // namespace

FinslerBallGeometry finsler_ball_geometry(const ConvexDomain& domain, const CVec& x,
                                          int min_sphere_nodes) {
  const int n = static_cast<int>(x.size());
  if (!(domain.margin(x) > 0.0)) throw PointOutsideDomain("finsler_ball_geometry");

  // Rounding passes on a coarse node set: replace the frame by the one that
  // makes the measured inertia ellipsoid round, until F is nearly isotropic.
  const auto& coarse = sphere_quadrature_cached(n, n == 2 ? 128 : 1024);
  CMat frame = CMat::Identity(n, n);
  int passes = 0;
  for (; passes < 12; ++passes) {
    const MomentPass mp = moment_pass(domain, x, frame, coarse, false);
    if (mp.anisotropy < 4.0) break;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(mp.moment)};
    if (es.eigenvalues().minCoeff() <= 0.0) break;
    // sqrt of the normalized inertia matrix stretches short axes back out.
    Eigen::MatrixXd sq = es.operatorSqrt();
    sq /= std::pow(sq.determinant(), 1.0 / n);
    frame = CMat(frame * CMat(sq));
  }

  const auto& fine = sphere_quadrature_cached(n, min_sphere_nodes);
  const MomentPass mp = moment_pass(domain, x, frame, fine, true);
  const double det_frame = std::abs(Eigen::MatrixXd(frame).determinant());

  FinslerBallGeometry out;
  out.leb = det_frame * mp.leb;
  out.moment = CMat(det_frame * frame * mp.moment * frame.transpose());
  out.frame_passes = passes;
  out.anisotropy = mp.anisotropy;
  return out;
}

double volume_density_chart(const ConvexDomain& domain, const CVec& x, int min_sphere_nodes) {
  const FinslerBallGeometry g = finsler_ball_geometry(domain, x, min_sphere_nodes);
  return unit_ball_volume(static_cast<int>(x.size())) / g.leb;
}

double volume_density(const ConvexDomain& domain, const ProjectivePoint& x,
                      int min_sphere_nodes) {
  return volume_density_chart(domain, domain.chart().to_chart(x), min_sphere_nodes);
}

std::vector<double> density_batch(const ConvexDomain& domain, const std::vector<CVec>& points,
                                  int min_sphere_nodes, bool parallel) {
  std::vector<double> out(points.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
#endif
  for (long long i = 0; i < static_cast<long long>(points.size()); ++i) {
    out[i] = volume_density_chart(domain, points[i], min_sphere_nodes);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Radial integral along one ray in the arc-length parameter s:
//   int_0^S rho(y(s)) t(s)^{n-1} t'(s) ds,
// with t(s) the chart position along the chord and t' its closed-form
// derivative. Gauss-Legendre in s; the integrand is smooth and bounded.
double ray_integral(const ConvexDomain& domain, const CVec& x, const CVec& dir, double S,
                    const std::vector<double>& gl_nodes, const std::vector<double>& gl_weights,
                    int density_nodes) {
  const int n = static_cast<int>(x.size());
  const Chord ch = domain.chord_chart(x, dir);
  const double alpha = -ch.t_minus, beta = ch.t_plus;
  double acc = 0.0;
  for (size_t k = 0; k < gl_nodes.size(); ++k) {
    const double s = 0.5 * S * (gl_nodes[k] + 1.0);
    const double E = std::exp(2.0 * s);
    const double denom = beta + E * alpha;
    const double t = alpha * beta * (E - 1.0) / denom;
    const double tprime = 2.0 * E * alpha * beta * (alpha + beta) / (denom * denom);
    const CVec y = x + t * ch.dir;
    const double rho = volume_density_chart(domain, y, density_nodes);
    acc += gl_weights[k] * rho * std::pow(t, n - 1) * tprime;
  }
  return 0.5 * S * acc;
}

struct StratifiedDirs {
  std::vector<CVec> dirs;
  int strata = 0;
  int per_stratum = 2;
};

// Two uniform samples per equal-area stratum of the sphere.
StratifiedDirs stratified_directions(int n, int strata, uint64_t seed) {
  StratifiedDirs out;
  out.strata = strata;
  out.dirs.reserve(static_cast<size_t>(strata) * out.per_stratum);
  if (n == 2) {
    for (int j = 0; j < strata; ++j) {
      std::mt19937_64 rng(substream(seed, fnv1a("ray2"), (static_cast<uint64_t>(strata) << 32) | j));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (int r = 0; r < out.per_stratum; ++r) {
        const double theta = 2.0 * M_PI * (j + unif(rng)) / strata;
        CVec u(2);
        u << std::cos(theta), std::sin(theta);
        out.dirs.push_back(u);
      }
    }
    return out;
  }
  if (n == 3) {
    // Equal-area z-bands times azimuth sectors, strata = mz * mphi.
    int mz = std::max(2, static_cast<int>(std::round(std::sqrt(strata / 2.0))));
    int mphi = std::max(2, strata / mz);
    out.strata = mz * mphi;
    out.dirs.clear();
    out.dirs.reserve(static_cast<size_t>(out.strata) * out.per_stratum);
    for (int iz = 0; iz < mz; ++iz) {
      for (int ip = 0; ip < mphi; ++ip) {
        const uint64_t idx = (static_cast<uint64_t>(iz) << 20) | ip;
        std::mt19937_64 rng(substream(seed, fnv1a("ray3"), (static_cast<uint64_t>(out.strata) << 40) | idx));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int r = 0; r < out.per_stratum; ++r) {
          const double z = -1.0 + 2.0 * (iz + unif(rng)) / mz;
          const double phi = 2.0 * M_PI * (ip + unif(rng)) / mphi;
          const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
          CVec u(3);
          u << rr * std::cos(phi), rr * std::sin(phi), z;
          out.dirs.push_back(u);
        }
      }
    }
    return out;
  }
  throw NotSupported("stratified directions for n = 2, 3 only");
}

MonteCarloValue stratified_radial_mc(const ConvexDomain& domain, const CVec& x,
                                     const std::function<double(const CVec&)>& per_ray,
                                     uint64_t seed, const BallVolumeOptions& options) {
  const int n = static_cast<int>(x.size());
  const double area = sphere_area(n);
  int strata = options.initial_strata;
  MonteCarloValue result;
  while (true) {
    const StratifiedDirs sd = stratified_directions(n, strata, seed);
    const int per = sd.per_stratum;
    const size_t total = sd.dirs.size();
    std::vector<double> vals(total);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) if (options.parallel)
#endif
    for (long long i = 0; i < static_cast<long long>(total); ++i) {
      vals[i] = per_ray(sd.dirs[i]);
    }
    // Strata have equal area; the estimate is area * mean, the error comes
    // from per-stratum sample variance.
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(total);
    double var = 0.0;
    for (int j = 0; j < sd.strata; ++j) {
      double sm = 0.0;
      for (int r = 0; r < per; ++r) sm += vals[j * per + r];
      sm /= per;
      double sv = 0.0;
      for (int r = 0; r < per; ++r) sv += (vals[j * per + r] - sm) * (vals[j * per + r] - sm);
      sv /= (per - 1);
      var += sv / per;  // variance of the stratum mean
    }
    var /= static_cast<double>(sd.strata) * sd.strata;
    result.value = area * mean;
    result.std_error = area * std::sqrt(var);
    result.strata = sd.strata;
    result.evaluations += total;
    if (result.std_error <= options.target_rel_error * std::abs(result.value)) break;
    if (2 * strata > options.max_strata) {
      throw BudgetExceeded("stratified sampling reached the budget at relative error " +
                           std::to_string(result.std_error / std::abs(result.value)));
    }
    strata *= 2;
  }
  return result;
}

}  // namespace

MonteCarloValue ball_volume(const ConvexDomain& domain, const ProjectivePoint& x, double R,
                            uint64_t seed, const BallVolumeOptions& options) {
  if (!(R > 0.0)) throw Error("ball radius must be positive");
  const CVec cx = domain.chart().to_chart(x);
  if (!(domain.margin(cx) > 0.0)) throw PointOutsideDomain("ball_volume");
  std::vector<double> gl_n, gl_w;
  gauss_legendre(options.radial_nodes, gl_n, gl_w);
  auto per_ray = [&](const CVec& dir) {
    return ray_integral(domain, cx, dir, R, gl_n, gl_w, options.density_nodes);
  };
  return stratified_radial_mc(domain, cx, per_ray, seed, options);
}

EntropyEstimate entropy_ball_growth(const ConvexDomain& domain, const ProjectivePoint& x,
                                    double R1, double R2, uint64_t seed,
                                    const BallVolumeOptions& options) {
  if (!(R2 > R1) || !(R1 >= 3.0)) throw Error("entropy window needs R2 > R1 >= 3");
  const MonteCarloValue v1 = ball_volume(domain, x, R1, substream(seed, fnv1a("bg1")), options);
  const MonteCarloValue v2 = ball_volume(domain, x, R2, substream(seed, fnv1a("bg2")), options);
  EntropyEstimate est;
  est.value = (std::log(v2.value) - std::log(v1.value)) / (R2 - R1);
  est.R1 = R1;
  est.R2 = R2;
  est.std_error = std::sqrt(std::pow(v1.std_error / v1.value, 2) +
                            std::pow(v2.std_error / v2.value, 2)) /
                  (R2 - R1);
  est.method = "ball_growth";
  return est;
}

PoincareResult entropy_poincare(const ConvexDomain& domain, const OrbitBall& orbit) {
  PoincareResult out;
  const double R_max = orbit.R_max;
  for (double r = 0.5; r <= R_max + 1e-9; r += 0.5) {
    out.profile.R.push_back(r);
    out.profile.counts.push_back(orbit.count_within(r));
  }
  // Largest window on which every grid count exceeds 100.
  std::vector<double> xs;
  std::vector<double> ys;
  for (size_t i = 0; i < out.profile.R.size(); ++i) {
    if (out.profile.counts[i] >= 100) {
      xs.push_back(out.profile.R[i]);
      ys.push_back(std::log(static_cast<double>(out.profile.counts[i])));
    }
  }
  if (xs.size() < 3) throw OrbitTooSmall("fewer than 3 grid radii with 100+ orbit points");

  const size_t m = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = m * sxx - sx * sx;
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  double ss = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double r = ys[i] - slope * xs[i] - intercept;
    ss += r * r;
  }
  const double slope_err =
      std::sqrt(std::max(1e-300, ss / std::max<size_t>(1, m - 2)) * m / denom);

  out.estimate.value = slope;
  out.estimate.R1 = xs.front();
  out.estimate.R2 = xs.back();
  out.estimate.std_error = std::max(slope_err, 1e-6);
  out.estimate.method = "poincare_series";
  return out;
}

PoincareResult entropy_poincare(const ConvexDomain& domain, const ProjectiveGroup& group,
                                const ProjectivePoint& o, double R_max, uint64_t seed,
                                const OrbitOptions& options) {
  (void)seed;  // enumeration is deterministic; the seed is recorded upstream
  const OrbitBall orbit = orbit_ball(domain, group, o, R_max, options);
  if (orbit.size() < 100) throw OrbitTooSmall("fewer than 100 orbit points in the ball");
  return entropy_poincare(domain, orbit);
}

MonteCarloValue dirichlet_volume(const ConvexDomain& domain, const OrbitBall& orbit,
                                 const ProjectivePoint& o, uint64_t seed,
                                 const BallVolumeOptions& options) {
  const CVec co = domain.chart().to_chart(o);
  if (!(domain.margin(co) > 0.0)) throw PointOutsideDomain("dirichlet_volume");

  // Orbit chart points, skipping the basepoint itself.
  std::vector<CVec> others;
  others.reserve(orbit.size());
  for (const auto& e : orbit.entries) {
    const CVec c = domain.chart().to_chart(e.point);
    if ((c - co).norm() > 1e-12) others.push_back(c);
  }
  if (others.empty()) throw OrbitTooSmall("dirichlet cell needs neighbors");

  auto in_cell_against = [&](const CVec& y, const std::vector<CVec>& nbrs) {
    const double d_o = hilbert_distance_chart(domain, co, y);
    for (const auto& c : nbrs) {
      if (hilbert_distance_chart(domain, c, y) < d_o) return false;
    }
    return true;
  };

  // The cell is star-shaped about o: radial reach by bisection, then the
  // same radial integral as for metric balls. A coarse reach pass bounds the
  // cell so distant orbit points can be dropped (their bisectors sit at
  // least half their distance away from o).
  const double reach_cap = 0.5 * orbit.R_max + 1.0;
  std::vector<double> gl_n, gl_w;
  gauss_legendre(options.radial_nodes, gl_n, gl_w);

  double coarse_reach = 0.0;
  {
    const auto& probe = sphere_quadrature_cached(static_cast<int>(co.size()), 64);
    for (const auto& node : probe) {
      const Chord ch = domain.chord_chart(co, node.dir);
      const double alpha = -ch.t_minus, beta = ch.t_plus;
      double lo = 0.0, hi = reach_cap;
      auto at = [&](double s) {
        const double E = std::exp(2.0 * s);
        return CVec(co + (alpha * beta * (E - 1.0) / (beta + E * alpha)) * ch.dir);
      };
      if (in_cell_against(at(hi), others)) {
        lo = hi;
      } else {
        for (int i = 0; i < 20; ++i) {
          const double mid = 0.5 * (lo + hi);
          (in_cell_against(at(mid), others) ? lo : hi) = mid;
        }
      }
      coarse_reach = std::max(coarse_reach, hi);
    }
  }
  std::vector<CVec> near;
  for (const auto& c : others) {
    if (hilbert_distance_chart(domain, co, c) <= 2.0 * coarse_reach + 0.2) near.push_back(c);
  }
  auto in_cell = [&](const CVec& y) { return in_cell_against(y, near); };

  auto per_ray = [&](const CVec& dir) {
    const Chord ch = domain.chord_chart(co, dir);
    const double alpha = -ch.t_minus, beta = ch.t_plus;
    auto point_at = [&](double s) {
      const double E = std::exp(2.0 * s);
      return CVec(co + (alpha * beta * (E - 1.0) / (beta + E * alpha)) * ch.dir);
    };
    double lo = 0.0, hi = std::min(reach_cap, coarse_reach + 0.1);
    if (in_cell(point_at(hi))) {
      lo = hi;
    } else {
      for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (in_cell(point_at(mid)) ? lo : hi) = mid;
      }
    }
    const double S = lo;
    if (S <= 0.0) return 0.0;
    return ray_integral(domain, co, dir, S, gl_n, gl_w, options.density_nodes);
  };
  return stratified_radial_mc(domain, co, per_ray, seed, options);
}

}  // namespace hilbert
