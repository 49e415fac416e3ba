#include "hilbert/barycenter.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hilbert/quadrature.hpp"
#include "hilbert/volume.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hilbert {

namespace {

// Fixed-chunk partial sums keep the gradient reduction order independent of
// the thread count.
constexpr size_t kChunk = 4096;

struct Functional {
  const std::vector<BoundaryAtom>* atoms;
  std::vector<Vec> xi;        // ideal points, time coordinate one
  std::vector<double> log_o;  // log(-<o,xi>) gauge terms
  double mass = 0.0;
  int n = 2;

  double value(const Vec& y) const {
    const size_t m = xi.size();
    const size_t chunks = (m + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (m > 16384)
#endif
    for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
      double acc = 0.0;
      const size_t hi = std::min(m, static_cast<size_t>(c + 1) * kChunk);
      for (size_t i = c * kChunk; i < hi; ++i) {
        acc += (*atoms)[i].weight * (std::log(-minkowski(y, xi[i])) - log_o[i]);
      }
      partial[c] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
  }

  Vec gradient(const Vec& y) const {
    const size_t m = xi.size();
    const size_t chunks = (m + kChunk - 1) / kChunk;
    std::vector<Vec> partial(chunks, Vec::Zero(n + 1));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (m > 16384)
#endif
    for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
      Vec acc = Vec::Zero(n + 1);
      const size_t hi = std::min(m, static_cast<size_t>(c + 1) * kChunk);
      for (size_t i = c * kChunk; i < hi; ++i) {
        acc += ((*atoms)[i].weight / (-minkowski(y, xi[i]))) * xi[i];
      }
      partial[c] = acc;
    }
    Vec sum = Vec::Zero(n + 1);
    for (const auto& p : partial) sum += p;
    return Vec(mass * y - sum);
  }

  // Tangent-coordinates Hessian sum w_i (I - vt vt^T) at y, same chunked
  // deterministic reduction as the gradient.
  CMat hessian(const Vec& y, const Mat& basis) const {
    const size_t m = xi.size();
    const size_t chunks = (m + kChunk - 1) / kChunk;
    std::vector<CMat> partial(chunks, CMat::Zero(n, n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (m > 16384)
#endif
    for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
      CMat acc = CMat::Zero(n, n);
      const size_t hi = std::min(m, static_cast<size_t>(c + 1) * kChunk);
      for (size_t i = c * kChunk; i < hi; ++i) {
        const Vec v = Vec(xi[i] / (-minkowski(y, xi[i])) - y);
        CVec vt(n);
        for (int k = 0; k < n; ++k) vt[k] = minkowski(v, basis.col(k));
        acc += (*atoms)[i].weight * (vt * vt.transpose());
      }
      partial[c] = acc;
    }
    CMat sum = CMat::Zero(n, n);
    for (const auto& p : partial) sum += p;
    return CMat(mass * CMat::Identity(n, n) - sum);
  }
};

}  // namespace

BarycenterResult bar(const BoundaryMeasure& measure, const HyperbolicPoint& o,
                     double tolerance) {
  if (!(measure.total_mass() > 0.0)) throw Error("bar needs positive total mass");
  if (!(measure.max_atom_weight() < 0.5 * measure.total_mass())) {
    throw MassTooConcentrated("an atom carries at least half the total mass");
  }
  const int n = o.dim();

  Functional f;
  f.atoms = &measure.atoms();
  f.mass = measure.total_mass();
  f.n = n;
  f.xi.reserve(measure.atoms().size());
  f.log_o.reserve(measure.atoms().size());
  for (const auto& a : measure.atoms()) {
    Vec xi = IdealPoint::from_vector(a.point.coords()).xi;
    f.xi.push_back(xi);
    f.log_o.push_back(std::log(-minkowski(o.x, xi)));
  }

  // Start at the normalized first moment when it is timelike.
  Vec y = o.x;
  {
    Vec m = Vec::Zero(n + 1);
    for (size_t i = 0; i < f.xi.size(); ++i) m += measure.atoms()[i].weight * f.xi[i];
    if (minkowski(m, m) < -1e-12 * m.squaredNorm()) {
      y = HyperbolicPoint::from_vector(m).x;
    }
  }

  // Damped Newton with the closed-form Hessian sum w_i (g - v_i v_i^T),
  // trust-capped step and Armijo backtracking; plain gradient steps cover
  // the rare non-descent case. Boundary-concentrated measures make the
  // Hessian nearly singular, hence the regularization and the cap.
  double fy = f.value(y);
  int iter = 0;
  double gnorm = 0.0;
  for (; iter < tol().bar_max_iter; ++iter) {
    const Vec g = f.gradient(y);
    const double g2 = minkowski(g, g);
    gnorm = std::sqrt(std::max(0.0, g2));
    if (gnorm <= tolerance * f.mass) break;

    const Mat basis = tangent_basis(HyperbolicPoint{y});
    CVec gt(n);
    for (int i = 0; i < n; ++i) gt[i] = minkowski(g, basis.col(i));
    const CMat h = f.hessian(y, basis);
    const double reg = 1e-10 * f.mass;
    CVec dt = CVec(-(h + reg * CMat::Identity(n, n)).ldlt().solve(gt));
    double descent = -dt.dot(gt);  // needs to be negative for a descent step
    if (!(descent < 0.0)) {
      dt = -gt / f.mass;
      descent = -dt.dot(gt);
    }
    if (dt.norm() > 5.0) dt *= 5.0 / dt.norm();

    Vec d = Vec::Zero(n + 1);
    for (int i = 0; i < n; ++i) d += dt[i] * basis.col(i);

    bool accepted = false;
    double eta = 1.0;
    for (int bt = 0; bt < 60; ++bt) {
      const Vec u = eta * d;
      const double ulen = std::sqrt(std::max(0.0, minkowski(u, u)));
      Vec cand = ulen < 1e-300 ? y : Vec(y * std::cosh(ulen) + (u / ulen) * std::sinh(ulen));
      cand = HyperbolicPoint::from_vector(cand).x;  // renormalize drift
      const double fc = f.value(cand);
      if (fc <= fy + 1e-4 * eta * descent) {
        y = cand;
        fy = fc;
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      // Step collapsed to rounding level: accept the current point if the
      // gradient is already small in absolute terms, otherwise fail.
      if (gnorm <= 1e-6 * f.mass) break;
      throw NoConvergence("barycenter line search stalled");
    }
  }
  if (iter >= tol().bar_max_iter) throw NoConvergence("barycenter iteration budget exhausted");

  // Newton polish: pins the minimizer well below the stopping tolerance so
  // the result is insensitive to mass rescaling and initialization.
  for (int polish = 0; polish < 3; ++polish) {
    const Vec g = f.gradient(y);
    const double gn = std::sqrt(std::max(0.0, minkowski(g, g)));
    if (gn >= gnorm && polish > 0) break;
    gnorm = gn;
    if (gn <= 1e-15 * f.mass) break;
    const Mat basis = tangent_basis(HyperbolicPoint{y});
    CVec gt(n);
    for (int i = 0; i < n; ++i) gt[i] = minkowski(g, basis.col(i));
    const CMat h = f.hessian(y, basis);
    const CVec dt = CVec(-(h + 1e-12 * f.mass * CMat::Identity(n, n)).ldlt().solve(gt));
    if (!(dt.norm() < 1.0)) break;
    Vec d = Vec::Zero(n + 1);
    for (int i = 0; i < n; ++i) d += dt[i] * basis.col(i);
    const double ulen = std::sqrt(std::max(0.0, minkowski(d, d)));
    if (ulen < 1e-300) break;
    const Vec cand = HyperbolicPoint::from_vector(
        Vec(y * std::cosh(ulen) + (d / ulen) * std::sinh(ulen))).x;
    const Vec gc = f.gradient(cand);
    const double gcn = std::sqrt(std::max(0.0, minkowski(gc, gc)));
    if (gcn < gnorm) {
      y = cand;
      gnorm = gcn;
      fy = f.value(y);
    } else {
      break;
    }
  }

  return BarycenterResult{HyperbolicPoint{y}, gnorm, iter, fy};
}

double halfspace_control_D(int n) {
  if (n < 2 || n > kMaxDim) throw NotSupported("halfspace_control_D needs 2 <= n <= kMaxDim");
  // Over the cap the inner product at distance d is minimized on the rim,
  // where a two-plane computation gives tanh(d); bisect tanh(d) = 1/2.
  double lo = 0.0, hi = 4.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::tanh(mid) > 0.5 ? hi : lo) = mid;
  }
  return hi;
}

NaturalMapResult natural_map(const ConvexDomain& domain, const OrbitBall& orbit,
                             const ProjectivePoint& x, const ProjectivePoint& o,
                             const PsParams& ps, const Correspondence& corr,
                             double bar_tolerance) {
  const BoundaryMeasure mu = ps_approximant(domain, orbit, x, o, ps);
  const BoundaryMeasure pushed = corr.push(mu);
  const int n = domain.dim();
  const BarycenterResult b = bar(pushed, HyperbolicPoint::origin(n), bar_tolerance);
  return NaturalMapResult{b, b.point, pushed.atoms().size(), pushed.total_mass()};
}

HomotopyTrack homotopy_track(const ConvexDomain& domain, const OrbitBall& orbit,
                             const ProjectivePoint& x, const ProjectivePoint& o,
                             const PsParams& ps, const Correspondence& corr,
                             const std::vector<double>& t_grid, int visual_atoms,
                             uint64_t seed, const IdealPoint* cusp) {
  const int n = domain.dim();
  const HyperbolicPoint fx = corr.interior(x);
  const BoundaryMeasure nu = visual_measure(fx, visual_atoms, seed);
  const BoundaryMeasure mu = corr.push(ps_approximant(domain, orbit, x, o, ps));
  const HyperbolicPoint origin = HyperbolicPoint::origin(n);

  HomotopyTrack track;
  track.max_busemann_depth = -std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    BarycenterResult b;
    if (t <= 0.0) {
      b = bar(nu, origin);
    } else if (t >= 1.0) {
      b = bar(mu, origin);
    } else {
      b = bar(BoundaryMeasure::mixture(mu, t, nu, 1.0 - t), origin);
    }
    HomotopyPoint hp{t, b.point, 0.0};
    if (cusp != nullptr) {
      hp.busemann_depth = -busemann_hyperbolic(origin, *cusp, b.point);
      track.max_busemann_depth = std::max(track.max_busemann_depth, hp.busemann_depth);
    }
    track.points.push_back(hp);
  }
  return track;
}

JacobianReport jacobian_check(const ConvexDomain& domain, const OrbitBall& orbit,
                              const ProjectivePoint& x, const ProjectivePoint& o,
                              const PsParams& ps, const Correspondence& corr,
                              double h_domain, double h_reference, double N_bound,
                              double step) {
  const int n = domain.dim();
  const CVec cx = domain.chart().to_chart(x);

  auto phi = [&](const CVec& c) {
    const ProjectivePoint p(domain.chart().from_chart(c));
    return natural_map(domain, orbit, p, o, ps, corr).point.klein();
  };

  auto jac_at_step = [&](double h) {
    CMat d(n, n);
    for (int i = 0; i < n; ++i) {
      CVec e = CVec::Zero(n);
      e[i] = h;
      const CVec fp = phi(CVec(cx + e));
      const CVec fm = phi(CVec(cx - e));
      d.col(i) = (fp - fm) / (2.0 * h);
    }
    return d;
  };

  const CMat d1 = jac_at_step(step);
  const CMat d2 = jac_at_step(0.5 * step);
  const CMat richardson = (4.0 * d2 - d1) / 3.0;
  const double gap = (d2 - d1).norm() / std::max(1e-12, richardson.norm());
  if (gap > 0.2) throw StepTooLarge("finite-difference levels disagree by more than 20%");

  const double det = std::abs(Eigen::MatrixXd(richardson).determinant());
  const CVec image = phi(cx);
  const double jac = det * klein_volume_density(image) / volume_density_chart(domain, cx);

  JacobianReport rep;
  rep.jacobian = jac;
  rep.bound = std::pow(h_domain / h_reference, n) * N_bound;
  rep.ratio = jac / rep.bound;
  rep.richardson_gap = gap;
  rep.violation = rep.ratio > 1.0 + 2.0 * gap + 1e-6;
  return rep;
}

EccentricityReport eccentricity(const ConvexDomain& domain,
                                const std::vector<ProjectivePoint>& points,
                                int min_sphere_nodes) {
  const int n = domain.dim();
  const auto& nodes = sphere_quadrature_cached(n, min_sphere_nodes);
  const double omega_n = unit_ball_volume(n);

  EccentricityReport rep;
  for (const auto& x : points) {
    const CVec cx = domain.chart().to_chart(x);
    if (!(domain.margin(cx) > 0.0)) throw PointOutsideDomain("eccentricity sample");

    // Lebesgue volume and inertia matrix of the unit Finsler ball; the
    // frame-adapted quadrature stays accurate near the boundary.
    const FinslerBallGeometry geom = finsler_ball_geometry(domain, cx, min_sphere_nodes);
    const double leb = geom.leb;
    const CMat& moment = geom.moment;
    const size_t m = nodes.size();
    std::vector<double> fvals(m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(m); ++i) {
      fvals[i] = finsler_norm_chart(domain, cx, nodes[i].dir);
    }

    // Comparison metric: inertia matrix inverted and rescaled so that an
    // ellipsoidal ball {v^T A v <= 1} maps back to A.
    const double cn = omega_n / (n + 2.0);
    const double det_m = Eigen::MatrixXd(moment).determinant();
    const double det_a = std::pow(std::pow(cn, n) / det_m, 2.0 / (n + 2.0));
    CMat g = cn * std::pow(det_a, -0.5) * CMat(Eigen::MatrixXd(moment).inverse());
    const double det_g = Eigen::MatrixXd(g).determinant();
    if (!(det_g > 0.0)) throw QuadratureUnconverged("comparison metric is not positive");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(g)};
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw QuadratureUnconverged("comparison metric is not positive definite");
    }
    Eigen::MatrixXd g_inv_sqrt = es.operatorInverseSqrt();

    // max F over the g-unit sphere and max g-norm over the F-unit sphere,
    // node scan plus golden-section refinement between the flanking nodes.
    auto refine_max = [&](auto value_at, size_t best_idx) {
      if (n != 2) return value_at(nodes[best_idx].dir);
      const double step = 2.0 * M_PI / static_cast<double>(m);
      const double theta0 = std::atan2(nodes[best_idx].dir[1], nodes[best_idx].dir[0]);
      double a = theta0 - step, b = theta0 + step;
      const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
      auto at = [&](double th) {
        CVec u(2);
        u << std::cos(th), std::sin(th);
        return value_at(u);
      };
      double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
      double f1 = at(c1), f2 = at(c2);
      for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
          a = c1;
          c1 = c2;
          f1 = f2;
          c2 = a + gr * (b - a);
          f2 = at(c2);
        } else {
          b = c2;
          c2 = c1;
          f2 = f1;
          c1 = b - gr * (b - a);
          f1 = at(c1);
        }
      }
      return std::max(f1, f2);
    };

    double max_f_sg = 0.0;
    size_t best_f = 0;
    for (size_t i = 0; i < m; ++i) {
      const CVec v = g_inv_sqrt * nodes[i].dir;
      const double f = finsler_norm_chart(domain, cx, v) / std::sqrt(v.dot(g * v));
      if (f > max_f_sg) {
        max_f_sg = f;
        best_f = i;
      }
    }
    max_f_sg = std::max(max_f_sg, refine_max(
                                      [&](const CVec& u) {
                                        const CVec v = g_inv_sqrt * u;
                                        return finsler_norm_chart(domain, cx, v) /
                                               std::sqrt(v.dot(g * v));
                                      },
                                      best_f));

    double max_g_sf = 0.0;
    size_t best_g = 0;
    for (size_t i = 0; i < m; ++i) {
      const CVec v = nodes[i].dir / fvals[i];
      const double gv = std::sqrt(v.dot(g * v));
      if (gv > max_g_sf) {
        max_g_sf = gv;
        best_g = i;
      }
    }
    max_g_sf = std::max(max_g_sf, refine_max(
                                      [&](const CVec& u) {
                                        const CVec v = u / finsler_norm_chart(domain, cx, u);
                                        return std::sqrt(v.dot(g * v));
                                      },
                                      best_g));

    EccentricityPoint ep;
    ep.N_value = std::pow(max_f_sg, n) * std::sqrt(det_g) * leb / omega_n;
    ep.K_value = std::max(max_f_sg, max_g_sf);
    const double kpow = std::pow(ep.K_value, 2 * n);
    ep.sandwich_ok = (ep.N_value >= 1.0 / kpow - 1e-9) && (ep.N_value <= kpow + 1e-9);
    rep.N_sup = std::max(rep.N_sup, ep.N_value);
    rep.K_sup = std::max(rep.K_sup, ep.K_value);
    rep.all_sandwich_ok = rep.all_sandwich_ok && ep.sandwich_ok;
    rep.points.push_back(ep);
  }
  return rep;
}

}  // namespace hilbert
