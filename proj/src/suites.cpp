#include "hilbert/suites.hpp"

#include <cmath>
#include <random>

#include "hilbert/barycenter.hpp"
#include "hilbert/volume.hpp"

namespace hilbert {

namespace {

// Sampling helpers, deterministic per (scene seed, check name).

std::mt19937_64 check_rng(const Scene& s, const std::string& check) {
  return std::mt19937_64(splitmix64(substream(s.seed, fnv1a(check))));
}

CVec random_dir(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  CVec v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  } while (v.norm() < 1e-8);
  return CVec(v / v.norm());
}

CVec interior_point(const ConvexDomain& dom, const ProjectivePoint& base, std::mt19937_64& rng,
                    double max_frac = 0.92) {
  std::uniform_real_distribution<double> unif(-max_frac, max_frac);
  const CVec b = dom.chart().to_chart(base);
  const CVec dir = random_dir(rng, dom.dim());
  const auto [tm, tp] = dom.chord_params(b, dir);
  const double f = unif(rng);
  return CVec(b + (f >= 0.0 ? f * tp : -f * tm) * dir);
}

struct Runner {
  const Scene& scene;
  SuiteReport& report;

  template <typename F>
  void check(const std::string& name, F&& body) {
    CheckResult r;
    r.name = name;
    r.worst_margin = std::numeric_limits<double>::infinity();
    try {
      body(r);
    } catch (const Error& e) {
      r.violations = std::max<long>(r.violations, 1);
      r.note = e.what();
    }
    if (!std::isfinite(r.worst_margin)) r.worst_margin = 0.0;
    report.checks.push_back(std::move(r));
  }

  // Record one trial with the given slack; slack < 0 is a violation.
  static void tally(CheckResult& r, double slack) {
    ++r.trials;
    r.worst_margin = std::min(r.worst_margin, slack);
    if (slack < 0.0) ++r.violations;
  }

  static void skip(CheckResult& r, const std::string& why) { r.note = "skipped: " + why; }
};

ProjectiveMap random_near_identity(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> gauss;
  Mat m = Mat::Identity(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) m(i, j) += scale * gauss(rng);
  return ProjectiveMap(m);
}

// Busemann-sublevel inner ellipsoid of the unit ball tangent at +e1.
EllipsoidDomain klein_horoball(int n, double level) {
  const double e2l = std::exp(2.0 * level);
  Vec w = Vec::Zero(n + 1);
  w[0] = -1.0;
  w[n] = 1.0;
  Mat q = w * w.transpose();
  for (int i = 0; i < n; ++i) q(i, i) += e2l;
  q(n, n) -= e2l;
  CVec inside = CVec::Zero(n);
  inside[0] = 1.0 - 0.5 * e2l;  // on the axis, inside for any level < 0
  const auto chart = AffineChart::standard(n);
  return EllipsoidDomain(q, chart, ProjectivePoint(chart.from_chart(inside)));
}

// --------------------------------------------------------------------------

void suite_metric(Runner& run) {
  const Scene& sc = run.scene;
  const ConvexDomain& dom = *sc.domain;
  const int n = dom.dim();

  run.check("cross_ratio_invariance_and_cocycle", [&](CheckResult& r) {
    auto rng = check_rng(sc, r.name);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
      Vec p0(n + 1), d(n + 1);
      for (int i = 0; i <= n; ++i) {
        p0[i] = unif(rng);
        d[i] = unif(rng);
      }
      double ts[5] = {unif(rng), unif(rng), unif(rng), unif(rng), unif(rng)};
      std::sort(ts, ts + 5);
      if (ts[1] - ts[0] < 0.2 || ts[2] - ts[1] < 0.2 || ts[3] - ts[2] < 0.2 ||
          ts[4] - ts[3] < 0.2) {
        continue;
      }
      auto at = [&](int i) { return ProjectivePoint(Vec(p0 + ts[i] * d)); };
      const double cr = cross_ratio(at(0), at(1), at(3), at(4));
      const ProjectiveMap g = random_near_identity(rng, n, 0.3);
      const double cr_g =
          cross_ratio(g.apply(at(0)), g.apply(at(1)), g.apply(at(3)), g.apply(at(4)));
      Runner::tally(r, tol().cross_ratio_rel - std::abs(cr_g - cr) / std::abs(cr));
      const double lhs = cross_ratio(at(0), at(1), at(3), at(4));
      const double rhs = cross_ratio(at(0), at(1), at(2), at(4)) *
                         cross_ratio(at(0), at(2), at(3), at(4));
      Runner::tally(r, tol().cross_ratio_rel - std::abs(lhs - rhs) / std::abs(lhs));
    }
  });

  run.check("metric_axioms", [&](CheckResult& r) {
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 400; ++trial) {
      const CVec a = interior_point(dom, sc.basepoint, rng);
      const CVec b = interior_point(dom, sc.basepoint, rng);
      const CVec c = interior_point(dom, sc.basepoint, rng);
      const double dab = hilbert_distance_chart(dom, a, b);
      Runner::tally(r, 1e-10 - std::abs(dab - hilbert_distance_chart(dom, b, a)));
      Runner::tally(r, hilbert_distance_chart(dom, a, a) == 0.0 ? 0.0 : -1.0);
      Runner::tally(r, dab >= 0.0 ? 0.0 : -1.0);
      Runner::tally(r, hilbert_distance_chart(dom, a, c) + hilbert_distance_chart(dom, c, b) -
                           dab + 1e-9);
    }
  });

  run.check("projective_invariance", [&](CheckResult& r) {
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 60; ++trial) {
      const ProjectiveMap g = random_near_identity(rng, n, 0.12);
      try {
        const TransformedDomain mapped(sc.domain, g);
        const CVec a = interior_point(dom, sc.basepoint, rng, 0.85);
        const CVec b = interior_point(dom, sc.basepoint, rng, 0.85);
        const double d0 = hilbert_distance_chart(dom, a, b);
        const double d1 = hilbert_distance(
            mapped, g.apply(dom.chart().point(a)), g.apply(dom.chart().point(b)));
        Runner::tally(r, 1e-9 - std::abs(d1 - d0) / std::max(1.0, d0));
      } catch (const DegenerateChord&) {
        // The random map pushed the domain across the chart; not a metric failure.
      }
    }
  });

  run.check("ellipsoid_oracle", [&](CheckResult& r) {
    const auto* ell = dynamic_cast<const EllipsoidDomain*>(&dom);
    if (ell == nullptr) {
      Runner::skip(r, "domain is not an ellipsoid");
      return;
    }
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 2000; ++trial) {
      const CVec a = interior_point(dom, sc.basepoint, rng);
      const CVec b = interior_point(dom, sc.basepoint, rng);
      const ProjectivePoint pa = dom.chart().point(a), pb = dom.chart().point(b);
      const double d = hilbert_distance(dom, pa, pb);
      const double k = ell->klein_distance(pa, pb);
      Runner::tally(r, 1e-9 - std::abs(d - k) / std::max(1e-9, k));
    }
  });

  run.check("domain_monotonicity", [&](CheckResult& r) {
    if (dom.kind() != "ellipsoid" || n != 2) {
      Runner::skip(r, "needs the disc model with an inscribed horoball");
      return;
    }
    const EllipsoidDomain horo = klein_horoball(2, -0.4);
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 200; ++trial) {
      const CVec a = interior_point(horo, horo.basepoint(), rng, 0.9);
      const CVec b = interior_point(horo, horo.basepoint(), rng, 0.9);
      Runner::tally(r, hilbert_distance_chart(horo, a, b) -
                           hilbert_distance_chart(dom, a, b) + 1e-9);
    }
  });

  run.check("chord_equivariance", [&](CheckResult& r) {
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 40; ++trial) {
      const ProjectiveMap g = random_near_identity(rng, n, 0.1);
      try {
        const TransformedDomain mapped(sc.domain, g);
        const CVec x = interior_point(dom, sc.basepoint, rng, 0.7);
        const CVec v = random_dir(rng, n);
        const Chord ch = dom.chord_chart(x, v);
        const ProjectivePoint gx = g.apply(dom.chart().point(x));
        const CVec gxc = mapped.chart().to_chart(gx);
        const CVec gv =
            mapped.chart().to_chart(g.apply(dom.chart().point(CVec(x + 1e-4 * v)))) - gxc;
        const Chord gch = mapped.chord_chart(gxc, gv);
        const double slack_a = 1e-9 - (mapped.chart().to_chart(gch.a) -
                                       mapped.chart().to_chart(g.apply(ch.a))).norm();
        const double slack_b = 1e-9 - (mapped.chart().to_chart(gch.b) -
                                       mapped.chart().to_chart(g.apply(ch.b))).norm();
        Runner::tally(r, slack_a);
        Runner::tally(r, slack_b);
      } catch (const DegenerateChord&) {
      }
    }
  });

  run.check("finsler_consistency", [&](CheckResult& r) {
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 300; ++trial) {
      const CVec x = interior_point(dom, sc.basepoint, rng, 0.85);
      const CVec v = random_dir(rng, n);
      const double f = finsler_norm_chart(dom, x, v);
      Runner::tally(r, 1e-12 - std::abs(finsler_norm_chart(dom, x, CVec(-v)) - f));
      const double t = tol().finsler_fd_step;
      const double fd = (hilbert_distance_chart(dom, x, CVec(x + t * v)) +
                         hilbert_distance_chart(dom, x, CVec(x - t * v))) /
                        (2.0 * t);
      Runner::tally(r, tol().finsler_fd - std::abs(fd - f) / std::max(1.0, f));
    }
  });

  run.check("geodesic_additivity", [&](CheckResult& r) {
    auto rng = check_rng(sc, r.name);
    std::uniform_real_distribution<double> sdist(0.0, 6.0);
    for (int trial = 0; trial < 150; ++trial) {
      const CVec x = interior_point(dom, sc.basepoint, rng, 0.6);
      const CVec v = random_dir(rng, n);
      const Chord ch = dom.chord_chart(x, v);
      const BoundaryPoint xi{ch.b, BoundaryPoint::Provenance::chord_endpoint};
      const ProjectivePoint px = dom.chart().point(x);
      const double s = sdist(rng);
      const ProjectivePoint y = geodesic_point(dom, px, xi, s);
      Runner::tally(r, 1e-9 - std::abs(hilbert_distance(dom, px, y) - s));
    }
  });

  run.check("orbit_hull_depth_monotonicity", [&](CheckResult& r) {
    const auto* hull = dynamic_cast<const OrbitHullDomain*>(&dom);
    if (hull == nullptr || !run.scene.group) {
      Runner::skip(r, "domain is not an orbit hull");
      return;
    }
    const int depth = hull->depth();
    if (depth < 2) {
      Runner::skip(r, "depth too small");
      return;
    }
    const OrbitHullDomain shallower(run.scene.group->group,
                                    *run.scene.group->preferred_basepoint, depth - 1,
                                    dom.chart());
    for (const auto& v : shallower.vertices()) {
      Runner::tally(r, hull->margin(v) + 1e-10);
    }
  });
}

void suite_busemann(Runner& run) {
  const Scene& sc = run.scene;
  const ConvexDomain& dom = *sc.domain;
  const int n = dom.dim();
  const bool ellipsoid = dynamic_cast<const EllipsoidDomain*>(&dom) != nullptr;

  auto boundary_point = [&](std::mt19937_64& rng) {
    const CVec b = dom.chart().to_chart(sc.basepoint);
    const Chord ch = dom.chord_chart(b, random_dir(rng, n));
    return BoundaryPoint{ch.b, BoundaryPoint::Provenance::chord_endpoint};
  };

  run.check("busemann_base_zero", [&](CheckResult& r) {
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 30; ++trial) {
      const BoundaryPoint xi = boundary_point(rng);
      const BusemannValue v = busemann(dom, sc.basepoint, xi, sc.basepoint);
      Runner::tally(r, v.value == 0.0 ? 0.0 : -std::abs(v.value));
    }
  });

  run.check("busemann_lipschitz", [&](CheckResult& r) {
    if (!ellipsoid) {
      Runner::skip(r, "tight tolerance calibrated on ellipsoids");
      return;
    }
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 400; ++trial) {
      const BoundaryPoint xi = boundary_point(rng);
      const CVec a = interior_point(dom, sc.basepoint, rng);
      const CVec b = interior_point(dom, sc.basepoint, rng);
      const double ba = busemann(dom, sc.basepoint, xi, dom.chart().point(a)).value;
      const double bb = busemann(dom, sc.basepoint, xi, dom.chart().point(b)).value;
      Runner::tally(r, hilbert_distance_chart(dom, a, b) - std::abs(ba - bb) + 1e-8);
    }
  });

  run.check("busemann_closed_form_match", [&](CheckResult& r) {
    const auto* ell = dynamic_cast<const EllipsoidDomain*>(&dom);
    if (ell == nullptr) {
      Runner::skip(r, "closed form exists on ellipsoids only");
      return;
    }
    auto rng = check_rng(sc, r.name);
    const ProjectiveMap w = ell->normalizing_map();
    const AffineChart klein = AffineChart::standard(n);
    const HyperbolicPoint o = HyperbolicPoint::from_klein(klein.to_chart(w.apply(sc.basepoint)));
    for (int trial = 0; trial < 200; ++trial) {
      const BoundaryPoint xi = boundary_point(rng);
      const CVec y = interior_point(dom, sc.basepoint, rng);
      const BusemannValue bv = busemann(dom, sc.basepoint, xi, dom.chart().point(y));
      const IdealPoint kxi = IdealPoint::from_klein_dir(klein.to_chart(w.apply(xi.point)));
      const HyperbolicPoint ky = HyperbolicPoint::from_klein(
          klein.to_chart(w.apply(dom.chart().point(y))));
      Runner::tally(r, 1e-6 - std::abs(bv.value - busemann_hyperbolic(o, kxi, ky)));
    }
  });

  run.check("busemann_convexity", [&](CheckResult& r) {
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 150; ++trial) {
      const BoundaryPoint xi = boundary_point(rng);
      const CVec a = interior_point(dom, sc.basepoint, rng, 0.85);
      const CVec b = interior_point(dom, sc.basepoint, rng, 0.85);
      const double d = hilbert_distance_chart(dom, a, b);
      if (d < 1e-5) continue;
      const ProjectivePoint pa = dom.chart().point(a), pb = dom.chart().point(b);
      const Chord ch = dom.chord_through(pa, pb);
      const ProjectivePoint mid = geodesic_point(
          dom, pa, BoundaryPoint{ch.b, BoundaryPoint::Provenance::chord_endpoint}, 0.5 * d);
      try {
        const double va = busemann(dom, sc.basepoint, xi, pa).value;
        const double vb = busemann(dom, sc.basepoint, xi, pb).value;
        const double vm = busemann(dom, sc.basepoint, xi, mid).value;
        Runner::tally(r, 0.5 * (va + vb) - vm + 1e-8);
      } catch (const NonConvergent&) {
        // Facet of an approximating hull; the gate reports, not fails.
      }
    }
  });

  run.check("horoball_convexity", [&](CheckResult& r) {
    if (!ellipsoid) {
      Runner::skip(r, "horoball sampling calibrated on ellipsoids");
      return;
    }
    auto rng = check_rng(sc, r.name);
    const BoundaryPoint xi = boundary_point(rng);
    const Horoball hb{xi, sc.basepoint, -0.3};
    int used = 0;
    for (int trial = 0; trial < 400 && used < 60; ++trial) {
      const CVec a = interior_point(dom, sc.basepoint, rng);
      const CVec b = interior_point(dom, sc.basepoint, rng);
      const ProjectivePoint pa = dom.chart().point(a), pb = dom.chart().point(b);
      if (!hb.contains(dom, pa) || !hb.contains(dom, pb)) continue;
      ++used;
      const double d = hilbert_distance_chart(dom, a, b);
      if (d < 1e-6) continue;
      const Chord ch = dom.chord_through(pa, pb);
      const ProjectivePoint mid = geodesic_point(
          dom, pa, BoundaryPoint{ch.b, BoundaryPoint::Provenance::chord_endpoint}, 0.5 * d);
      Runner::tally(r, hb.contains(dom, mid) ? 0.0 : -1.0);
    }
  });
}

void suite_measures(Runner& run) {
  const Scene& sc = run.scene;
  const ConvexDomain& dom = *sc.domain;
  const int n = dom.dim();

  run.check("visual_mass_and_symmetry", [&](CheckResult& r) {
    const int N = 4096;
    const BoundaryMeasure nu = visual_measure(HyperbolicPoint::origin(n), N, sc.seed);
    Runner::tally(r, 1e-12 - std::abs(nu.total_mass() - sphere_area(n)) / sphere_area(n));
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 12; ++trial) {
      const CVec a = random_dir(rng, n);
      const auto h = HalfspaceAtInfinity::from_chart(a, 0.0);
      Runner::tally(r, 2.0 / std::sqrt(double(N)) -
                           std::abs(halfspace_mass(nu, h) / nu.total_mass() - 0.5));
    }
  });

  run.check("mass_additivity", [&](CheckResult& r) {
    const BoundaryMeasure nu = visual_measure(HyperbolicPoint::origin(n), 2048, sc.seed + 1);
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 20; ++trial) {
      const CVec a = random_dir(rng, n);
      const auto h = HalfspaceAtInfinity::from_chart(a, 0.1);
      const double inside = halfspace_mass(nu, h, true);
      const double outside = halfspace_mass(nu, HalfspaceAtInfinity{Vec(-h.w)}, false);
      Runner::tally(r, 1e-12 - std::abs(inside + outside - nu.total_mass()) / nu.total_mass());
    }
  });

  run.check("visual_equivariance", [&](CheckResult& r) {
    const int N = 8192;
    auto rng = check_rng(sc, r.name);
    const HyperbolicPoint y = HyperbolicPoint::origin(n);
    const Mat g = random_isometry(n, sc.seed + 2);
    const HyperbolicPoint gy = HyperbolicPoint::from_vector(Vec(g * y.x));
    const BoundaryMeasure pushed =
        Correspondence::projective(ProjectiveMap(g)).push(visual_measure(y, N, sc.seed + 3));
    const BoundaryMeasure direct = visual_measure(gy, N, sc.seed + 4);
    for (int trial = 0; trial < 10; ++trial) {
      const CVec a = random_dir(rng, n);
      const auto h = HalfspaceAtInfinity::from_chart(a, 0.05);
      Runner::tally(r, 4.0 / std::sqrt(double(N)) -
                           std::abs(halfspace_mass(pushed, h) / pushed.total_mass() -
                                    halfspace_mass(direct, h) / direct.total_mass()));
    }
  });

  if (!sc.group) {
    run.check("ps_family", [&](CheckResult& r) { Runner::skip(r, "scene has no group"); });
    return;
  }

  run.check("ps_normalization_and_atoms", [&](CheckResult& r) {
    const double R = sc.knob("ps", "R_max_unit", 8.0);
    const OrbitBall orbit = orbit_ball(dom, sc.group->group, sc.basepoint, R);
    PsParams ps{sc.knob("ps", "s", 1.2), R, sc.seed};
    const BoundaryMeasure mu = ps_approximant(dom, orbit, sc.basepoint, sc.basepoint, ps);
    Runner::tally(r, 1e-9 - std::abs(mu.total_mass() - 1.0));
    Runner::tally(r, 0.5 * mu.total_mass() - mu.max_atom_weight());
    for (size_t i = 0; i < mu.atoms().size(); i += std::max<size_t>(1, mu.atoms().size() / 64)) {
      const CVec c = dom.chart().to_chart(mu.atoms()[i].point);
      Runner::tally(r, 1e-9 - std::abs(dom.margin(c)));
    }
  });

  run.check("ps_transformation_band", [&](CheckResult& r) {
    const double R = sc.knob("ps", "R_max_unit", 8.0);
    const OrbitBall orbit = orbit_ball(dom, sc.group->group, sc.basepoint, R);
    PsParams ps{sc.knob("ps", "s", 1.2), R, sc.seed};
    auto rng = check_rng(sc, r.name);
    long outside_band = 0, within_double = 0;
    for (int trial = 0; trial < 25; ++trial) {
      const CVec x = interior_point(dom, sc.basepoint, rng, 0.4);
      const CVec y = interior_point(dom, sc.basepoint, rng, 0.4);
      const double d = hilbert_distance_chart(dom, x, y);
      const BoundaryMeasure mx = ps_approximant(dom, orbit, dom.chart().point(x), sc.basepoint, ps);
      const BoundaryMeasure my = ps_approximant(dom, orbit, dom.chart().point(y), sc.basepoint, ps);
      const auto h = HalfspaceAtInfinity::from_chart(random_dir(rng, n), 0.1);
      const double ma = halfspace_mass(mx, h), mb = halfspace_mass(my, h);
      if (mb < 0.02 * my.total_mass() || ma < 0.02 * mx.total_mass()) continue;
      const double log_ratio = std::abs(std::log(ma / mb));
      ++r.trials;
      if (log_ratio > ps.s * d + std::log(1.25)) {
        ++outside_band;
        if (log_ratio > ps.s * d + std::log(2.0)) {
          ++within_double;
          ++r.violations;
        }
      }
      r.worst_margin = std::min(r.worst_margin, ps.s * d + std::log(2.0) - log_ratio);
    }
    if (r.trials > 0 && outside_band > std::max<long>(1, r.trials / 100)) {
      r.note = "band exceeded on " + std::to_string(outside_band) + "/" +
               std::to_string(r.trials) + " trials (allowed within 2x band)";
    }
  });

  run.check("ps_refinement_stability", [&](CheckResult& r) {
    const double R = sc.knob("ps", "R_max_unit", 8.0);
    auto rng = check_rng(sc, r.name);
    const CVec x = interior_point(dom, sc.basepoint, rng, 0.3);
    const auto h = HalfspaceAtInfinity::from_chart(random_dir(rng, n), 0.1);
    double prev = -1.0;
    for (double rr : {R - 1.5, R}) {
      const OrbitBall orbit = orbit_ball(dom, sc.group->group, sc.basepoint, rr);
      PsParams ps{sc.knob("ps", "s", 1.2), rr, sc.seed};
      const BoundaryMeasure mu = ps_approximant(dom, orbit, dom.chart().point(x), sc.basepoint, ps);
      const double frac = halfspace_mass(mu, h) / mu.total_mass();
      if (prev >= 0.0) Runner::tally(r, tol().ps_refine_band - std::abs(frac - prev));
      prev = frac;
    }
  });

  run.check("pushforward_mass_preservation", [&](CheckResult& r) {
    const double R = sc.knob("ps", "R_max_unit", 7.0);
    auto orbit = std::make_shared<OrbitBall>(orbit_ball(dom, sc.group->group, sc.basepoint, R));
    PsParams ps{sc.knob("ps", "s", 1.2), R, sc.seed};
    const BoundaryMeasure mu = ps_approximant(dom, *orbit, sc.basepoint, sc.basepoint, ps);
    const BoundaryMeasure idp = Correspondence::identity(n).push(mu);
    Runner::tally(r, 1e-15 - std::abs(idp.total_mass() - mu.total_mass()));
    if (sc.group->tri_p) {
      const auto tri = sc.group->tri_r
                           ? triangle_group(*sc.group->tri_p, *sc.group->tri_q, *sc.group->tri_r)
                           : triangle_group_ideal(*sc.group->tri_p, *sc.group->tri_q);
      const Correspondence relabel = Correspondence::orbit_relabel(
          orbit, tri.group, HyperbolicPoint::from_vector(tri.incenter.coords()));
      const BoundaryMeasure pushed = relabel.push(mu);
      Runner::tally(r, 1e-12 - std::abs(pushed.total_mass() - mu.total_mass()));
    }
  });
}

void suite_barycenter(Runner& run) {
  const Scene& sc = run.scene;
  const int n = sc.domain->dim();
  const HyperbolicPoint origin = HyperbolicPoint::origin(n);

  run.check("bar_symmetric_atoms", [&](CheckResult& r) {
    std::vector<BoundaryAtom> atoms;
    for (int k = 0; k < 3; ++k) {
      CVec u = CVec::Zero(n);
      u[0] = std::cos(2.0 * M_PI * k / 3.0);
      u[1] = std::sin(2.0 * M_PI * k / 3.0);
      atoms.push_back({ProjectivePoint(IdealPoint::from_klein_dir(u).xi), 1.0, -1});
    }
    const BarycenterResult b = bar(BoundaryMeasure(std::move(atoms), MeasureTag::visual), origin);
    Runner::tally(r, 1e-8 - b.point.klein().norm());
  });

  run.check("bar_visual_identity", [&](CheckResult& r) {
    auto rng = check_rng(sc, r.name);
    std::uniform_real_distribution<double> unif(-0.55, 0.55);
    for (int trial = 0; trial < 8; ++trial) {
      CVec k(n);
      for (int i = 0; i < n; ++i) k[i] = unif(rng);
      if (k.squaredNorm() >= 0.8) continue;
      const HyperbolicPoint y = HyperbolicPoint::from_klein(k);
      const BarycenterResult b = bar(visual_measure(y, 4096, sc.seed + trial), origin);
      Runner::tally(r, 0.05 - hyp_distance(b.point, y));
    }
  });

  run.check("bar_equivariance_and_homogeneity", [&](CheckResult& r) {
    const BoundaryMeasure nu = visual_measure(HyperbolicPoint::from_klein(
        CVec(0.25 * CVec::Ones(n))), 512, sc.seed);
    const BarycenterResult base = bar(nu, origin);
    auto rng = check_rng(sc, r.name);
    for (int trial = 0; trial < 10; ++trial) {
      const Mat g = random_isometry(n, sc.seed + 100 + trial);
      const BarycenterResult moved =
          bar(Correspondence::projective(ProjectiveMap(g)).push(nu), origin);
      Runner::tally(r, 1e-7 - hyp_distance(moved.point,
                                           HyperbolicPoint::from_vector(Vec(g * base.point.x))));
    }
    const BarycenterResult scaled = bar(nu.scaled(7.3), origin);
    Runner::tally(r, 1e-9 - hyp_distance(scaled.point, base.point));
  });

  run.check("lemma_bar_within_D_of_heavy_halfspace", [&](CheckResult& r) {
    const double D = halfspace_control_D(n);
    auto rng = check_rng(sc, r.name);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int done = 0;
    for (int trial = 0; trial < 4000 && done < 1000; ++trial) {
      std::vector<BoundaryAtom> atoms;
      double cap = 0.0, total = 0.0;
      for (int k = 0; k < 30; ++k) {
        const CVec u = random_dir(rng, n);
        const double w = 0.1 + u01(rng);
        atoms.push_back({ProjectivePoint(IdealPoint::from_klein_dir(u).xi), w, -1});
        total += w;
        if (u[0] <= 0.0) cap += w;
      }
      if (cap <= (2.0 / 3.0) * total) continue;
      ++done;
      CVec a = CVec::Zero(n);
      a[0] = 1.0;
      const auto h = HalfspaceAtInfinity::from_chart(a, 0.0);
      const BarycenterResult b = bar(BoundaryMeasure(std::move(atoms), MeasureTag::mixture), origin);
      Runner::tally(r, D + 1e-6 - h.distance(b.point));
    }
  });

  run.check("mixture_continuity", [&](CheckResult& r) {
    if (!sc.group) {
      Runner::skip(r, "scene has no group");
      return;
    }
    const auto* ell = dynamic_cast<const EllipsoidDomain*>(sc.domain.get());
    if (ell == nullptr) {
      Runner::skip(r, "interior map needs an ellipsoid domain");
      return;
    }
    const double R = sc.knob("ps", "R_max_unit", 8.0);
    auto orbit = std::make_shared<OrbitBall>(
        orbit_ball(*sc.domain, sc.group->group, sc.basepoint, R));
    PsParams ps{sc.knob("ps", "s", 1.15), R, sc.seed};
    const Correspondence corr = Correspondence::projective(ell->normalizing_map());
    auto rng = check_rng(sc, r.name);
    const CVec x = interior_point(*sc.domain, sc.basepoint, rng, 0.3);
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
    const HomotopyTrack track = homotopy_track(*sc.domain, *orbit, sc.domain->chart().point(x),
                                               sc.basepoint, ps, corr, grid, 2048, sc.seed);
    double cmax = 0.0;
    for (size_t i = 1; i < track.points.size(); ++i) {
      const double dt = track.points[i].t - track.points[i - 1].t;
      cmax = std::max(cmax, hyp_distance(track.points[i].point, track.points[i - 1].point) / dt);
    }
    r.note = "max step ratio C = " + std::to_string(cmax);
    Runner::tally(r, 100.0 - cmax);
  });
}

void suite_cusp(Runner& run) {
  const Scene& sc = run.scene;
  const ConvexDomain& dom = *sc.domain;
  const int n = dom.dim();

  run.check("relation_residuals", [&](CheckResult& r) {
    if (!sc.group) {
      Runner::skip(r, "scene has no group");
      return;
    }
    Runner::tally(r, tol().relation_residual - sc.group->group.relation_residual());
  });

  run.check("orbit_prune_brute_force_equality", [&](CheckResult& r) {
    if (!sc.group) {
      Runner::skip(r, "scene has no group");
      return;
    }
    const double R = 1.5;
    const OrbitBall ball = orbit_ball(dom, sc.group->group, sc.basepoint, R);
    // Unpruned enumeration to a settled word depth.
    std::vector<ProjectivePoint> pts{sc.basepoint};
    std::vector<ProjectivePoint> frontier{sc.basepoint};
    size_t count_prev = 0, count = 1;
    for (int level = 0; level < 24; ++level) {
      std::vector<ProjectivePoint> next;
      for (const auto& p : frontier) {
        for (int gi = 0; gi < sc.group->group.num_generators(); ++gi) {
          const ProjectivePoint q = sc.group->group.gen(gi).apply(p);
          bool seen = false;
          for (const auto& s : pts) seen = seen || s.approx_equal(q, 1e-9);
          if (!seen && hilbert_distance(dom, sc.basepoint, q) <= R + 1.0) {
            pts.push_back(q);
            next.push_back(q);
          }
        }
      }
      frontier = std::move(next);
      count_prev = count;
      count = 0;
      for (const auto& p : pts) count += hilbert_distance(dom, sc.basepoint, p) <= R ? 1 : 0;
      if (level > 6 && count == count_prev && frontier.empty()) break;
    }
    Runner::tally(r, ball.size() == count ? 0.0 : -(double)std::llabs((long long)ball.size() -
                                                                      (long long)count));
  });

  const bool have_parabolic = sc.group && !sc.group->parabolic_gens.empty() && sc.group->cusp;
  if (!have_parabolic) {
    run.check("short_loop_horoballs", [&](CheckResult& r) {
      Runner::skip(r, "scene has no parabolic cusp data");
    });
    return;
  }

  const BoundaryPoint theta = make_boundary_point(dom, *sc.group->cusp);

  run.check("short_loop_horoballs", [&](CheckResult& r) {
    for (double eps0 : {0.2, 0.1, 0.05}) {
      const Horoball h =
          short_loop_horoball(dom, sc.group->parabolic_gens, theta, eps0, sc.basepoint);
      // Certified level: fresh samples along the horosphere stay below eps0.
      const ProjectivePoint base = geodesic_point(dom, sc.basepoint, theta, -h.level);
      for (const auto& p : sc.group->parabolic_gens) {
        ProjectivePoint x = base;
        for (int k = 0; k < 12; ++k) {
          Runner::tally(r, eps0 - displacement(dom, p, x));
          x = p.apply(x);
        }
      }
    }
  });

  run.check("parabolic_classification", [&](CheckResult& r) {
    for (const auto& p : sc.group->parabolic_gens) {
      const IsometryClass cls = classify(dom, p);
      Runner::tally(r, cls.kind == IsometryClass::Kind::parabolic ? 0.0 : -1.0);
      Runner::tally(r, cls.attained ? -1.0 : 0.0);
    }
  });

  run.check("osculating_ellipsoids", [&](CheckResult& r) {
    const auto* ell = dynamic_cast<const EllipsoidDomain*>(&dom);
    if (ell == nullptr || n != 2) {
      Runner::skip(r, "model-case check runs on the disc");
      return;
    }
    const auto self = osculating_ellipsoids(*ell, dom, *ell, theta);
    Runner::tally(r, self.pass() ? 0.0 : -1.0);
    // Horoball-shaped inner ellipsoid tangent at the cusp.
    const CVec ct = dom.chart().to_chart(theta.point);
    // Rotate the standard e1-tangent horoball onto the cusp direction.
    const double ang = std::atan2(ct[1], ct[0]);
    Mat rot = Mat::Identity(3, 3);
    rot(0, 0) = std::cos(ang);
    rot(0, 1) = -std::sin(ang);
    rot(1, 0) = std::sin(ang);
    rot(1, 1) = std::cos(ang);
    EllipsoidDomain horo = klein_horoball(2, -0.4).transformed(ProjectiveMap(rot));
    const auto ok = osculating_ellipsoids(horo, dom, *ell, theta);
    Runner::tally(r, ok.pass() ? 0.0 : -1.0);
    // Negative control: a shifted inner ellipsoid loses tangency.
    Mat shift = Mat::Identity(3, 3);
    shift(0, 2) = -0.06;
    const auto bad = osculating_ellipsoids(horo.transformed(ProjectiveMap(shift)), dom, *ell, theta);
    Runner::tally(r, bad.tangent_inner ? -1.0 : 0.0);
  });

  run.check("deep_visual_halfspace_mass", [&](CheckResult& r) {
    // A halfspace whose cap contains the cusp point soaks up two thirds of
    // the visual measure once the point is deep enough in the horoball.
    const auto* ell = dynamic_cast<const EllipsoidDomain*>(&dom);
    if (ell == nullptr) {
      Runner::skip(r, "runs on the hyperbolic model");
      return;
    }
    const ProjectiveMap w = ell->normalizing_map();
    const AffineChart klein = AffineChart::standard(n);
    const CVec u = klein.to_chart(w.apply(theta.point));
    const auto h = HalfspaceAtInfinity::from_chart(u, 0.5);  // cap holds the cusp strictly
    double depth = 2.0;
    bool found = false;
    for (; depth <= 12.0; depth += 1.0) {
      const ProjectivePoint y = geodesic_point(dom, sc.basepoint, theta, depth);
      const HyperbolicPoint ky = HyperbolicPoint::from_klein(klein.to_chart(w.apply(y)));
      const BoundaryMeasure nu = visual_measure(ky, 4096, sc.seed + 9);
      if (halfspace_mass(nu, h) > (2.0 / 3.0) * nu.total_mass()) {
        found = true;
        break;
      }
    }
    Runner::tally(r, found ? 0.0 : -1.0);
    if (found) {
      // Stays above two thirds deeper in.
      for (double extra : {1.0, 2.0}) {
        const ProjectivePoint y = geodesic_point(dom, sc.basepoint, theta, depth + extra);
        const HyperbolicPoint ky = HyperbolicPoint::from_klein(klein.to_chart(w.apply(y)));
        const BoundaryMeasure nu = visual_measure(ky, 4096, sc.seed + 10);
        Runner::tally(r, halfspace_mass(nu, h) / nu.total_mass() - 2.0 / 3.0);
      }
      r.note = "certified depth " + std::to_string(depth);
    }
  });
}

void suite_eccentricity(Runner& run) {
  const Scene& sc = run.scene;
  const ConvexDomain& dom = *sc.domain;
  const int n = dom.dim();

  run.check("eccentricity_bounds", [&](CheckResult& r) {
    std::vector<ProjectivePoint> pts = sc.points;
    if (pts.empty()) {
      auto rng = check_rng(sc, r.name);
      for (int i = 0; i < 8; ++i) {
        pts.push_back(dom.chart().point(interior_point(dom, sc.basepoint, rng, 0.6)));
      }
    }
    const EccentricityReport rep = eccentricity(dom, pts);
    const bool ellipsoid = dynamic_cast<const EllipsoidDomain*>(&dom) != nullptr;
    for (const auto& p : rep.points) {
      Runner::tally(r, p.N_value - 1.0 + 1e-9);
      const double kpow = std::pow(p.K_value, 2 * n);
      Runner::tally(r, kpow + 1e-9 - p.N_value);
      Runner::tally(r, p.N_value - 1.0 / kpow + 1e-9);
      if (ellipsoid) Runner::tally(r, 1e-6 - std::abs(p.N_value - 1.0));
    }
    r.note = "N_sup = " + std::to_string(rep.N_sup) + ", K_sup = " + std::to_string(rep.K_sup);
  });
}

}  // namespace

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["violations"] = total_violations();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["trials"] = c.trials;
    cj["violations"] = c.violations;
    cj["worst_margin"] = c.worst_margin;
    if (!c.note.empty()) cj["note"] = c.note;
    j["checks"].push_back(cj);
  }
  return j;
}

std::vector<std::string> suite_names() {
  return {"metric", "busemann", "measures", "barycenter", "cusp", "eccentricity", "all"};
}

SuiteReport run_suite(const Scene& scene, const std::string& suite) {
  SuiteReport report;
  report.suite = suite;
  Runner run{scene, report};
  bool known = false;
  if (suite == "metric" || suite == "all") {
    suite_metric(run);
    known = true;
  }
  if (suite == "busemann" || suite == "all") {
    suite_busemann(run);
    known = true;
  }
  if (suite == "measures" || suite == "all") {
    suite_measures(run);
    known = true;
  }
  if (suite == "barycenter" || suite == "all") {
    suite_barycenter(run);
    known = true;
  }
  if (suite == "cusp" || suite == "all") {
    suite_cusp(run);
    known = true;
  }
  if (suite == "eccentricity" || suite == "all") {
    suite_eccentricity(run);
    known = true;
  }
  if (!known) throw SchemaError("unknown suite '" + suite + "'");
  return report;
}

}  // namespace hilbert
