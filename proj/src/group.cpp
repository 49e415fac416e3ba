#include "hilbert/group.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hilbert {

ProjectiveGroup::ProjectiveGroup(std::string label, std::vector<ProjectiveMap> generators,
                                 std::vector<Word> relations)
    : label_(std::move(label)), generators_(std::move(generators)), relations_(std::move(relations)) {
  if (generators_.empty()) throw InvalidMap("group needs at least one generator");
  for (const auto& g : generators_) {
    if (g.dim() != generators_[0].dim()) throw InvalidMap("generator dimensions differ");
  }
}

ProjectiveMap ProjectiveGroup::evaluate(const Word& w) const {
  ProjectiveMap m = ProjectiveMap::identity(dim());
  for (int32_t letter : w) m = m.compose(gen(letter));
  return m;
}

double ProjectiveGroup::relation_residual() const {
  double worst = 0.0;
  const int n1 = dim() + 1;
  for (const auto& w : relations_) {
    const Mat m = evaluate(w).matrix();
    const double lambda = m.trace() / n1;
    worst = std::max(worst, (m - lambda * Mat::Identity(n1, n1)).norm() / m.norm());
  }
  return worst;
}

namespace {

// Spatial hash on quantized canonical coordinates, equality by projective
// distance. Cells are far finer than the minimal separation of distinct
// orbit points, so probing the 3^k neighbor cells is exact in practice.
class PointDedup {
 public:
  PointDedup(int n1, double cell, double eq_tol) : n1_(n1), cell_(cell), eq_tol_(eq_tol) {}

  // Returns (index, inserted). The caller owns the coordinate store.
  std::pair<int32_t, bool> insert(const Vec& canonical, std::vector<Vec>& store) {
    int32_t found = find(canonical, store);
    if (found >= 0) return {found, false};
    const int32_t id = static_cast<int32_t>(store.size());
    store.push_back(canonical);
    map_.emplace(key_of(canonical), id);
    return {id, true};
  }

  int32_t find(const Vec& canonical, const std::vector<Vec>& store) const {
    int offs[kMaxDim + 1];
    for (int i = 0; i < n1_; ++i) offs[i] = -1;
    while (true) {
      const uint64_t k = key_of(canonical, offs);
      auto range = map_.equal_range(k);
      for (auto it = range.first; it != range.second; ++it) {
        const Vec& q = store[it->second];
        if (std::min((q - canonical).norm(), (q + canonical).norm()) <= eq_tol_) {
          return it->second;
        }
      }
      int i = 0;
      for (; i < n1_; ++i) {
        if (offs[i] < 1) {
          ++offs[i];
          break;
        }
        offs[i] = -1;
      }
      if (i == n1_) return -1;
    }
  }

 private:
  uint64_t key_of(const Vec& v, const int* offs = nullptr) const {
    uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < n1_; ++i) {
      const int64_t q = static_cast<int64_t>(std::floor(v[i] / cell_)) + (offs ? offs[i] : 0);
      h ^= static_cast<uint64_t>(q) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }

  int n1_;
  double cell_;
  double eq_tol_;
  std::unordered_multimap<uint64_t, int32_t> map_;
};

}  // namespace

std::vector<ProjectivePoint> ProjectiveGroup::orbit_points(const ProjectivePoint& seed,
                                                           int depth) const {
  const int n1 = dim() + 1;
  std::vector<Vec> store;
  PointDedup dedup(n1, 1e-12, 1e-12);
  dedup.insert(seed.coords(), store);
  std::vector<Vec> frontier{seed.coords()};
  for (int level = 0; level < depth; ++level) {
    std::vector<Vec> next;
    for (const auto& p : frontier) {
      for (const auto& g : generators_) {
        const Vec child = ProjectivePoint(Vec(g.matrix() * p)).coords();
        if (dedup.insert(child, store).second) next.push_back(child);
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  std::vector<ProjectivePoint> out;
  out.reserve(store.size());
  for (const auto& v : store) out.push_back(ProjectivePoint(v));
  return out;
}

void ProjectiveGroup::validate_preserves(const ConvexDomain& domain, int samples,
                                         uint64_t seed) const {
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> gauss;
  const CVec base = domain.chart().to_chart(domain.basepoint());
  for (int s = 0; s < samples; ++s) {
    CVec dir(domain.dim());
    for (int i = 0; i < dir.size(); ++i) dir[i] = gauss(rng);
    dir.normalize();
    const Chord ch = domain.chord_chart(base, dir);
    std::uniform_real_distribution<double> along(0.02, 0.98);
    const CVec c = base + (ch.t_minus + along(rng) * (ch.t_plus - ch.t_minus)) * ch.dir;
    const ProjectivePoint p(domain.chart().from_chart(c));
    for (const auto& g : generators_) {
      if (!domain.contains(g.apply(p))) {
        throw MapDoesNotPreserveDomain(label_ + ": generator moves an interior point outside");
      }
    }
  }
}

// ---------------------------------------------------------------------------

Word OrbitBall::word(size_t i) const {
  // Children are built by left multiplication, so reading letters from the
  // leaf to the root gives the word in evaluation order.
  Word w;
  int32_t cur = entries[i].node;
  while (cur >= 0 && tree_parent[cur] >= 0) {
    w.push_back(tree_letter[cur]);
    cur = tree_parent[cur];
  }
  return w;
}

size_t OrbitBall::count_within(double R) const {
  size_t c = 0;
  for (const auto& e : entries) {
    if (e.distance <= R) ++c;
  }
  return c;
}

double displacement(const ConvexDomain& domain, const ProjectiveMap& g,
                    const ProjectivePoint& x) {
  if (!domain.contains(x)) throw PointOutsideDomain("displacement");
  const ProjectivePoint gx = g.apply(x);
  if (!domain.contains(gx)) {
    throw MapDoesNotPreserveDomain("image of the point left the domain");
  }
  return hilbert_distance(domain, x, gx);
}

OrbitBall orbit_ball(const ConvexDomain& domain, const ProjectiveGroup& group,
                     const ProjectivePoint& o, double R_max, const OrbitOptions& options) {
  group.validate_preserves(domain);
  const int n1 = domain.dim() + 1;
  const CVec o_chart = domain.chart().to_chart(o);
  if (!(domain.margin(o_chart) > 0.0)) throw PointOutsideDomain("orbit_ball basepoint");

  double max_gen_disp = 0.0;
  for (const auto& g : group.generators()) {
    max_gen_disp = std::max(max_gen_disp, displacement(domain, g, o));
  }
  const double expand_limit = R_max + options.prune_buffer_factor * max_gen_disp;

  struct Node {
    double dist;
    int32_t parent;
    int32_t letter;
  };
  std::vector<Vec> store;        // canonical coords of every visited point
  std::vector<Node> nodes;       // parallel to store
  PointDedup dedup(n1, 1e-12, 1e-12);

  dedup.insert(o.coords(), store);
  nodes.push_back({0.0, -1, -1});
  std::vector<int32_t> frontier{0};

  const int k = group.num_generators();
  const auto& gens = group.generators();

  while (!frontier.empty()) {
    const size_t fsize = frontier.size();
    // Children computed in parallel into fixed slots; dedup is a serial pass
    // in slot order, so the result is identical for any thread count.
    std::vector<Vec> child_coords(fsize * k);
    std::vector<double> child_dist(fsize * k);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (options.parallel && fsize > 256)
#endif
    for (long long fi = 0; fi < static_cast<long long>(fsize); ++fi) {
      const Vec& parent = store[frontier[fi]];
      for (int gi = 0; gi < k; ++gi) {
        const size_t slot = static_cast<size_t>(fi) * k + gi;
        Vec child = ProjectivePoint(Vec(gens[gi].matrix() * parent)).coords();
        child_coords[slot] = child;
        const Vec lifted = child;
        child_dist[slot] = domain.chart().covers(lifted)
                               ? hilbert_distance_chart(domain, o_chart,
                                                        domain.chart().to_chart(lifted))
                               : std::numeric_limits<double>::infinity();
      }
    }
    std::vector<int32_t> next;
    for (size_t fi = 0; fi < fsize; ++fi) {
      for (int gi = 0; gi < k; ++gi) {
        const size_t slot = fi * k + gi;
        if (!std::isfinite(child_dist[slot]) || child_dist[slot] > expand_limit) continue;
        auto [id, inserted] = dedup.insert(child_coords[slot], store);
        if (!inserted) continue;
        nodes.push_back({child_dist[slot], frontier[fi], gi});
        next.push_back(id);
        if (store.size() > options.max_points) {
          throw BudgetExceeded("orbit enumeration exceeded the point budget");
        }
      }
    }
    frontier = std::move(next);
  }

  // Keep the metric ball; the full word tree stays for reconstruction.
  OrbitBall ball;
  ball.R_max = R_max;
  ball.tree_parent.reserve(nodes.size());
  ball.tree_letter.reserve(nodes.size());
  for (const auto& nd : nodes) {
    ball.tree_parent.push_back(nd.parent);
    ball.tree_letter.push_back(nd.letter);
  }
  for (size_t i = 0; i < store.size(); ++i) {
    if (nodes[i].dist <= R_max) {
      ball.entries.push_back({ProjectivePoint(store[i]), nodes[i].dist, static_cast<int32_t>(i)});
    }
  }
  if (ball.entries.empty()) throw OrbitTooSmall("no orbit points within R_max");
  return ball;
}

// ---------------------------------------------------------------------------

namespace {

// Coordinate pattern search on the displacement field. Returns the best
// chart point found and its value; stays strictly interior.
std::pair<CVec, double> minimize_displacement(const ConvexDomain& domain,
                                              const ProjectiveMap& g, const CVec& start,
                                              double step0, double step_min) {
  const int n = domain.dim();
  auto eval = [&](const CVec& c) {
    if (!(domain.margin(c) > 1e-13)) return std::numeric_limits<double>::infinity();
    const ProjectivePoint p(domain.chart().from_chart(c));
    const ProjectivePoint gp = g.apply(p);
    if (!domain.contains(gp)) return std::numeric_limits<double>::infinity();
    return hilbert_distance(domain, p, gp);
  };
  CVec best = start;
  double fbest = eval(start);
  double step = step0;
  int evals = 0;
  while (step > step_min && evals < 4000) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      for (double s : {step, -step}) {
        CVec cand = best;
        cand[i] += s;
        const double f = eval(cand);
        ++evals;
        if (f < fbest) {
          fbest = f;
          best = cand;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {best, fbest};
}

}  // namespace

IsometryClass classify(const ConvexDomain& domain, const ProjectiveMap& g) {
  // Metric classification: minimize the displacement over the domain, then
  // decide from where the minimizer sits and whether a boundary march keeps
  // improving. The matrix is never consulted.
  IsometryClass out;
  const CVec o = domain.chart().to_chart(domain.basepoint());
  auto [best, fbest] = minimize_displacement(domain, g, o, 0.25, 1e-6);

  const double margin_best = domain.margin(best);
  const double interior_margin = 0.05 * domain.margin(o);

  if (fbest < 1e-3 && margin_best > interior_margin) {
    out.kind = IsometryClass::Kind::elliptic_or_identity;
    out.displacement_infimum = fbest;
    out.attained = true;
    out.note = "displacement vanishes at an interior point";
    return out;
  }

  // Parabolic candidates for the fixed boundary point: the image of
  // (M - lambda I)^{n} collapses onto the fixed direction when the map is
  // projectively unipotent, and the drift direction of the minimizer covers
  // maps where that shortcut fails. The certificate stays metric: the
  // displacement must decay monotonically along the ray.
  std::vector<ProjectivePoint> candidates;
  {
    const int n1 = domain.dim() + 1;
    const Mat m = g.matrix();
    Mat shifted = m - (m.trace() / n1) * Mat::Identity(n1, n1);
    Mat power = Mat::Identity(n1, n1);
    for (int i = 0; i + 1 < n1; ++i) power = Mat(power * shifted);
    const Vec img = power * domain.basepoint().coords();
    if (img.norm() > 1e-10) candidates.push_back(ProjectivePoint(img));
  }
  if (margin_best <= interior_margin && (best - o).norm() > 1e-9) {
    candidates.push_back(domain.chord_chart(o, CVec(best - o)).b);
  }
  for (const auto& cand : candidates) {
    if (!domain.chart().covers(cand.coords())) continue;
    if (std::abs(domain.margin(domain.chart().to_chart(cand))) > 1e-6) continue;
    const BoundaryPoint xi{cand, BoundaryPoint::Provenance::orbit_limit};
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    double last = prev;
    try {
      for (double s = 2.0; s <= 12.0; s += 2.0) {
        const ProjectivePoint y = geodesic_point(domain, domain.basepoint(), xi, s);
        const double d = displacement(domain, g, y);
        if (d > prev + 1e-9) decreasing = false;
        prev = d;
        last = d;
      }
    } catch (const Error&) {
      continue;
    }
    if (decreasing && last < 1e-3) {
      out.kind = IsometryClass::Kind::parabolic;
      out.displacement_infimum = last;
      out.attained = false;
      out.note = "displacement decays toward a boundary point, infimum not realized";
      return out;
    }
  }

  if (fbest > 1e-3) {
    out.kind = IsometryClass::Kind::hyperbolic;
    out.displacement_infimum = fbest;
    out.attained = true;
    out.note = "positive displacement minimum attained on the axis";
    return out;
  }

  out.kind = IsometryClass::Kind::inconclusive;
  out.note = "no certificate found";
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Horosphere sample set: the orbit of the ray point under words in the
// parabolic generators (plus inverses), breadth-first up to the sample budget.
std::vector<ProjectivePoint> horosphere_samples(const ConvexDomain& domain,
                                                const std::vector<ProjectiveMap>& gens,
                                                const ProjectivePoint& base, int budget) {
  std::vector<ProjectiveMap> step = gens;
  for (const auto& g : gens) step.push_back(g.inverse());
  std::vector<Vec> store;
  PointDedup dedup(domain.dim() + 1, 1e-12, 1e-12);
  dedup.insert(base.coords(), store);
  std::vector<Vec> frontier{base.coords()};
  while (!frontier.empty() && static_cast<int>(store.size()) < budget) {
    std::vector<Vec> next;
    for (const auto& p : frontier) {
      for (const auto& g : step) {
        Vec child = ProjectivePoint(Vec(g.matrix() * p)).coords();
        // Genuinely parabolic orbits stay on the horosphere; anything that
        // drifts to the boundary numerically is dropped.
        if (!domain.chart().covers(child) ||
            !(domain.margin(domain.chart().to_chart(child)) > 1e-14)) {
          continue;
        }
        if (dedup.insert(child, store).second) next.push_back(child);
        if (static_cast<int>(store.size()) >= budget) break;
      }
      if (static_cast<int>(store.size()) >= budget) break;
    }
    frontier = std::move(next);
  }
  std::vector<ProjectivePoint> out;
  for (const auto& v : store) out.push_back(ProjectivePoint(v));
  return out;
}

}  // namespace

Horoball short_loop_horoball(const ConvexDomain& domain,
                             const std::vector<ProjectiveMap>& parabolic_gens,
                             const BoundaryPoint& theta, double eps0,
                             const ProjectivePoint& o, int horosphere_samples_budget) {
  if (!(eps0 > 0.0)) throw Error("eps0 must be positive");
  int evals = 0;
  auto level_ok = [&](double level) {
    ++evals;
    // Ray point at Busemann value `level` (geodesic parameter -level).
    const ProjectivePoint base = geodesic_point(domain, o, theta, -level);
    const auto samples = horosphere_samples(domain, parabolic_gens, base,
                                            horosphere_samples_budget);
    try {
      for (const auto& x : samples) {
        for (const auto& p : parabolic_gens) {
          if (displacement(domain, p, x) >= eps0) return false;
        }
      }
    } catch (const Error&) {
      // Orbit samples escaping the domain certify nothing.
      return false;
    }
    return true;
  };

  // Deepen until the displacement condition holds, then bisect. Chart
  // resolution bounds the usable depth; failure to certify within the
  // budget signals a non-parabolic input.
  double hi = 0.0;  // not yet known to work
  double lo = -1.0;
  while (true) {
    if (level_ok(lo)) break;
    hi = lo;
    lo *= 2.0;
    if (lo < -16.0 || evals > 60) {
      throw LevelNotFound("no horoball level satisfies the displacement bound");
    }
  }
  while (evals < 60 && hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (level_ok(mid) ? lo : hi) = mid;
  }
  // Conservative by one step: report the certified side.
  return Horoball{theta, o, lo};
}

OsculatingReport osculating_ellipsoids(const EllipsoidDomain& inner, const ConvexDomain& domain,
                                       const EllipsoidDomain& outer, const BoundaryPoint& theta,
                                       int samples, uint64_t seed) {
  OsculatingReport rep;
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = domain.dim();

  // Inner containment: random points of the inner ellipsoid lie in the domain.
  rep.inner_contained = true;
  rep.worst_inner_margin = std::numeric_limits<double>::infinity();
  const CVec ic = inner.chart().to_chart(inner.basepoint());
  for (int s = 0; s < samples; ++s) {
    CVec dir(n);
    for (int i = 0; i < n; ++i) dir[i] = gauss(rng);
    dir.normalize();
    const Chord ch = inner.chord_chart(ic, dir);
    const double t = ch.t_minus + (0.02 + 0.96 * unif(rng)) * (ch.t_plus - ch.t_minus);
    const ProjectivePoint p(inner.chart().from_chart(CVec(ic + t * ch.dir)));
    const double m = domain.margin(domain.chart().to_chart(p));
    rep.worst_inner_margin = std::min(rep.worst_inner_margin, m);
    if (!(m > -1e-10)) rep.inner_contained = false;
  }

  // Outer containment: domain boundary points lie inside the closure of outer.
  rep.outer_contains = true;
  rep.worst_outer_margin = std::numeric_limits<double>::infinity();
  const CVec dc = domain.chart().to_chart(domain.basepoint());
  for (int s = 0; s < samples; ++s) {
    CVec dir(n);
    for (int i = 0; i < n; ++i) dir[i] = gauss(rng);
    dir.normalize();
    const Chord ch = domain.chord_chart(dc, dir);
    const double m = outer.margin(outer.chart().to_chart(ch.b));
    rep.worst_outer_margin = std::min(rep.worst_outer_margin, m);
    if (!(m > -1e-10)) rep.outer_contains = false;
  }

  const double mi = inner.margin(inner.chart().to_chart(theta.point));
  const double mo = outer.margin(outer.chart().to_chart(theta.point));
  rep.tangent_inner = std::abs(mi) < 1e-8;
  rep.tangent_outer = std::abs(mo) < 1e-8;
  return rep;
}

}  // namespace hilbert
