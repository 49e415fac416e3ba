#include "hilbert/measures.hpp"

#include <cmath>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hilbert {

BoundaryMeasure::BoundaryMeasure(std::vector<BoundaryAtom> atoms, MeasureTag tag)
    : atoms_(std::move(atoms)), tag_(tag) {
  for (const auto& a : atoms_) {
    if (!(a.weight > 0.0)) throw Error("atom weights must be positive");
    total_mass_ += a.weight;
  }
}

double BoundaryMeasure::max_atom_weight() const {
  double m = 0.0;
  for (const auto& a : atoms_) m = std::max(m, a.weight);
  return m;
}

BoundaryMeasure BoundaryMeasure::scaled(double c) const {
  if (!(c > 0.0)) throw Error("scale must be positive");
  std::vector<BoundaryAtom> atoms = atoms_;
  for (auto& a : atoms) a.weight *= c;
  BoundaryMeasure out(std::move(atoms), tag_);
  out.ps_s = ps_s;
  out.ps_R_max = ps_R_max;
  out.ps_dropped = ps_dropped;
  return out;
}

BoundaryMeasure BoundaryMeasure::mixture(const BoundaryMeasure& a, double wa,
                                         const BoundaryMeasure& b, double wb) {
  std::vector<BoundaryAtom> atoms;
  atoms.reserve(a.atoms().size() + b.atoms().size());
  for (const auto& at : a.atoms()) {
    if (wa > 0.0) atoms.push_back({at.point, wa * at.weight, at.node});
  }
  for (const auto& at : b.atoms()) {
    if (wb > 0.0) atoms.push_back({at.point, wb * at.weight, at.node});
  }
  return BoundaryMeasure(std::move(atoms), MeasureTag::mixture);
}

BoundaryMeasure visual_measure(const HyperbolicPoint& y, int atom_count, uint64_t seed) {
  if (atom_count < 16) throw Error("visual_measure needs at least 16 atoms");
  const int n = y.dim();
  const Mat basis = tangent_basis(y);
  std::mt19937_64 rng(splitmix64(substream(seed, fnv1a("visual"))));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<BoundaryAtom> atoms;
  atoms.reserve(atom_count);
  const double w = sphere_area(n) / atom_count;
  auto push_dir = [&](const CVec& u) {
    Vec v = Vec::Zero(n + 1);
    for (int i = 0; i < n; ++i) v += u[i] * basis.col(i);
    const IdealPoint xi = ray_endpoint(y, v);
    atoms.push_back({ProjectivePoint(xi.xi), w, -1});
  };

  if (n == 2) {
    const double offset = unif(rng);
    for (int k = 0; k < atom_count; ++k) {
      const double theta = 2.0 * M_PI * (k + offset) / atom_count;
      CVec u(2);
      u << std::cos(theta), std::sin(theta);
      push_dir(u);
    }
  } else if (n == 3) {
    // Fibonacci sphere with a seeded rotation offset.
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double offset = unif(rng) * 2.0 * M_PI;
    for (int k = 0; k < atom_count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / atom_count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = 2.0 * M_PI * std::fmod(k / golden, 1.0) + offset;
      CVec u(3);
      u << r * std::cos(phi), r * std::sin(phi), z;
      push_dir(u);
    }
  } else {
    std::normal_distribution<double> gauss;
    for (int k = 0; k < atom_count; ++k) {
      CVec u(n);
      do {
        for (int i = 0; i < n; ++i) u[i] = gauss(rng);
      } while (u.norm() < 1e-6);
      u.normalize();
      push_dir(u);
    }
  }
  return BoundaryMeasure(std::move(atoms), MeasureTag::visual);
}

BoundaryMeasure ps_approximant(const ConvexDomain& domain, const OrbitBall& orbit,
                               const ProjectivePoint& x, const ProjectivePoint& o,
                               const PsParams& params) {
  if (orbit.size() < 2) throw OrbitTooSmall("orbit ball has fewer than 2 points");
  const CVec cx = domain.chart().to_chart(x);
  if (!(domain.margin(cx) > 0.0)) throw PointOutsideDomain("ps_approximant");
  const CVec co = domain.chart().to_chart(o);

  // Normalization from the basepoint: mass of mu_o is one.
  double z = 0.0;
  for (const auto& e : orbit.entries) {
    if ((domain.chart().to_chart(e.point) - co).norm() > 1e-12) {
      z += std::exp(-params.s * e.distance);
    }
  }
  if (!(z > 0.0)) throw OrbitTooSmall("empty normalization sum");

  const size_t m = orbit.size();
  std::vector<BoundaryAtom> atoms(m);
  std::vector<char> keep(m, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long i = 0; i < static_cast<long long>(m); ++i) {
    const auto& e = orbit.entries[i];
    if (e.node == 0) continue;  // the basepoint itself spans no ray
    const CVec target = domain.chart().to_chart(e.point);
    const CVec dir = target - cx;
    if (dir.norm() <= 1e-12) continue;  // orbit point coincides with x
    const Chord ch = domain.chord_chart(cx, dir);
    const double d = hilbert_distance_chart(domain, cx, target);
    atoms[i] = {ch.b, std::exp(-params.s * d) / z, e.node};
    keep[i] = 1;
  }
  std::vector<BoundaryAtom> kept;
  kept.reserve(m);
  int dropped = 0;
  for (size_t i = 0; i < m; ++i) {
    if (keep[i]) {
      kept.push_back(std::move(atoms[i]));
    } else {
      ++dropped;
    }
  }
  BoundaryMeasure out(std::move(kept), MeasureTag::patterson_sullivan);
  out.ps_s = params.s;
  out.ps_R_max = params.R_max;
  out.ps_dropped = dropped;
  return out;
}

Correspondence Correspondence::identity(int n) {
  Correspondence c;
  c.kind_ = Kind::identity;
  c.n_ = n;
  c.map_ = ProjectiveMap::identity(n);
  return c;
}

Correspondence Correspondence::projective(const ProjectiveMap& m) {
  Correspondence c;
  c.kind_ = Kind::projective;
  c.n_ = m.dim();
  c.map_ = m;
  return c;
}

Correspondence Correspondence::orbit_relabel(std::shared_ptr<const OrbitBall> orbit,
                                             const ProjectiveGroup& target_group,
                                             const HyperbolicPoint& target_base) {
  Correspondence c;
  c.kind_ = Kind::relabel;
  c.n_ = target_group.dim();
  c.map_ = ProjectiveMap::identity(c.n_);
  c.orbit_ = std::move(orbit);

  // Matched orbit points in the target model, computed once through the word
  // tree; each node gets the null direction of the ray [base, point).
  const auto& parents = c.orbit_->tree_parent;
  const auto& letters = c.orbit_->tree_letter;
  std::vector<Vec> pts(parents.size());
  c.relabel_targets_.resize(parents.size());
  for (size_t i = 0; i < parents.size(); ++i) {
    if (parents[i] < 0) {
      pts[i] = target_base.x;
      c.relabel_targets_[i] = Vec::Zero(c.n_ + 1);  // no direction for the basepoint
      continue;
    }
    const HyperbolicPoint q =
        HyperbolicPoint::from_vector(Vec(target_group.gen(letters[i]).matrix() * pts[parents[i]]));
    pts[i] = q.x;
    const double c0 = -minkowski(target_base.x, q.x);
    if (c0 < 1.0 + 1e-14) {
      c.relabel_targets_[i] = Vec::Zero(c.n_ + 1);
      continue;
    }
    const Vec v = (q.x - c0 * target_base.x) / std::sqrt(c0 * c0 - 1.0);
    c.relabel_targets_[i] = target_base.x + v;  // null direction of the ray
  }
  return c;
}

BoundaryMeasure Correspondence::push(const BoundaryMeasure& m) const {
  std::vector<BoundaryAtom> atoms;
  atoms.reserve(m.atoms().size());
  for (const auto& a : m.atoms()) {
    switch (kind_) {
      case Kind::identity:
        atoms.push_back(a);
        break;
      case Kind::projective:
        atoms.push_back({map_.apply(a.point), a.weight, a.node});
        break;
      case Kind::relabel: {
        if (a.node < 0 || a.node >= static_cast<int32_t>(relabel_targets_.size())) {
          throw UnmappedAtom("atom carries no word-tree node");
        }
        const Vec& t = relabel_targets_[a.node];
        if (t.norm() == 0.0) throw UnmappedAtom("atom ray is degenerate at the basepoint");
        atoms.push_back({ProjectivePoint(IdealPoint::from_vector(t).xi), a.weight, a.node});
        break;
      }
    }
  }
  BoundaryMeasure out(std::move(atoms), m.tag());
  out.ps_s = m.ps_s;
  out.ps_R_max = m.ps_R_max;
  out.ps_dropped = m.ps_dropped;
  return out;
}

HyperbolicPoint Correspondence::interior(const ProjectivePoint& x) const {
  if (!has_interior_map()) throw NotSupported("orbit relabeling has no interior map");
  const ProjectivePoint y = kind_ == Kind::projective ? map_.apply(x) : x;
  return HyperbolicPoint::from_klein(AffineChart::standard(n_).to_chart(y));
}

double halfspace_mass(const BoundaryMeasure& m, const HalfspaceAtInfinity& h, bool closed) {
  double mass = 0.0;
  for (const auto& a : m.atoms()) {
    const Vec& p = a.point.coords();
    const double t = p[p.size() - 1];
    const double side = (t >= 0.0 ? 1.0 : -1.0) * minkowski(p, h.w);
    if (closed ? side <= 0.0 : side < 0.0) mass += a.weight;
  }
  return mass;
}

}  // namespace hilbert
