#include "hilbert/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace hilbert {

void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(m);
  weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = m * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[m - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[m - 1 - i] = weights[i];
  }
}

std::vector<SphereNode> sphere_quadrature(int n, int min_nodes) {
  std::vector<SphereNode> out;
  if (n == 2) {
    const int m = std::max(16, min_nodes);
    out.reserve(m);
    const double w = 2.0 * M_PI / m;
    for (int k = 0; k < m; ++k) {
      const double theta = 2.0 * M_PI * k / m;
      CVec dir(2);
      dir << std::cos(theta), std::sin(theta);
      out.push_back({dir, w});
    }
    return out;
  }
  if (n == 3) {
    int mz = 16;
    while (2 * mz * mz < min_nodes) mz += 8;
    const int mphi = 2 * mz;
    std::vector<double> zn, zw;
    gauss_legendre(mz, zn, zw);
    out.reserve(static_cast<size_t>(mz) * mphi);
    const double wphi = 2.0 * M_PI / mphi;
    for (int i = 0; i < mz; ++i) {
      const double z = zn[i];
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int k = 0; k < mphi; ++k) {
        const double phi = 2.0 * M_PI * k / mphi;
        CVec dir(3);
        dir << r * std::cos(phi), r * std::sin(phi), z;
        out.push_back({dir, zw[i] * wphi});
      }
    }
    return out;
  }
  throw NotSupported("sphere quadrature is implemented for n = 2 and n = 3");
}

}  // namespace hilbert

namespace hilbert {

const std::vector<SphereNode>& sphere_quadrature_cached(int n, int min_nodes) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<std::vector<SphereNode>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, min_nodes}];
  if (!slot) slot = std::make_unique<std::vector<SphereNode>>(sphere_quadrature(n, min_nodes));
  return *slot;
}

}  // namespace hilbert
