#pragma once

#include <vector>

#include "hilbert/base.hpp"

namespace hilbert {

struct SphereNode {
  CVec dir;
  double weight;
};

/// Quadrature on the unit (n-1)-sphere, weights summing to its area.
/// n = 2: trapezoid on the circle (spectrally accurate on smooth periodic
/// integrands). n = 3: Gauss-Legendre in the polar cosine times a trapezoid
/// in the azimuth. Node count is at least min_nodes.
std::vector<SphereNode> sphere_quadrature(int n, int min_nodes);

/// Shared cache; stable reference, safe for concurrent readers.
const std::vector<SphereNode>& sphere_quadrature_cached(int n, int min_nodes);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace hilbert
