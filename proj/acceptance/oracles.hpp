#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the code path it checks.

#include <cstdint>
#include <vector>

#include "starform/polymeasure.hpp"
#include "starform/random.hpp"
#include "starform/sphere_grid.hpp"

namespace starform::oracle {

/// max over all 2^{mk} sign assignments of |sum_tuple prod_l s_l[j_l] T[j]|,
/// walking every index tuple explicitly.
double brute_force_semivariation(const PolyMeasure& gamma);

/// Random tensor with entries k * 2^-20, |entry| <= 1, so every sum the
/// tests form is exact in double precision.
PolyMeasure dyadic_tensor(int order, std::size_t atoms, Rng& rng);

/// Every subset of {0, ..., k-1}, by bitmask.
std::vector<std::vector<std::size_t>> all_subsets(std::size_t k);

/// Volume of the ellipsoid with the given semi-axes.
double ellipsoid_volume(const std::vector<double>& axes);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// Sum of f(node) * w over the grid without compensation, as a naive reference.
template <class F>
double naive_quadrature(const SphereGrid& grid, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weight(i) * f(grid.node(i));
  return s;
}

}  // namespace starform::oracle
