#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace starform {

/// Quadrature nodes and positive weights on the unit sphere S^{n-1}.
///
/// Weights are in units of (n-1)-dimensional surface measure, so they sum to
/// |S^{n-1}| (2*pi for n = 2, 4*pi for n = 3). A grid is immutable once built
/// and is shared between radial functions through GridPtr.
class SphereGrid {
 public:
  /// Validates and takes ownership of explicit nodes (one per column) and weights.
  SphereGrid(Eigen::MatrixXd nodes, std::vector<double> weights);

  int dim() const { return static_cast<int>(nodes_.rows()); }
  std::size_t size() const { return weights_.size(); }
  const Eigen::MatrixXd& nodes() const { return nodes_; }
  Eigen::VectorXd node(std::size_t i) const { return nodes_.col(static_cast<Eigen::Index>(i)); }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// Same dimension, node coordinates and weights (bitwise).
  bool same_as(const SphereGrid& other) const;

 private:
  Eigen::MatrixXd nodes_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

/// Surface area of S^{n-1}.
double sphere_area(int dim);

/// Uniform angular grid for dim 2 (`resolution` nodes); Gauss-Legendre in
/// cos(theta) times uniform azimuth for dim 3 (resolution x 2*resolution nodes).
GridPtr make_grid(int dim, int resolution);

/// Sum of w_i * values_i with compensated summation.
double integrate(const SphereGrid& grid, std::span<const double> values);

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

/// A proper rotation of R^n.
class Rotation {
 public:
  /// Throws InvalidArgument unless R^T R = I and det R = 1 within 1e-12.
  explicit Rotation(Eigen::MatrixXd matrix);

  static Rotation identity(int dim);
  /// Counter-clockwise planar rotation.
  static Rotation planar(double angle);
  /// Rotation of R^3 about a unit axis.
  static Rotation about_axis(const Eigen::Vector3d& axis, double angle);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
};

/// Euclidean node-matching tolerance for grid_permutation.
inline constexpr double kNodeMatchTol = 1e-9;

/// Permutation p with rot * node_i = node_{p[i]}.
///
/// Throws GridNotClosed naming the first node whose image is not a grid node,
/// or whose image carries a different weight.
std::vector<std::size_t> grid_permutation(const SphereGrid& grid, const Rotation& rot);

}  // namespace starform
