#include "starform/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "starform/error.hpp"
#include "starform/summation.hpp"

namespace starform {

namespace {

constexpr double kUnitNormTol = 1e-12;
constexpr double kWeightSumTol = 1e-10;
constexpr double kWeightMatchTol = 1e-12;

}  // namespace

double sphere_area(int dim) {
  if (dim < 2) throw InvalidArgument("sphere dimension must be at least 2");
  const double half = 0.5 * dim;
  return 2.0 * std::pow(M_PI, half) / std::tgamma(half);
}

SphereGrid::SphereGrid(Eigen::MatrixXd nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (nodes_.rows() < 2) throw InvalidArgument("grid dimension must be at least 2");
  if (static_cast<std::size_t>(nodes_.cols()) != weights_.size()) {
    throw InvalidArgument("grid has " + std::to_string(nodes_.cols()) + " nodes but " +
                          std::to_string(weights_.size()) + " weights");
  }
  if (weights_.empty()) throw InvalidArgument("grid has no nodes");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double norm = nodes_.col(static_cast<Eigen::Index>(i)).norm();
    if (!(std::abs(norm - 1.0) <= kUnitNormTol)) {
      throw InvalidArgument("grid node " + std::to_string(i) + " is not a unit vector");
    }
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw InvalidArgument("grid weight " + std::to_string(i) + " is not strictly positive");
    }
  }
  const double total = compensated_sum(weights_);
  if (std::abs(total - sphere_area(dim())) > kWeightSumTol) {
    std::ostringstream os;
    os.precision(17);
    os << "grid weights sum to " << total << ", expected |S^" << dim() - 1
       << "| = " << sphere_area(dim());
    throw InvalidArgument(os.str());
  }

  // Pairwise distinctness via a lexicographic sort of the columns.
  std::vector<Eigen::Index> order(weights_.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto lex_less = [this](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index r = 0; r < nodes_.rows(); ++r) {
      if (nodes_(r, a) != nodes_(r, b)) return nodes_(r, a) < nodes_(r, b);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), lex_less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (nodes_.col(order[i]) == nodes_.col(order[i - 1])) {
      throw InvalidArgument("grid nodes " + std::to_string(order[i - 1]) + " and " +
                            std::to_string(order[i]) + " coincide");
    }
  }
}

bool SphereGrid::same_as(const SphereGrid& other) const {
  if (this == &other) return true;
  return nodes_.rows() == other.nodes_.rows() && nodes_.cols() == other.nodes_.cols() &&
         nodes_ == other.nodes_ && weights_ == other.weights_;
}

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  if (count < 1) throw InvalidArgument("Gauss-Legendre needs at least one node");
  nodes.assign(static_cast<std::size_t>(count), 0.0);
  weights.assign(static_cast<std::size_t>(count), 0.0);

  // P_count(x) and its derivative by the three-term recurrence.
  auto legendre = [count](double x, double& derivative) {
    double prev = 1.0;
    double cur = x;
    for (int k = 2; k <= count; ++k) {
      const double next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / k;
      prev = cur;
      cur = next;
    }
    derivative = count * (x * cur - prev) / (x * x - 1.0);
    return cur;
  };

  for (int i = 0; i < (count + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(count - 1 - i);
    nodes[lo] = -x;
    nodes[hi] = x;
    weights[lo] = w;
    weights[hi] = w;
  }
  if (count % 2 == 1) nodes[static_cast<std::size_t>(count / 2)] = 0.0;

  // Weights sum to 2; remove the residual roundoff so the grid total is exact.
  const double total = compensated_sum(weights);
  for (double& w : weights) w *= 2.0 / total;
}

GridPtr make_grid(int dim, int resolution) {
  if (dim != 2 && dim != 3) {
    throw InvalidArgument("unsupported grid dimension " + std::to_string(dim) +
                          " (supported: 2, 3)");
  }
  if (resolution < 4) {
    throw InvalidArgument("grid resolution " + std::to_string(resolution) +
                          " is too small (minimum 4)");
  }
  if (dim == 2) {
    const auto k = static_cast<std::size_t>(resolution);
    Eigen::MatrixXd nodes(2, resolution);
    for (int j = 0; j < resolution; ++j) {
      const double theta = 2.0 * M_PI * j / resolution;
      nodes(0, j) = std::cos(theta);
      nodes(1, j) = std::sin(theta);
    }
    return std::make_shared<const SphereGrid>(std::move(nodes),
                                              std::vector<double>(k, 2.0 * M_PI / resolution));
  }

  std::vector<double> z;
  std::vector<double> wz;
  gauss_legendre(resolution, z, wz);
  const int azimuths = 2 * resolution;
  const double dphi = 2.0 * M_PI / azimuths;
  Eigen::MatrixXd nodes(3, resolution * azimuths);
  std::vector<double> weights;
  weights.reserve(static_cast<std::size_t>(resolution * azimuths));
  Eigen::Index col = 0;
  for (int i = 0; i < resolution; ++i) {
    const double zi = z[static_cast<std::size_t>(i)];
    const double r = std::sqrt((1.0 - zi) * (1.0 + zi));
    for (int l = 0; l < azimuths; ++l) {
      const double phi = dphi * l;
      Eigen::Vector3d v(r * std::cos(phi), r * std::sin(phi), zi);
      nodes.col(col++) = v / v.norm();
      weights.push_back(wz[static_cast<std::size_t>(i)] * dphi);
    }
  }
  return std::make_shared<const SphereGrid>(std::move(nodes), std::move(weights));
}

double integrate(const SphereGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) {
    throw InvalidArgument("integrand has " + std::to_string(values.size()) +
                          " values but the grid has " + std::to_string(grid.size()) + " nodes");
  }
  CompensatedSum s;
  const auto w = grid.weights();
  for (std::size_t i = 0; i < values.size(); ++i) s.add(w[i] * values[i]);
  return s.value();
}

Rotation::Rotation(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 2) {
    throw InvalidArgument("rotation matrix must be square of size at least 2");
  }
  const Eigen::MatrixXd gram = matrix_.transpose() * matrix_;
  const double ortho_err =
      (gram - Eigen::MatrixXd::Identity(matrix_.rows(), matrix_.cols())).cwiseAbs().maxCoeff();
  if (ortho_err > 1e-12) throw InvalidArgument("rotation matrix is not orthogonal");
  if (std::abs(matrix_.determinant() - 1.0) > 1e-12) {
    throw InvalidArgument("rotation matrix does not have determinant +1");
  }
}

Rotation Rotation::identity(int dim) { return Rotation(Eigen::MatrixXd::Identity(dim, dim)); }

Rotation Rotation::planar(double angle) {
  Eigen::MatrixXd m(2, 2);
  m << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return Rotation(std::move(m));
}

Rotation Rotation::about_axis(const Eigen::Vector3d& axis, double angle) {
  const Eigen::Matrix3d m = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return Rotation(Eigen::MatrixXd(m));
}

std::vector<std::size_t> grid_permutation(const SphereGrid& grid, const Rotation& rot) {
  if (rot.dim() != grid.dim()) {
    throw InvalidArgument("rotation dimension does not match grid dimension");
  }
  const Eigen::MatrixXd images = rot.matrix() * grid.nodes();
  const std::size_t n = grid.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto img = images.col(static_cast<Eigen::Index>(i));
    std::size_t best = n;
    double best_dist = kNodeMatchTol;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = (grid.nodes().col(static_cast<Eigen::Index>(j)) - img).norm();
      if (d <= best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best == n) {
      throw GridNotClosed(i, "grid is not closed under the rotation: image of node " +
                                 std::to_string(i) + " is not a grid node");
    }
    if (std::abs(grid.weight(best) - grid.weight(i)) > kWeightMatchTol) {
      throw GridNotClosed(i, "rotation maps node " + std::to_string(i) + " to node " +
                                 std::to_string(best) + " with a different weight");
    }
    perm[i] = best;
  }
  std::vector<bool> hit(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (hit[perm[i]]) {
      throw GridNotClosed(i, "rotation maps two nodes onto node " + std::to_string(perm[i]));
    }
    hit[perm[i]] = true;
  }
  return perm;
}

}  // namespace starform
