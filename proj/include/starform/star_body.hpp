#pragma once

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "starform/sphere_grid.hpp"

namespace starform {

/// Real values at the nodes of a grid, of any sign. Polarization and the
/// signed extension of body functionals work in this space.
class GridFunction {
 public:
  GridFunction(GridPtr grid, std::vector<double> values);
  static GridFunction zero(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// The restriction of a radial function to the grid: finite and nonnegative.
class RadialFunction {
 public:
  RadialFunction(GridPtr grid, std::vector<double> values);
  /// The degenerate body {o}.
  static RadialFunction zero(GridPtr grid);
  /// Constant radial function (a centered ball of the given radius).
  static RadialFunction constant(GridPtr grid, double radius);

  const GridPtr& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  GridFunction as_signed() const { return GridFunction(grid_, values_); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

bool same_grid(const GridPtr& a, const GridPtr& b);

struct Ball {
  double radius;
};

struct Ellipsoid {
  Eigen::VectorXd axes;
};

/// {x : <a_j, x> <= b_j}, facet normals stored as rows.
struct HPolytope {
  Eigen::MatrixXd normals;
  Eigen::VectorXd offsets;
};

/// h * cos^2(pi t / 2), t = angle(u, center) / alpha, zero for t >= 1.
struct CapBump {
  Eigen::VectorXd center;
  double alpha;
  double height;
};

class StarBodySpec;

struct RadialTerm {
  double lambda;
  std::shared_ptr<const StarBodySpec> body;
};

struct RadialSumOf {
  std::vector<RadialTerm> terms;
};

/// Symbolic star body, evaluable to its radial function.
///
/// Construct through the factories, which enforce the shape invariants:
/// positive radius and semi-axes, polytope offsets b_j > 0 (origin interior),
/// cap width in (0, pi) and height >= 0, nonnegative radial-sum scales.
class StarBodySpec {
 public:
  using Shape = std::variant<Ball, Ellipsoid, HPolytope, CapBump, RadialSumOf>;

  static StarBodySpec ball(double radius);
  static StarBodySpec ellipsoid(Eigen::VectorXd axes);
  static StarBodySpec hpolytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets);
  /// `center` is normalized.
  static StarBodySpec cap_bump(Eigen::VectorXd center, double alpha, double height);
  static StarBodySpec radial_sum(std::vector<std::pair<double, StarBodySpec>> terms);

  const Shape& shape() const { return shape_; }
  /// Ambient dimension fixed by the shape, or 0 when any dimension works.
  int dim() const;

 private:
  explicit StarBodySpec(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_;
};

/// Radial function of `spec` in the unit direction `u`.
double radial_eval(const StarBodySpec& spec, const Eigen::VectorXd& u);

/// Pointwise radial_eval at every grid node.
RadialFunction sample(const StarBodySpec& spec, const GridPtr& grid);

RadialFunction radial_sum(const RadialFunction& f, const RadialFunction& g);
RadialFunction scale(const RadialFunction& f, double lambda);

/// (1/n) * sum_i w_i f_i^n.
double volume(const RadialFunction& f);

/// True iff min(f_i, g_i) <= tau at every node.
bool essentially_disjoint(const RadialFunction& f, const RadialFunction& g, double tau = 0.0);

/// Angle in [0, pi] between unit vectors.
double angle_between(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

}  // namespace starform
