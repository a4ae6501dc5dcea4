#include "starform/star_body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "starform/error.hpp"
#include "starform/summation.hpp"

namespace starform {

namespace {

constexpr double kUnitTol = 1e-12;

void check_values(const GridPtr& grid, std::span<const double> values, bool nonnegative) {
  if (!grid) throw InvalidArgument("grid function without a grid");
  if (values.size() != grid->size()) {
    throw InvalidArgument("grid function has " + std::to_string(values.size()) +
                          " values but the grid has " + std::to_string(grid->size()) + " nodes");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InvalidArgument("grid function value at node " + std::to_string(i) + " is not finite");
    }
    if (nonnegative && values[i] < 0.0) {
      throw InvalidArgument("radial function value at node " + std::to_string(i) +
                            " is negative");
    }
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  check_values(grid_, values_, false);
}

GridFunction GridFunction::zero(GridPtr grid) {
  const auto n = grid->size();
  return GridFunction(std::move(grid), std::vector<double>(n, 0.0));
}

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  check_values(grid_, values_, true);
}

RadialFunction RadialFunction::zero(GridPtr grid) { return constant(std::move(grid), 0.0); }

RadialFunction RadialFunction::constant(GridPtr grid, double radius) {
  const auto n = grid->size();
  return RadialFunction(std::move(grid), std::vector<double>(n, radius));
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  return a == b || (a && b && a->same_as(*b));
}

StarBodySpec StarBodySpec::ball(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("ball radius must be positive and finite");
  }
  return StarBodySpec(Ball{radius});
}

StarBodySpec StarBodySpec::ellipsoid(Eigen::VectorXd axes) {
  if (axes.size() < 2) throw InvalidArgument("ellipsoid needs at least 2 semi-axes");
  for (Eigen::Index i = 0; i < axes.size(); ++i) {
    if (!(axes[i] > 0.0) || !std::isfinite(axes[i])) {
      throw InvalidArgument("ellipsoid semi-axis " + std::to_string(i) + " must be positive");
    }
  }
  return StarBodySpec(Ellipsoid{std::move(axes)});
}

StarBodySpec StarBodySpec::hpolytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets) {
  if (normals.rows() == 0 || normals.cols() < 2) {
    throw InvalidArgument("polytope needs at least one facet in dimension >= 2");
  }
  if (normals.rows() != offsets.size()) {
    throw InvalidArgument("polytope has " + std::to_string(normals.rows()) + " normals but " +
                          std::to_string(offsets.size()) + " offsets");
  }
  for (Eigen::Index j = 0; j < offsets.size(); ++j) {
    if (!(offsets[j] > 0.0) || !std::isfinite(offsets[j])) {
      throw InvalidArgument("polytope offset b_" + std::to_string(j) +
                            " must be positive (origin must be interior)");
    }
    if (!(normals.row(j).norm() > 0.0) || !normals.row(j).allFinite()) {
      throw InvalidArgument("polytope normal " + std::to_string(j) + " is degenerate");
    }
  }
  return StarBodySpec(HPolytope{std::move(normals), std::move(offsets)});
}

StarBodySpec StarBodySpec::cap_bump(Eigen::VectorXd center, double alpha, double height) {
  if (center.size() < 2) throw InvalidArgument("cap center needs at least 2 coordinates");
  const double norm = center.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidArgument("cap center is degenerate");
  if (!(alpha > 0.0 && alpha < M_PI)) throw InvalidArgument("cap width must lie in (0, pi)");
  if (!(height >= 0.0) || !std::isfinite(height)) {
    throw InvalidArgument("cap height must be nonnegative");
  }
  return StarBodySpec(CapBump{center / norm, alpha, height});
}

StarBodySpec StarBodySpec::radial_sum(std::vector<std::pair<double, StarBodySpec>> terms) {
  RadialSumOf sum;
  int dim = 0;
  for (auto& [lambda, body] : terms) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw InvalidArgument("radial sum scale must be nonnegative");
    }
    const int d = body.dim();
    if (d != 0 && dim != 0 && d != dim) {
      throw InvalidArgument("radial sum mixes bodies of different dimensions");
    }
    if (d != 0) dim = d;
    sum.terms.push_back({lambda, std::make_shared<const StarBodySpec>(std::move(body))});
  }
  return StarBodySpec(std::move(sum));
}

int StarBodySpec::dim() const {
  return std::visit(
      overloaded{
          [](const Ball&) { return 0; },
          [](const Ellipsoid& e) { return static_cast<int>(e.axes.size()); },
          [](const HPolytope& p) { return static_cast<int>(p.normals.cols()); },
          [](const CapBump& c) { return static_cast<int>(c.center.size()); },
          [](const RadialSumOf& s) {
            for (const auto& t : s.terms) {
              if (const int d = t.body->dim(); d != 0) return d;
            }
            return 0;
          },
      },
      shape_);
}

double angle_between(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return std::acos(std::clamp(u.dot(v), -1.0, 1.0));
}

double radial_eval(const StarBodySpec& spec, const Eigen::VectorXd& u) {
  if (!(std::abs(u.norm() - 1.0) <= kUnitTol)) {
    throw InvalidArgument("radial_eval needs a unit direction");
  }
  const int d = spec.dim();
  if (d != 0 && d != u.size()) {
    throw InvalidArgument("body of dimension " + std::to_string(d) +
                          " evaluated in dimension " + std::to_string(u.size()));
  }
  return std::visit(
      overloaded{
          [](const Ball& b) { return b.radius; },
          [&u](const Ellipsoid& e) {
            return 1.0 / std::sqrt(u.cwiseQuotient(e.axes).squaredNorm());
          },
          [&u](const HPolytope& p) {
            const Eigen::VectorXd dots = p.normals * u;
            double rho = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < dots.size(); ++j) {
              if (dots[j] > 0.0) rho = std::min(rho, p.offsets[j] / dots[j]);
            }
            if (!std::isfinite(rho)) {
              throw InvalidArgument("polytope is unbounded: no facet faces the queried direction");
            }
            return rho;
          },
          [&u](const CapBump& c) {
            const double t = angle_between(u, c.center) / c.alpha;
            if (t >= 1.0) return 0.0;
            const double s = std::cos(0.5 * M_PI * t);
            return c.height * s * s;
          },
          [&u](const RadialSumOf& s) {
            double rho = 0.0;
            for (const auto& t : s.terms) rho += t.lambda * radial_eval(*t.body, u);
            return rho;
          },
      },
      spec.shape());
}

RadialFunction sample(const StarBodySpec& spec, const GridPtr& grid) {
  std::vector<double> values(grid->size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = radial_eval(spec, grid->node(i));
  return RadialFunction(grid, std::move(values));
}

RadialFunction radial_sum(const RadialFunction& f, const RadialFunction& g) {
  if (!same_grid(f.grid(), g.grid())) throw GridMismatch();
  std::vector<double> values(f.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f[i] + g[i];
  return RadialFunction(f.grid(), std::move(values));
}

RadialFunction scale(const RadialFunction& f, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("radial scaling factor must be nonnegative");
  }
  std::vector<double> values(f.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = lambda * f[i];
  return RadialFunction(f.grid(), std::move(values));
}

double volume(const RadialFunction& f) {
  const SphereGrid& grid = *f.grid();
  const int n = grid.dim();
  CompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < n; ++k) p *= f[i];
    s.add(grid.weight(i) * p);
  }
  return s.value() / n;
}

bool essentially_disjoint(const RadialFunction& f, const RadialFunction& g, double tau) {
  if (!same_grid(f.grid(), g.grid())) throw GridMismatch();
  if (!(tau >= 0.0)) throw InvalidArgument("disjointness threshold must be nonnegative");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::min(f[i], g[i]) > tau) return false;
  }
  return true;
}

}  // namespace starform
