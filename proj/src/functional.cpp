#include "starform/functional.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <queue>

#include "starform/error.hpp"
#include "starform/summation.hpp"

namespace starform {

namespace {

constexpr double kMinWidth = M_PI / 16.0;
constexpr double kMaxWidth = M_PI / 4.0;

std::vector<RadialFunction> sample_all(std::span<const StarBodySpec> bodies, const GridPtr& grid) {
  std::vector<RadialFunction> out;
  out.reserve(bodies.size());
  for (const auto& b : bodies) out.push_back(sample(b, grid));
  return out;
}

const CapBump& as_cap(const StarBodySpec& spec) { return std::get<CapBump>(spec.shape()); }

StarBodySpec cap_at(const SphereGrid& grid, std::size_t node, Rng& rng) {
  return StarBodySpec::cap_bump(grid.node(node), rng.uniform(kMinWidth, kMaxWidth),
                                rng.uniform(0.1, 2.0));
}

/// m bumps around one random node: a tuple that is never essentially disjoint.
std::vector<StarBodySpec> control_tuple(const SphereGrid& grid, int m, Rng& rng) {
  const std::size_t node = rng.below(grid.size());
  std::vector<StarBodySpec> out;
  for (int j = 0; j < m; ++j) out.push_back(cap_at(grid, node, rng));
  return out;
}

std::vector<StarBodySpec> random_tuple(const SphereGrid& grid, int m, Rng& rng) {
  std::vector<StarBodySpec> out;
  for (int j = 0; j < m; ++j) out.push_back(random_cap_bump(grid, rng));
  return out;
}

/// Tracks the running maximum violation and the scale of F.
struct CheckAccumulator {
  explicit CheckAccumulator(std::string n) : name(std::move(n)) {}

  std::string name;
  double max_violation = 0.0;
  double scale = 0.0;
  std::optional<std::vector<StarBodySpec>> witness;

  void observe_scale(double value) { scale = std::max(scale, std::abs(value)); }
  void observe_violation(double v, const std::vector<StarBodySpec>& tuple) {
    if (v > max_violation) {
      max_violation = v;
      witness = tuple;
    }
  }
  CheckReport finish(double tol_rel) const {
    return {name, max_violation, scale, max_violation <= tol_rel * scale, witness};
  }
};

std::vector<double> random_values(std::size_t n, Rng& rng, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

std::vector<std::vector<double>> values_of(std::span<const RadialFunction> fs) {
  std::vector<std::vector<double>> out;
  for (const auto& f : fs) out.emplace_back(f.values().begin(), f.values().end());
  return out;
}

double ipow(double x, int n) {
  double p = 1.0;
  for (int k = 0; k < n; ++k) p *= x;
  return p;
}

}  // namespace

BodyFunctional::BodyFunctional(GridPtr grid, int arity, Backing backing)
    : grid_(std::move(grid)), arity_(arity), backing_(std::move(backing)) {
  if (!grid_) throw InvalidArgument("body functional needs a grid");
  if (arity_ < 1) throw InvalidArgument("body functional arity must be at least 1");
}

double BodyFunctional::operator()(std::span<const RadialFunction> args) const {
  if (static_cast<int>(args.size()) != arity_) {
    throw InvalidArgument("functional of arity " + std::to_string(arity_) + " called with " +
                          std::to_string(args.size()) + " bodies");
  }
  for (const auto& a : args) {
    if (!same_grid(a.grid(), grid_)) throw GridMismatch();
  }
  if (const auto* d = std::get_if<DiagonalMeasure>(&backing_)) {
    // Factors are multiplied in sorted order so the value is exactly symmetric.
    CompensatedSum s;
    std::vector<double> factors(args.size());
    for (std::size_t i = 0; i < grid_->size(); ++i) {
      if (d->masses[i] == 0.0) continue;
      for (std::size_t j = 0; j < args.size(); ++j) factors[j] = args[j][i];
      std::sort(factors.begin(), factors.end());
      double p = 1.0;
      for (double x : factors) p *= x;
      s.add(d->masses[i] * p);
    }
    return s.value();
  }
  if (const auto* t = std::get_if<Tensor>(&backing_)) {
    return contract(t->gamma, values_of(args));
  }
  return std::get<BlackBox>(backing_).eval(args);
}

BodyFunctional from_measure(const GridPtr& grid, std::vector<double> masses, int arity) {
  if (masses.size() != grid->size()) {
    throw InvalidArgument("measure has " + std::to_string(masses.size()) +
                          " masses but the grid has " + std::to_string(grid->size()) + " nodes");
  }
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!std::isfinite(masses[i])) {
      throw InvalidArgument("measure mass " + std::to_string(i) + " is not finite");
    }
  }
  return BodyFunctional(grid, arity, BodyFunctional::DiagonalMeasure{std::move(masses)});
}

BodyFunctional from_polymeasure(const GridPtr& grid, PolyMeasure gamma) {
  const auto& part = gamma.partition();
  if (!part.is_node_level() || part.node_count() != grid->size()) {
    throw InvalidArgument(
        "polymeasure must live on the node-level partition of the grid (one atom per node)");
  }
  if (part.grid() && !same_grid(part.grid(), grid)) throw GridMismatch();
  const int m = gamma.order();
  return BodyFunctional(grid, m, BodyFunctional::Tensor{std::move(gamma)});
}

BodyFunctional from_black_box(const GridPtr& grid, int arity,
                              std::function<double(std::span<const RadialFunction>)> eval) {
  if (!eval) throw InvalidArgument("black-box functional needs an evaluator");
  return BodyFunctional(grid, arity, BodyFunctional::BlackBox{std::move(eval)});
}

ProbeCertificate probe_black_box(const BodyFunctional& f, const HarnessOptions& opts) {
  const GridPtr& grid = f.grid();
  const int m = f.arity();
  const std::size_t n = grid->size();
  ProbeCertificate cert{opts.trials, 0.0, 0.0, 0.0, 0.0, 0.0};

  auto fail = [](const std::string& property, std::span<const RadialFunction> tuple, double v) {
    throw ProbeFailure(property, values_of(tuple), v,
                       "black-box functional fails the " + property + " probe");
  };

  for (int t = 0; t < opts.trials; ++t) {
    Rng rng(opts.seed, static_cast<std::uint64_t>(t));
    const auto slot = static_cast<std::size_t>(t % m);
    std::vector<RadialFunction> args;
    for (int j = 0; j < m; ++j) args.emplace_back(grid, random_values(n, rng, 0.0, 1.0));
    const RadialFunction g(grid, random_values(n, rng, 0.0, 1.0));
    const double lambda = rng.uniform(0.1, 3.0);

    const double base = f(args);
    cert.unit_ball_bound = std::max(cert.unit_ball_bound, std::abs(base));
    cert.scale = std::max(cert.scale, std::abs(base));

    auto with_slot = [&](RadialFunction value) {
      auto out = args;
      out[slot] = std::move(value);
      return out;
    };
    const auto sum_args = with_slot(radial_sum(args[slot], g));
    const auto g_args = with_slot(g);
    const double f_sum = f(sum_args);
    const double f_g = f(g_args);
    const double add_gap = std::abs(f_sum - base - f_g);
    cert.additivity = std::max(cert.additivity, add_gap);
    cert.unit_ball_bound = std::max(cert.unit_ball_bound, std::abs(f_g));
    if (add_gap > opts.tol_rel * (std::abs(f_sum) + std::abs(base) + std::abs(f_g))) {
      fail("separate additivity", sum_args, add_gap);
    }

    const auto scaled_args = with_slot(scale(args[slot], lambda));
    const double f_scaled = f(scaled_args);
    const double hom_gap = std::abs(f_scaled - lambda * base);
    cert.homogeneity = std::max(cert.homogeneity, hom_gap);
    if (hom_gap > opts.tol_rel * (std::abs(f_scaled) + lambda * std::abs(base))) {
      fail("positive homogeneity", scaled_args, hom_gap);
    }

    const auto zero_args = with_slot(RadialFunction::zero(grid));
    const double f_zero = std::abs(f(zero_args));
    cert.zero_body = std::max(cert.zero_body, f_zero);
    if (f_zero > opts.tol_rel * cert.scale) fail("degenerate body", zero_args, f_zero);
  }
  return cert;
}

MultilinearForm tf_extend(const BodyFunctional& f, const HarnessOptions& opts) {
  if (std::holds_alternative<BodyFunctional::BlackBox>(f.backing())) probe_black_box(f, opts);
  const int m = f.arity();
  return {m, [f, m](std::span<const GridFunction> fs) {
            const GridPtr& grid = f.grid();
            std::vector<RadialFunction> pos;
            std::vector<RadialFunction> neg;
            std::vector<bool> pos_zero;
            std::vector<bool> neg_zero;
            for (const auto& g : fs) {
              if (!same_grid(g.grid(), grid)) throw GridMismatch();
              std::vector<double> p(g.size());
              std::vector<double> q(g.size());
              for (std::size_t i = 0; i < g.size(); ++i) {
                p[i] = g[i] > 0.0 ? g[i] : 0.0;
                q[i] = g[i] < 0.0 ? -g[i] : 0.0;
              }
              pos_zero.push_back(std::all_of(p.begin(), p.end(), [](double x) { return x == 0.0; }));
              neg_zero.push_back(std::all_of(q.begin(), q.end(), [](double x) { return x == 0.0; }));
              pos.emplace_back(grid, std::move(p));
              neg.emplace_back(grid, std::move(q));
            }
            CompensatedSum total;
            std::vector<RadialFunction> args = pos;
            for (unsigned mask = 0; mask < (1u << m); ++mask) {
              bool vanishes = false;
              int sign = 1;
              for (int j = 0; j < m; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                if ((mask >> j) & 1u) {
                  sign = -sign;
                  vanishes = vanishes || neg_zero[sj];
                  args[sj] = neg[sj];
                } else {
                  vanishes = vanishes || pos_zero[sj];
                  args[sj] = pos[sj];
                }
              }
              if (!vanishes) total.add(sign * f(args));
            }
            return total.value();
          }};
}

HomogeneousPolynomial associated_polynomial(const BodyFunctional& f, const HarnessOptions& opts) {
  auto form = tf_extend(f, opts);
  return {f.arity(), [form](const GridFunction& g) { return polynomial_value(form, g); }};
}

StarBodySpec random_cap_bump(const SphereGrid& grid, Rng& rng) {
  return cap_at(grid, rng.below(grid.size()), rng);
}

StarBodySpec random_disjoint_cap_bump(const SphereGrid& grid, const CapBump& other, Rng& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    auto candidate = random_cap_bump(grid, rng);
    const auto& c = as_cap(candidate);
    if (angle_between(c.center, other.center) > c.alpha + other.alpha) return candidate;
  }
  throw Error("could not place a cap bump disjoint from the given one on this grid");
}

CheckReport check_vanishing_on_disjoint(const BodyFunctional& f, const HarnessOptions& opts) {
  const GridPtr& grid = f.grid();
  const int m = f.arity();
  CheckAccumulator acc{"vanishing_on_disjoint"};
  acc.observe_scale(f(std::vector<RadialFunction>(static_cast<std::size_t>(m),
                                                  RadialFunction::constant(grid, 1.0))));
  for (int t = 0; t < opts.trials; ++t) {
    Rng rng(opts.seed, static_cast<std::uint64_t>(t));
    const auto control = control_tuple(*grid, m, rng);
    acc.observe_scale(f(sample_all(control, grid)));

    auto tuple = random_tuple(*grid, m, rng);
    if (m == 1) {
      // L meets itself only at the origin iff L = {o}.
      tuple[0] = StarBodySpec::cap_bump(as_cap(tuple[0]).center, as_cap(tuple[0]).alpha, 0.0);
    } else {
      const auto a = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(m)));
      auto b = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(m - 1)));
      if (b >= a) ++b;
      tuple[b] = random_disjoint_cap_bump(*grid, as_cap(tuple[a]), rng);
    }
    acc.observe_violation(std::abs(f(sample_all(tuple, grid))), tuple);
  }
  return acc.finish(opts.tol_rel);
}

CheckReport check_symmetry(const BodyFunctional& f, const HarnessOptions& opts) {
  const GridPtr& grid = f.grid();
  const int m = f.arity();
  CheckAccumulator acc{"symmetry"};
  for (int t = 0; t < opts.trials; ++t) {
    Rng rng(opts.seed, static_cast<std::uint64_t>(t));
    acc.observe_scale(f(sample_all(control_tuple(*grid, m, rng), grid)));

    const auto tuple = random_tuple(*grid, m, rng);
    std::vector<std::size_t> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

    auto samples = sample_all(tuple, grid);
    std::vector<RadialFunction> permuted;
    for (std::size_t j : perm) permuted.push_back(samples[j]);
    const double a = f(samples);
    const double b = f(permuted);
    acc.observe_scale(a);
    acc.observe_scale(b);
    acc.observe_violation(std::abs(a - b), tuple);
  }
  return acc.finish(opts.tol_rel);
}

CheckReport check_poly_orthogonal_additivity(const BodyFunctional& f,
                                             const HarnessOptions& opts) {
  const GridPtr& grid = f.grid();
  const int m = f.arity();
  CheckAccumulator acc{"poly_orthogonal_additivity"};
  auto poly = [&](const RadialFunction& g) {
    return f(std::vector<RadialFunction>(static_cast<std::size_t>(m), g));
  };
  for (int t = 0; t < opts.trials; ++t) {
    Rng rng(opts.seed, static_cast<std::uint64_t>(t));
    acc.observe_scale(f(sample_all(control_tuple(*grid, m, rng), grid)));

    const auto body_l = random_cap_bump(*grid, rng);
    const auto body_m = random_disjoint_cap_bump(*grid, as_cap(body_l), rng);
    const auto l = sample(body_l, grid);
    const auto mm = sample(body_m, grid);
    const double p_l = poly(l);
    const double p_m = poly(mm);
    const double p_sum = poly(radial_sum(l, mm));
    acc.observe_scale(p_l);
    acc.observe_scale(p_m);
    acc.observe_scale(p_sum);
    acc.observe_violation(std::abs(p_sum - p_l - p_m),
                          {StarBodySpec::radial_sum({{1.0, body_l}, {1.0, body_m}}), body_l,
                           body_m});
  }
  return acc.finish(opts.tol_rel);
}

RecoveryReport recover_measure_from_polynomial(const HomogeneousPolynomial& poly,
                                               const GridPtr& grid, const HarnessOptions& opts) {
  const int degree = poly.degree;
  if (degree < 1) throw InvalidArgument("polynomial degree must be at least 1");
  const std::size_t n = grid->size();

  for (int t = 0; t < opts.trials; ++t) {
    Rng rng(opts.seed, static_cast<std::uint64_t>(t));
    const GridFunction f(grid, random_values(n, rng, -1.0, 1.0));
    const double lambda = rng.uniform(-2.0, 2.0);
    std::vector<double> scaled(f.values().begin(), f.values().end());
    for (double& x : scaled) x *= lambda;
    const double p_f = poly(f);
    const double p_scaled = poly(GridFunction(grid, scaled));
    const double lam_n = ipow(lambda, degree);
    const double gap = std::abs(p_scaled - lam_n * p_f);
    if (gap > opts.tol_rel * (std::abs(p_scaled) + std::abs(lam_n * p_f))) {
      throw ProbeFailure("homogeneity", {{f.values().begin(), f.values().end()}, scaled}, gap,
                         "polynomial is not " + std::to_string(degree) + "-homogeneous");
    }

    std::vector<double> a(n, 0.0);
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto which = rng.below(3);
      if (which == 0) a[i] = rng.uniform(-1.0, 1.0);
      if (which == 1) b[i] = rng.uniform(-1.0, 1.0);
    }
    std::vector<double> ab(n);
    for (std::size_t i = 0; i < n; ++i) ab[i] = a[i] + b[i];
    const double p_a = poly(GridFunction(grid, a));
    const double p_b = poly(GridFunction(grid, b));
    const double p_ab = poly(GridFunction(grid, ab));
    const double oa_gap = std::abs(p_ab - p_a - p_b);
    if (oa_gap > opts.tol_rel * (std::abs(p_ab) + std::abs(p_a) + std::abs(p_b))) {
      throw ProbeFailure("orthogonal additivity", {a, b}, oa_gap,
                         "polynomial is not orthogonally additive on disjoint simple functions");
    }
  }

  RecoveryReport report{std::vector<double>(n), degree, 0.0, 100, true};
  std::vector<double> indicator(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    indicator[i] = 1.0;
    report.measure[i] = poly(GridFunction(grid, indicator));
    indicator[i] = 0.0;
  }

  for (int s = 0; s < report.validation_samples; ++s) {
    Rng rng(opts.seed ^ 0x5EEDULL, static_cast<std::uint64_t>(s));
    const auto values = random_values(n, rng, -1.0, 1.0);
    CompensatedSum model;
    CompensatedSum magnitude;
    for (std::size_t i = 0; i < n; ++i) {
      const double term = report.measure[i] * ipow(values[i], degree);
      model.add(term);
      magnitude.add(std::abs(term));
    }
    const double actual = poly(GridFunction(grid, values));
    const double denom = std::max(std::abs(actual), magnitude.value());
    const double gap = std::abs(actual - model.value());
    const double rel = denom > 0.0 ? gap / denom : gap;
    report.max_rel_error = std::max(report.max_rel_error, rel);
  }
  report.pass = report.max_rel_error <= opts.tol_rel;
  return report;
}

RotationReduction reduce_rotation_invariant(const BodyFunctional& f,
                                            std::span<const Rotation> rotations, double tol) {
  const auto* backing = std::get_if<BodyFunctional::DiagonalMeasure>(&f.backing());
  if (!backing) throw InvalidArgument("rotation reduction needs a measure-backed functional");
  const SphereGrid& grid = *f.grid();
  const auto& mu = backing->masses;
  const std::size_t n = grid.size();

  std::vector<std::vector<std::size_t>> perms;
  for (const auto& r : rotations) perms.push_back(grid_permutation(grid, r));

  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  seen[0] = true;
  frontier.push(0);
  std::size_t orbit = 1;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (const auto& p : perms) {
      if (!seen[p[i]]) {
        seen[p[i]] = true;
        ++orbit;
        frontier.push(p[i]);
      }
    }
  }
  if (orbit != n) {
    throw NotTransitive(orbit, "rotation set is not transitive on the grid nodes (orbit of node 0 has " +
                                   std::to_string(orbit) + " of " + std::to_string(n) +
                                   " nodes); proportionality to the weights cannot be concluded");
  }

  double invariance = 0.0;
  double max_abs = 0.0;
  for (double x : mu) max_abs = std::max(max_abs, std::abs(x));
  for (const auto& p : perms) {
    for (std::size_t i = 0; i < n; ++i) invariance = std::max(invariance, std::abs(mu[p[i]] - mu[i]));
  }
  if (invariance > tol * max_abs) {
    std::vector<double> sorted = mu;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
    const double median = sorted[n / 2];
    std::size_t witness = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (std::abs(mu[i] - median) > std::abs(mu[witness] - median)) witness = i;
    }
    throw InvarianceViolation(witness, invariance,
                              "measure is not rotation invariant: node " + std::to_string(witness) +
                                  " breaks the symmetry");
  }

  const int dim = grid.dim();
  const double c = compensated_sum(mu) / (compensated_sum(grid.weights()) / dim);
  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    residual = std::max(residual, std::abs(mu[i] - c * grid.weight(i) / dim));
  }
  return {c, residual, invariance, rotations.size()};
}

std::vector<Rotation> cyclic_group(const SphereGrid& grid) {
  if (grid.dim() != 2) throw InvalidArgument("the cyclic group is defined for planar grids");
  const std::size_t k = grid.size();
  std::vector<Rotation> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    out.push_back(Rotation::planar(2.0 * M_PI * static_cast<double>(j) / static_cast<double>(k)));
  }
  return out;
}

ViolationWitness find_violation_witness(const BodyFunctional& f, double tol) {
  const auto* tensor = std::get_if<BodyFunctional::Tensor>(&f.backing());
  if (!tensor) {
    throw InvalidArgument("violation witnesses are built from a tensor-backed functional");
  }
  const auto check = is_diagonal(tensor->gamma, tol);
  if (check.diagonal) {
    throw InvalidArgument("functional is diagonal: it vanishes on disjoint tuples, no witness exists");
  }
  const GridPtr& grid = f.grid();
  const auto& atoms = *check.witness;

  // Bump of width half the nearest-neighbor angle: positive only at its node.
  std::vector<StarBodySpec> bodies;
  for (std::size_t node : atoms) {
    const Eigen::VectorXd center = grid->node(node);
    double nearest = M_PI;
    for (std::size_t j = 0; j < grid->size(); ++j) {
      if (j != node) nearest = std::min(nearest, angle_between(center, grid->node(j)));
    }
    bodies.push_back(StarBodySpec::cap_bump(center, 0.5 * nearest, 1.0));
  }
  const auto samples = sample_all(bodies, grid);

  std::optional<std::pair<std::size_t, std::size_t>> pair;
  for (std::size_t i = 0; i < samples.size() && !pair; ++i) {
    for (std::size_t j = i + 1; j < samples.size() && !pair; ++j) {
      if (essentially_disjoint(samples[i], samples[j], 0.0)) pair = {i, j};
    }
  }
  if (!pair) {
    throw Error("witness atoms are not angularly separable at this resolution; refine the grid");
  }
  const double value = f(samples);
  if (std::abs(value) < std::abs(check.witness_entry) - 1e-9) {
    throw Error("witness bodies do not certify the off-diagonal entry; refine the grid");
  }
  return {bodies, atoms, check.witness_entry, value, *pair};
}

}  // namespace starform
