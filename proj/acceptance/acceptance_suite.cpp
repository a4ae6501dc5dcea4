#include "acceptance_suite.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "starform/dual_volume.hpp"
#include "starform/error.hpp"
#include "starform/functional.hpp"
#include "starform/polymeasure.hpp"
#include "starform/random.hpp"
#include "starform/sphere_grid.hpp"
#include "starform/star_body.hpp"

namespace starform::acceptance {

using nlohmann::json;

namespace {

// Each criterion draws from its own family of streams so that adding trials
// to one never shifts another.
Rng stream(std::uint64_t seed, int criterion, std::uint64_t trial) {
  return Rng(seed, (static_cast<std::uint64_t>(criterion) << 32) | trial);
}

double rel_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

Eigen::VectorXd random_direction(int dim, Rng& rng) {
  Eigen::VectorXd v(dim);
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  } while (v.norm() < 1e-6);
  return v.normalized();
}

StarBodySpec random_body(int dim, int kind, Rng& rng) {
  switch (kind) {
    case 0:
      return StarBodySpec::ball(rng.uniform(0.2, 2.0));
    case 1: {
      Eigen::VectorXd axes(dim);
      for (int i = 0; i < dim; ++i) axes[i] = rng.uniform(0.3, 2.0);
      return StarBodySpec::ellipsoid(axes);
    }
    case 2:
      return StarBodySpec::cap_bump(random_direction(dim, rng), rng.uniform(0.2, 1.5),
                                    rng.uniform(0.1, 2.0));
    default: {
      // +-e_i keep it bounded, the extra facets make it irregular.
      const int extra = 3;
      Eigen::MatrixXd a(2 * dim + extra, dim);
      a.setZero();
      for (int i = 0; i < dim; ++i) {
        a(2 * i, i) = 1.0;
        a(2 * i + 1, i) = -1.0;
      }
      for (int r = 0; r < extra; ++r) a.row(2 * dim + r) = random_direction(dim, rng).transpose();
      Eigen::VectorXd b(a.rows());
      for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = rng.uniform(0.5, 2.0);
      return StarBodySpec::hpolytope(a, b);
    }
  }
}

RadialFunction random_radial(const GridPtr& grid, Rng& rng, double lo, double hi) {
  std::vector<double> v(grid->size());
  for (auto& x : v) x = rng.uniform(lo, hi);
  return RadialFunction(grid, std::move(v));
}

CriterionResult ball_identities(std::uint64_t seed) {
  const auto g2 = make_grid(2, 256);
  const auto g3 = make_grid(3, 32);
  std::vector<RadialFunction> unit2(2, RadialFunction::constant(g2, 1.0));
  std::vector<RadialFunction> unit3(3, RadialFunction::constant(g3, 1.0));
  const double err2 = std::abs(dual_mixed_volume(unit2) - M_PI);
  const double err3 = std::abs(dual_mixed_volume(unit3) - 4.0 * M_PI / 3.0);

  double worst = 0.0;
  for (std::uint64_t t = 0; t < 40; ++t) {
    Rng rng = stream(seed, 1, t);
    const int dim = t % 2 == 0 ? 2 : 3;
    const auto& grid = dim == 2 ? g2 : g3;
    std::vector<RadialFunction> fs;
    double expected = oracle::unit_ball_volume(dim);
    for (int j = 0; j < dim; ++j) {
      const double r = rng.uniform(0.1, 5.0);
      expected *= r;
      fs.push_back(sample(StarBodySpec::ball(r), grid));
    }
    worst = std::max(worst, rel_gap(dual_mixed_volume(fs), expected));
  }
  const bool pass = err2 <= 1e-12 && err3 <= 1e-10 && worst <= 1e-10;
  return {1, criterion_name(1), pass,
          {{"unit_n2_abs_error", err2}, {"unit_n3_abs_error", err3},
           {"random_radii_trials", 40}, {"random_radii_max_rel_error", worst}}};
}

CriterionResult lutwak(std::uint64_t seed) {
  const auto g2 = make_grid(2, 128);
  const auto g3 = make_grid(3, 24);
  double worst_ratio = 0.0;
  int failures = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng = stream(seed, 2, t);
    const int dim = t % 2 == 0 ? 2 : 3;
    const int m = 1 + static_cast<int>((t / 2) % 3);
    std::vector<StarBodySpec> bodies;
    std::vector<double> lambdas;
    for (int i = 0; i < m; ++i) {
      // Cycle the kinds so every configuration with m >= 2 mixes shapes.
      const int kind = static_cast<int>((t + static_cast<std::uint64_t>(i)) % 4);
      bodies.push_back(random_body(dim, kind, rng));
      lambdas.push_back(rng.uniform(0.0, 2.0));
    }
    const auto r = lutwak_check(bodies, lambdas, dim == 2 ? g2 : g3);
    const double bound = 1e-9 * std::max(1.0, std::abs(r.direct));
    worst_ratio = std::max(worst_ratio, r.abs_diff / bound);
    if (r.abs_diff > bound) ++failures;
  }
  return {2, criterion_name(2), failures == 0,
          {{"configurations", 50}, {"failures", failures},
           {"max_diff_over_bound", worst_ratio}}};
}

CriterionResult ellipsoid_convergence(std::uint64_t) {
  Eigen::VectorXd axes(3);
  axes << 2.0, 1.0, 0.5;
  const auto body = StarBodySpec::ellipsoid(axes);
  const double exact = oracle::ellipsoid_volume({2.0, 1.0, 0.5});
  auto error_at = [&](int res) { return std::abs(volume(sample(body, make_grid(3, res))) - exact); };
  const double e32 = error_at(32);
  const double e64 = error_at(64);
  const double e128 = error_at(128);
  return {3, criterion_name(3), e64 <= 1e-6 && e128 < e32,
          {{"exact", exact}, {"error_res32", e32}, {"error_res64", e64}, {"error_res128", e128}}};
}

CriterionResult polarization(std::uint64_t seed) {
  const auto g2 = make_grid(2, 64);
  const auto g3 = make_grid(3, 12);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng = stream(seed, 4, t);
    const int dim = t % 2 == 0 ? 2 : 3;
    const auto& grid = dim == 2 ? g2 : g3;
    std::vector<RadialFunction> fs;
    for (int j = 0; j < dim; ++j) fs.push_back(random_radial(grid, rng, 0.0, 2.0));
    worst = std::max(worst, rel_gap(polarize(volume_polynomial(grid), fs), dual_mixed_volume(fs)));
  }
  return {4, criterion_name(4), worst <= 1e-9, {{"tuples", 100}, {"max_rel_error", worst}}};
}

CriterionResult semivariation_oracle(std::uint64_t seed) {
  int mismatches = 0;
  int above_variation = 0;
  int order_one_gaps = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng = stream(seed, 5, t);
    const int m = 1 + static_cast<int>(rng.below(4));
    const std::size_t k = 1 + rng.below(12 / static_cast<std::uint64_t>(m));
    const auto gamma = oracle::dyadic_tensor(m, k, rng);
    const double exact = semivariation(gamma, SemivariationMode::exact).value;
    const double brute = oracle::brute_force_semivariation(gamma);
    const double var = variation(gamma);
    if (exact != brute) ++mismatches;
    if (exact > var) ++above_variation;
    if (m == 1 && exact != var) ++order_one_gaps;
  }
  return {5, criterion_name(5), mismatches + above_variation + order_one_gaps == 0,
          {{"tensors", 200},
           {"brute_force_mismatches", mismatches},
           {"above_variation", above_variation},
           {"order_one_inequalities", order_one_gaps}}};
}

CriterionResult product_and_jordan(std::uint64_t seed) {
  int rectangle_mismatches = 0;
  int jordan_mismatches = 0;
  std::size_t rectangles = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng = stream(seed, 6, t);
    const int m = 1 + static_cast<int>(rng.below(3));
    const std::size_t k = 1 + rng.below(3);
    const auto gamma = oracle::dyadic_tensor(m, k, rng);
    const auto pm = product_measure(gamma);
    const auto subsets = oracle::all_subsets(k);

    // Odometer over subsets^m.
    std::vector<std::size_t> pick(static_cast<std::size_t>(m), 0);
    while (true) {
      std::vector<std::vector<std::size_t>> sets;
      for (std::size_t p : pick) sets.push_back(subsets[p]);
      if (evaluate(gamma, sets) != pm.rectangle_mass(sets)) ++rectangle_mismatches;
      ++rectangles;
      std::size_t l = pick.size();
      while (l > 0 && ++pick[l - 1] == subsets.size()) pick[--l] = 0;
      if (l == 0) break;
    }

    const auto [plus, minus] = jordan_decomposition(gamma);
    if (variation(plus) + variation(minus) != variation(gamma)) ++jordan_mismatches;
  }
  return {6, criterion_name(6), rectangle_mismatches + jordan_mismatches == 0,
          {{"tensors", 50},
           {"rectangles", rectangles},
           {"rectangle_mismatches", rectangle_mismatches},
           {"jordan_mismatches", jordan_mismatches}}};
}

CriterionResult disjoint_vanishing(std::uint64_t seed) {
  const auto g2 = make_grid(2, 24);
  const auto g3 = make_grid(3, 6);
  int diagonal_failures = 0;
  double worst_violation = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng = stream(seed, 7, t);
    const auto& grid = t % 2 == 0 ? g2 : g3;
    const int m = 1 + static_cast<int>(rng.below(3));
    std::vector<double> masses(grid->size());
    for (auto& x : masses) x = rng.uniform(-1.0, 1.0);
    const auto f = from_measure(grid, std::move(masses), m);
    HarnessOptions opts;
    opts.seed = rng.next();
    bool ok = true;
    for (const auto& r : {check_vanishing_on_disjoint(f, opts), check_symmetry(f, opts),
                          check_poly_orthogonal_additivity(f, opts)}) {
      ok = ok && r.pass;
      if (r.scale > 0.0) worst_violation = std::max(worst_violation, r.max_violation / r.scale);
    }
    if (!ok) ++diagonal_failures;
  }

  const auto t2 = make_grid(2, 12);
  const auto t3 = make_grid(3, 4);
  int witness_failures = 0;
  double weakest = INFINITY;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng = stream(seed, 7, 1000 + t);
    const auto& grid = t % 2 == 0 ? t2 : t3;
    const int m = 2 + static_cast<int>(rng.below(2));
    const std::size_t k = grid->size();
    std::size_t size = 1;
    for (int l = 0; l < m; ++l) size *= k;
    PolyMeasure blank(m, k, std::vector<double>(size, 0.0));
    std::vector<double> entries(size, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      entries[blank.flat_index(std::vector<std::size_t>(static_cast<std::size_t>(m), j))] =
          rng.uniform(-1.0, 1.0);
    }
    // Off-diagonal noise stays below the planted entry.
    for (int s = 0; s < 5; ++s) entries[rng.below(size)] += rng.uniform(-0.05, 0.05);
    std::vector<std::size_t> planted(static_cast<std::size_t>(m));
    do {
      for (auto& a : planted) a = rng.below(k);
    } while (std::all_of(planted.begin(), planted.end(),
                         [&](std::size_t a) { return a == planted[0]; }));
    const double magnitude = rng.uniform(0.1, 1.0);
    entries[blank.flat_index(planted)] = rng.coin() ? magnitude : -magnitude;

    const auto f = from_polymeasure(
        grid, PolyMeasure(m, FinitePartition::node_level(grid), std::move(entries)));
    try {
      const auto w = find_violation_witness(f);
      weakest = std::min(weakest, std::abs(w.value));
      if (std::abs(w.value) < 0.1 - 1e-9) ++witness_failures;
    } catch (const Error&) {
      ++witness_failures;
    }
  }
  const bool pass = diagonal_failures == 0 && witness_failures == 0;
  return {7, criterion_name(7), pass,
          {{"diagonal_functionals", 100},
           {"diagonal_failures", diagonal_failures},
           {"max_relative_violation", worst_violation},
           {"tensor_functionals", 100},
           {"witness_failures", witness_failures},
           {"min_witness_value", std::isfinite(weakest) ? json(weakest) : json(nullptr)}}};
}

CriterionResult measure_recovery(std::uint64_t seed) {
  int inexact = 0;
  int failed_validation = 0;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    Rng rng = stream(seed, 8, t);
    const auto grid = t % 2 == 0 ? make_grid(2, 32) : make_grid(3, 6);
    const int degree = grid->dim();
    std::vector<double> nu(grid->size());
    for (auto& x : nu) x = rng.uniform(-1.0, 1.0);
    const HomogeneousPolynomial poly{degree, [nu, degree](const GridFunction& f) {
                                       double s = 0.0;
                                       for (std::size_t i = 0; i < nu.size(); ++i) {
                                         s += nu[i] * std::pow(f[i], degree);
                                       }
                                       return s;
                                     }};
    HarnessOptions opts;
    opts.seed = rng.next();
    try {
      const auto report = recover_measure_from_polynomial(poly, grid, opts);
      if (report.measure != nu) ++inexact;
      if (!report.pass) ++failed_validation;

      // Independent check on 100 simple functions: random values on a random
      // partition of the nodes into at most 4 blocks.
      for (int s = 0; s < 100; ++s) {
        std::vector<double> level(4);
        for (auto& x : level) x = rng.uniform(-1.0, 1.0);
        std::vector<double> f(grid->size());
        for (auto& x : f) x = level[rng.below(4)];
        double model = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
          model += report.measure[i] * std::pow(f[i], degree);
        }
        const double gap = rel_gap(model, poly(GridFunction(grid, f)));
        worst = std::max(worst, gap);
        if (gap > 1e-9) ++failed_validation;
      }
    } catch (const Error&) {
      ++inexact;
    }
  }
  return {8, criterion_name(8), inexact == 0 && failed_validation == 0,
          {{"planted_measures", 10},
           {"inexact_recoveries", inexact},
           {"validation_failures", failed_validation},
           {"max_rel_error", worst}}};
}

CriterionResult rotation_reduction(std::uint64_t) {
  const auto grid = make_grid(2, 24);
  const auto group = cyclic_group(*grid);
  json runs = json::array();
  bool pass = true;
  for (double c0 : {0.5, 3.0, 10.0}) {
    std::vector<double> mu(grid->size());
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = c0 * grid->weight(i) / 2.0;
    json run = {{"c0", c0}};
    try {
      const auto r = reduce_rotation_invariant(from_measure(grid, mu, 2), group);
      run["c"] = r.c;
      run["residual"] = r.residual;
      pass = pass && std::abs(r.c - c0) <= 1e-9 && r.residual <= 1e-12;
    } catch (const Error& e) {
      run["error"] = e.what();
      pass = false;
    }
    mu[5] += 1e-3;
    try {
      reduce_rotation_invariant(from_measure(grid, mu, 2), group);
      run["perturbation_detected"] = false;
      pass = false;
    } catch (const InvarianceViolation& e) {
      run["perturbation_detected"] = true;
      run["perturbation_residual"] = e.residual();
      run["perturbation_node"] = e.node();
      pass = pass && e.residual() >= 1e-4;
    }
    runs.push_back(run);
  }
  return {9, criterion_name(9), pass, {{"grid_nodes", grid->size()}, {"runs", runs}}};
}

CriterionResult run_one(int id, std::uint64_t seed) {
  switch (id) {
    case 1: return ball_identities(seed);
    case 2: return lutwak(seed);
    case 3: return ellipsoid_convergence(seed);
    case 4: return polarization(seed);
    case 5: return semivariation_oracle(seed);
    case 6: return product_and_jordan(seed);
    case 7: return disjoint_vanishing(seed);
    case 8: return measure_recovery(seed);
    case 9: return rotation_reduction(seed);
    default: throw InvalidArgument("unknown criterion " + std::to_string(id));
  }
}

json dump_all(const std::vector<CriterionResult>& results) {
  json out = json::array();
  for (const auto& r : results) out.push_back({{"id", r.id}, {"pass", r.pass}, {"detail", r.detail}});
  return out;
}

}  // namespace

std::string criterion_name(int id) {
  static const char* const names[] = {
      "ball identities",
      "lutwak expansion",
      "ellipsoid volume convergence",
      "polarization oracle",
      "semivariation oracle",
      "product measure and jordan identities",
      "disjoint-vanishing characterization",
      "measure recovery",
      "rotation reduction",
      "determinism",
  };
  if (id < 1 || id > kCriterionCount) throw InvalidArgument("unknown criterion " + std::to_string(id));
  return names[id - 1];
}

std::vector<int> parse_suite(const std::string& suite) {
  std::vector<int> ids;
  if (suite == "all") {
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
    return ids;
  }
  std::stringstream in(suite);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || id < 1 || id > kCriterionCount) {
      throw InvalidArgument("--suite expects 'all' or criterion ids 1-" +
                            std::to_string(kCriterionCount) + ", got '" + item + "'");
    }
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  if (ids.empty()) throw InvalidArgument("--suite is empty");
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool SuiteReport::pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.pass; });
}

json SuiteReport::to_json() const {
  json list = json::array();
  for (const auto& c : criteria) {
    list.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  return {{"seed", seed}, {"criteria", list}, {"pass", pass()}};
}

SuiteReport run_suite(const std::vector<int>& ids, std::uint64_t seed) {
  SuiteReport report{seed, {}};
  std::vector<CriterionResult> first;
  for (int id : ids) {
    if (id == kCriterionCount) continue;
    first.push_back(run_one(id, seed));
  }
  report.criteria = first;

  if (std::find(ids.begin(), ids.end(), kCriterionCount) != ids.end()) {
    // Re-run every other criterion and compare the serialized results.
    std::vector<CriterionResult> a;
    std::vector<CriterionResult> b;
    for (int id = 1; id < kCriterionCount; ++id) {
      const auto it = std::find_if(first.begin(), first.end(), [&](const auto& r) { return r.id == id; });
      a.push_back(it != first.end() ? *it : run_one(id, seed));
      b.push_back(run_one(id, seed));
    }
    const std::string da = dump_all(a).dump();
    const std::string db = dump_all(b).dump();
    report.criteria.push_back({kCriterionCount, criterion_name(kCriterionCount), da == db,
                               {{"criteria_compared", kCriterionCount - 1},
                                {"identical", da == db},
                                {"bytes", da.size()}}});
  }
  return report;
}

}  // namespace starform::acceptance
