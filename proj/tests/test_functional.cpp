#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "starform/dual_volume.hpp"
#include "starform/error.hpp"
#include "starform/functional.hpp"

namespace starform {
namespace {

std::vector<double> random_masses(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

RadialFunction random_radial(const GridPtr& g, Rng& rng) {
  std::vector<double> v(g->size());
  for (auto& x : v) x = rng.uniform(0.0, 2.0);
  return RadialFunction(g, v);
}

GridFunction random_signed(const GridPtr& g, Rng& rng) {
  std::vector<double> v(g->size());
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return GridFunction(g, v);
}

/// Node-level tensor of order m with `masses` on the diagonal.
PolyMeasure diagonal_tensor(const GridPtr& g, int m, const std::vector<double>& masses) {
  const std::size_t k = g->size();
  std::size_t size = 1;
  for (int l = 0; l < m; ++l) size *= k;
  std::vector<double> e(size, 0.0);
  PolyMeasure shape(m, k, e);
  for (std::size_t j = 0; j < k; ++j) {
    e[shape.flat_index(std::vector<std::size_t>(static_cast<std::size_t>(m), j))] = masses[j];
  }
  return PolyMeasure(m, FinitePartition::node_level(g), e);
}

TEST(BodyFunctional, MeasureBackingIsWeightedProduct) {
  const auto g = make_grid(2, 8);
  Rng rng(1);
  const auto mu = random_masses(8, rng);
  const auto f = from_measure(g, mu, 2);
  const auto a = random_radial(g, rng);
  const auto b = random_radial(g, rng);
  double expected = 0.0;
  for (std::size_t i = 0; i < 8; ++i) expected += mu[i] * a[i] * b[i];
  EXPECT_NEAR(f(std::vector{a, b}), expected, 1e-14);
}

TEST(BodyFunctional, DualVolumeMeasure) {
  const auto g = make_grid(3, 6);
  std::vector<double> mu(g->weights().begin(), g->weights().end());
  for (double& x : mu) x /= 3.0;
  const auto f = from_measure(g, mu, 3);
  Rng rng(2);
  const std::vector<RadialFunction> args = {random_radial(g, rng), random_radial(g, rng),
                                            random_radial(g, rng)};
  EXPECT_NEAR(f(args), dual_mixed_volume(args), 1e-12);
}

TEST(BodyFunctional, TensorAndMeasureAgreeOnDiagonal) {
  const auto g = make_grid(2, 6);
  Rng rng(3);
  const auto mu = random_masses(6, rng);
  const auto by_measure = from_measure(g, mu, 3);
  const auto by_tensor = from_polymeasure(g, diagonal_tensor(g, 3, mu));
  for (int t = 0; t < 10; ++t) {
    const std::vector<RadialFunction> args = {random_radial(g, rng), random_radial(g, rng),
                                              random_radial(g, rng)};
    EXPECT_NEAR(by_measure(args), by_tensor(args), 1e-13);
  }
}

TEST(BodyFunctional, Errors) {
  const auto g = make_grid(2, 8);
  EXPECT_THROW(from_measure(g, std::vector<double>(7, 1.0), 2), InvalidArgument);
  EXPECT_THROW(from_measure(g, std::vector<double>(8, 1.0), 0), InvalidArgument);
  EXPECT_THROW(from_polymeasure(g, PolyMeasure(2, 4, std::vector<double>(16, 0.0))), InvalidArgument);
  const auto f = from_measure(g, std::vector<double>(8, 1.0), 2);
  const auto one = RadialFunction::constant(g, 1.0);
  EXPECT_THROW(f(std::vector{one}), InvalidArgument);
  EXPECT_THROW(f(std::vector{one, RadialFunction::constant(make_grid(2, 9), 1.0)}), GridMismatch);
}

TEST(ProbeBlackBox, AcceptsMultilinearEvaluator) {
  const auto g = make_grid(2, 8);
  const auto dmv = from_black_box(g, 2, [](std::span<const RadialFunction> fs) {
    return dual_mixed_volume(fs);
  });
  const auto cert = probe_black_box(dmv, {20, 4, 1e-9});
  EXPECT_EQ(cert.trials, 20);
  EXPECT_LE(cert.additivity, 1e-12);
  EXPECT_EQ(cert.zero_body, 0.0);
  EXPECT_GT(cert.scale, 0.0);
}

TEST(ProbeBlackBox, RejectsNonAdditive) {
  const auto g = make_grid(2, 8);
  const auto squared = from_black_box(g, 1, [](std::span<const RadialFunction> fs) {
    double s = 0.0;
    for (double x : fs[0].values()) s += x * x;
    return s;
  });
  try {
    probe_black_box(squared);
    FAIL() << "expected ProbeFailure";
  } catch (const ProbeFailure& e) {
    EXPECT_EQ(e.property(), "separate additivity");
    EXPECT_EQ(e.tuple().size(), 1u);
    EXPECT_GT(e.violation(), 0.0);
  }
}

TEST(ProbeBlackBox, RejectsHomogeneousButNotAdditive) {
  const auto g = make_grid(2, 8);
  const auto maxed = from_black_box(g, 1, [](std::span<const RadialFunction> fs) {
    double m = 0.0;
    for (double x : fs[0].values()) m = std::max(m, x);
    return m;
  });
  EXPECT_THROW(probe_black_box(maxed), ProbeFailure);
}

TEST(TfExtend, MatchesSignedDualMixedForm) {
  const auto g = make_grid(2, 12);
  std::vector<double> mu(g->weights().begin(), g->weights().end());
  for (double& x : mu) x /= 2.0;
  const auto form = tf_extend(from_measure(g, mu, 2));
  for (std::uint64_t t = 0; t < 20; ++t) {
    Rng rng(4, t);
    const std::vector<GridFunction> fs = {random_signed(g, rng), random_signed(g, rng)};
    EXPECT_NEAR(form(fs), dual_mixed_form(fs), 1e-12);
  }
}

TEST(TfExtend, BlackBoxIsProbedFirst) {
  const auto g = make_grid(2, 8);
  const auto bad = from_black_box(g, 1, [](std::span<const RadialFunction> fs) {
    return std::sqrt(fs[0][0]);
  });
  EXPECT_THROW(tf_extend(bad), ProbeFailure);
}

TEST(TfExtend, MultilinearOnSignedFunctions) {
  const auto g = make_grid(3, 4);
  Rng rng(5);
  const auto form = tf_extend(from_measure(g, random_masses(g->size(), rng), 3));
  for (std::uint64_t t = 0; t < 10; ++t) {
    Rng r(6, t);
    const auto a = random_signed(g, r);
    const auto b = random_signed(g, r);
    const auto c = random_signed(g, r);
    const auto d = random_signed(g, r);
    const double lambda = r.uniform(-2.0, 2.0);
    std::vector<double> ad(g->size());
    for (std::size_t i = 0; i < ad.size(); ++i) ad[i] = a[i] + lambda * d[i];
    const double lhs = form(std::vector{GridFunction(g, ad), b, c});
    const double rhs = form(std::vector{a, b, c}) + lambda * form(std::vector{d, b, c});
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(AssociatedPolynomial, OrthogonallyAdditiveForDiagonal) {
  const auto g = make_grid(2, 16);
  Rng rng(7);
  const auto p = associated_polynomial(from_measure(g, random_masses(16, rng), 3));
  std::vector<double> a(16, 0.0);
  std::vector<double> b(16, 0.0);
  for (std::size_t i = 0; i < 16; ++i) (i % 2 ? a : b)[i] = rng.uniform(-1.0, 1.0);
  std::vector<double> ab(16);
  for (std::size_t i = 0; i < 16; ++i) ab[i] = a[i] + b[i];
  EXPECT_NEAR(p(GridFunction(g, ab)), p(GridFunction(g, a)) + p(GridFunction(g, b)), 1e-12);
}

TEST(RandomCapBump, RespectsRanges) {
  const auto g = make_grid(3, 8);
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    const auto spec = random_cap_bump(*g, rng);
    const auto& c = std::get<CapBump>(spec.shape());
    EXPECT_GE(c.alpha, M_PI / 16);
    EXPECT_LE(c.alpha, M_PI / 4);
    EXPECT_GE(c.height, 0.1);
    EXPECT_LE(c.height, 2.0);
    const auto other = random_disjoint_cap_bump(*g, c, rng);
    const auto& o = std::get<CapBump>(other.shape());
    EXPECT_GT(angle_between(c.center, o.center), c.alpha + o.alpha);
    EXPECT_TRUE(essentially_disjoint(sample(spec, g), sample(other, g)));
  }
}

TEST(Checks, DiagonalFunctionalsPass) {
  for (int dim : {2, 3}) {
    const auto g = make_grid(dim, dim == 2 ? 24 : 6);
    for (int m = 1; m <= 3; ++m) {
      Rng rng(9, static_cast<std::uint64_t>(10 * dim + m));
      const auto f = from_measure(g, random_masses(g->size(), rng), m);
      const HarnessOptions opts{30, 11, 1e-9};
      for (const auto& r : {check_vanishing_on_disjoint(f, opts), check_symmetry(f, opts),
                            check_poly_orthogonal_additivity(f, opts)}) {
        EXPECT_TRUE(r.pass) << r.name << " m=" << m << " dim=" << dim;
        EXPECT_GT(r.scale, 0.0);
      }
    }
  }
}

TEST(Checks, VanishingIsExactForDiagonal) {
  const auto g = make_grid(2, 24);
  Rng rng(10);
  const auto r = check_vanishing_on_disjoint(from_measure(g, random_masses(24, rng), 2));
  EXPECT_EQ(r.max_violation, 0.0);
  EXPECT_FALSE(r.witness.has_value());
}

TEST(Checks, DenseOffDiagonalTensorIsCaught) {
  // Small grid, many trials: off-diagonal mass is hit with near certainty.
  const auto g = make_grid(2, 8);
  const std::size_t k = g->size();
  std::vector<double> e(k * k);
  Rng rng(11);
  for (auto& x : e) x = rng.uniform(0.1, 1.0);
  const auto f = from_polymeasure(g, PolyMeasure(2, FinitePartition::node_level(g), e));
  const HarnessOptions opts{500, 0, 1e-9};
  const auto van = check_vanishing_on_disjoint(f, opts);
  EXPECT_FALSE(van.pass);
  ASSERT_TRUE(van.witness.has_value());
  EXPECT_EQ(van.witness->size(), 2u);
  EXPECT_FALSE(check_poly_orthogonal_additivity(f, opts).pass);
}

TEST(Checks, AsymmetricTensorFailsSymmetry) {
  const auto g = make_grid(2, 8);
  std::vector<double> e(64, 0.0);
  for (std::size_t i = 0; i < 8; ++i) e[i * 8 + (i + 1) % 8] = 1.0;  // no transpose partner
  const auto f = from_polymeasure(g, PolyMeasure(2, FinitePartition::node_level(g), e));
  EXPECT_FALSE(check_symmetry(f, {200, 0, 1e-9}).pass);
}

TEST(Checks, SeedDeterminesReport) {
  const auto g = make_grid(2, 16);
  Rng rng(12);
  const auto f = from_measure(g, random_masses(16, rng), 2);
  const auto a = check_symmetry(f, {20, 5, 1e-9});
  const auto b = check_symmetry(f, {20, 5, 1e-9});
  EXPECT_EQ(a.max_violation, b.max_violation);
  EXPECT_EQ(a.scale, b.scale);
}

TEST(Recover, PlantedMeasureExactly) {
  const auto g = make_grid(2, 16);
  Rng rng(13);
  const auto nu = random_masses(16, rng);
  const HomogeneousPolynomial p{2, [nu](const GridFunction& f) {
                                  double s = 0.0;
                                  for (std::size_t i = 0; i < nu.size(); ++i) s += nu[i] * f[i] * f[i];
                                  return s;
                                }};
  const auto r = recover_measure_from_polynomial(p, g);
  EXPECT_EQ(r.measure, nu);
  EXPECT_EQ(r.degree, 2);
  EXPECT_EQ(r.validation_samples, 100);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_rel_error, 1e-9);
}

TEST(Recover, FromDiagonalFunctional) {
  const auto g = make_grid(3, 4);
  Rng rng(14);
  const auto mu = random_masses(g->size(), rng);
  const auto r = recover_measure_from_polynomial(associated_polynomial(from_measure(g, mu, 3)), g);
  ASSERT_EQ(r.measure.size(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) EXPECT_NEAR(r.measure[i], mu[i], 1e-15);
  EXPECT_TRUE(r.pass);
}

TEST(Recover, RejectsNonOrthogonallyAdditive) {
  const auto g = make_grid(2, 8);
  const HomogeneousPolynomial p{2, [](const GridFunction& f) {
                                  double s = 0.0;
                                  for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
                                  return s * s;
                                }};
  try {
    recover_measure_from_polynomial(p, g);
    FAIL() << "expected ProbeFailure";
  } catch (const ProbeFailure& e) {
    EXPECT_EQ(e.property(), "orthogonal additivity");
  }
}

TEST(Recover, RejectsWrongDegree) {
  const auto g = make_grid(2, 8);
  const HomogeneousPolynomial p{3, [](const GridFunction& f) {
                                  double s = 0.0;
                                  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * f[i];
                                  return s;
                                }};
  try {
    recover_measure_from_polynomial(p, g);
    FAIL() << "expected ProbeFailure";
  } catch (const ProbeFailure& e) {
    EXPECT_EQ(e.property(), "homogeneity");
  }
}

TEST(Reduce, RecoversConstant) {
  const auto g = make_grid(2, 12);
  for (double c0 : {0.5, 3.0, 10.0}) {
    std::vector<double> mu(12);
    for (std::size_t i = 0; i < 12; ++i) mu[i] = c0 * g->weight(i) / 2;
    const auto r = reduce_rotation_invariant(from_measure(g, mu, 2), cyclic_group(*g));
    EXPECT_NEAR(r.c, c0, 1e-9);
    EXPECT_LE(r.residual, 1e-12);
    EXPECT_EQ(r.group_generators, 12u);
  }
}

TEST(Reduce, SingleGeneratorSuffices) {
  const auto g = make_grid(2, 12);
  std::vector<double> mu(12, 1.0);
  const std::vector<Rotation> gen = {Rotation::planar(2 * M_PI / 12)};
  EXPECT_NEAR(reduce_rotation_invariant(from_measure(g, mu, 2), gen).c, 12 / M_PI, 1e-12);
}

TEST(Reduce, DetectsPerturbation) {
  const auto g = make_grid(2, 12);
  std::vector<double> mu(12);
  for (std::size_t i = 0; i < 12; ++i) mu[i] = g->weight(i) / 2;
  mu[7] += 1e-3;
  try {
    reduce_rotation_invariant(from_measure(g, mu, 2), cyclic_group(*g));
    FAIL() << "expected InvarianceViolation";
  } catch (const InvarianceViolation& e) {
    EXPECT_EQ(e.node(), 7u);
    EXPECT_GE(e.residual(), 1e-4);
  }
}

TEST(Reduce, RefusesNonTransitiveGroup) {
  const auto g = make_grid(2, 12);
  const std::vector<Rotation> half_turn = {Rotation::planar(M_PI)};
  try {
    reduce_rotation_invariant(from_measure(g, std::vector<double>(12, 1.0), 2), half_turn);
    FAIL() << "expected NotTransitive";
  } catch (const NotTransitive& e) {
    EXPECT_EQ(e.orbit_size(), 2u);
  }
  const auto g3 = make_grid(3, 4);
  const std::vector<Rotation> azimuth = {Rotation::about_axis({0, 0, 1}, M_PI / 4)};
  EXPECT_THROW(reduce_rotation_invariant(from_measure(g3, std::vector<double>(32, 1.0), 3), azimuth),
               NotTransitive);
}

TEST(Reduce, RotationMustPreserveGrid) {
  const auto g = make_grid(2, 12);
  const std::vector<Rotation> odd = {Rotation::planar(0.1)};
  EXPECT_THROW(reduce_rotation_invariant(from_measure(g, std::vector<double>(12, 1.0), 2), odd),
               GridNotClosed);
}

TEST(Reduce, NeedsMeasureBacking) {
  const auto g = make_grid(2, 4);
  const auto f = from_polymeasure(g, PolyMeasure(1, FinitePartition::node_level(g), {1, 1, 1, 1}));
  EXPECT_THROW(reduce_rotation_invariant(f, cyclic_group(*g)), InvalidArgument);
}

TEST(Witness, PlantedEntryIsCertified) {
  const auto g = make_grid(2, 12);
  for (std::uint64_t t = 0; t < 30; ++t) {
    Rng rng(15, t);
    std::vector<double> mu = random_masses(12, rng);
    auto gamma = diagonal_tensor(g, 2, mu);
    std::vector<double> e(gamma.entries().begin(), gamma.entries().end());
    const std::size_t a = rng.below(12);
    const std::size_t b = (a + 1 + rng.below(11)) % 12;
    const double planted = rng.uniform(0.1, 1.0);
    e[gamma.flat_index(std::vector<std::size_t>{a, b})] = planted;
    const auto f = from_polymeasure(g, PolyMeasure(2, FinitePartition::node_level(g), e));
    const auto w = find_violation_witness(f);
    EXPECT_EQ(w.atoms, (std::vector<std::size_t>{a, b}));
    EXPECT_EQ(w.entry, planted);
    EXPECT_GE(std::abs(w.value), 0.1 - 1e-9);
    const auto sa = sample(w.bodies[w.disjoint_pair.first], g);
    const auto sb = sample(w.bodies[w.disjoint_pair.second], g);
    EXPECT_TRUE(essentially_disjoint(sa, sb));
  }
}

TEST(Witness, Errors) {
  const auto g = make_grid(2, 8);
  EXPECT_THROW(find_violation_witness(from_measure(g, std::vector<double>(8, 1.0), 2)),
               InvalidArgument);
  const auto diag = from_polymeasure(g, diagonal_tensor(g, 2, std::vector<double>(8, 1.0)));
  EXPECT_THROW(find_violation_witness(diag), InvalidArgument);
}

TEST(CyclicGroup, SizeAndClosure) {
  const auto g = make_grid(2, 10);
  const auto group = cyclic_group(*g);
  EXPECT_EQ(group.size(), 10u);
  for (const auto& r : group) EXPECT_NO_THROW(grid_permutation(*g, r));
  EXPECT_THROW(cyclic_group(*make_grid(3, 4)), InvalidArgument);
}

}  // namespace
}  // namespace starform
