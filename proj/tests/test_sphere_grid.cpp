#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "starform/error.hpp"
#include "starform/sphere_grid.hpp"

namespace starform {
namespace {

TEST(MakeGrid, PlanarFourNodes) {
  const auto g = make_grid(2, 4);
  ASSERT_EQ(g->size(), 4u);
  for (std::size_t j = 0; j < 4; ++j) {
    const double theta = M_PI / 2 * static_cast<double>(j);
    EXPECT_NEAR(g->node(j)[0], std::cos(theta), 1e-15);
    EXPECT_NEAR(g->node(j)[1], std::sin(theta), 1e-15);
    EXPECT_DOUBLE_EQ(g->weight(j), M_PI / 2);
  }
}

TEST(MakeGrid, WeightSums) {
  EXPECT_NEAR(integrate(*make_grid(2, 360), std::vector<double>(360, 1.0)), 2 * M_PI, 1e-12);
  const auto g3 = make_grid(3, 16);
  EXPECT_EQ(g3->size(), 16u * 32u);
  EXPECT_NEAR(integrate(*g3, std::vector<double>(g3->size(), 1.0)), 4 * M_PI, 1e-10);
}

TEST(MakeGrid, Errors) {
  EXPECT_THROW(make_grid(4, 16), InvalidArgument);
  EXPECT_THROW(make_grid(1, 16), InvalidArgument);
  EXPECT_THROW(make_grid(2, 3), InvalidArgument);
  EXPECT_THROW(make_grid(3, 2), InvalidArgument);
}

TEST(MakeGrid, InvariantsHoldForEveryConstructibleGrid) {
  for (int dim : {2, 3}) {
    for (int res : {4, 5, 7, 16, 33, 64}) {
      const auto g = make_grid(dim, res);
      EXPECT_NEAR(integrate(*g, std::vector<double>(g->size(), 1.0)), sphere_area(dim), 1e-10);
      for (std::size_t i = 0; i < g->size(); ++i) {
        EXPECT_NEAR(g->node(i).norm(), 1.0, 1e-12);
        EXPECT_GT(g->weight(i), 0.0);
      }
    }
  }
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(8, x, w);
  // Exact up to degree 15: int_{-1}^{1} t^p dt = 2/(p+1) for even p.
  for (int p = 0; p <= 15; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], p);
    EXPECT_NEAR(s, p % 2 == 0 ? 2.0 / (p + 1) : 0.0, 1e-14) << "degree " << p;
  }
}

TEST(Integrate, SecondMomentOnSphere) {
  // int_{S^2} x^2 du = |S^2| / 3.
  const auto g = make_grid(3, 16);
  std::vector<double> v(g->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = g->node(i)[0] * g->node(i)[0];
  EXPECT_NEAR(integrate(*g, v), 4 * M_PI / 3, 1e-12);
}

TEST(Integrate, CosSquaredOnEveryUniformCircleGrid) {
  for (int k = 4; k <= 64; ++k) {
    const auto g = make_grid(2, k);
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = g->node(i)[0] * g->node(i)[0];
    EXPECT_NEAR(integrate(*g, v), M_PI, 1e-12) << "k = " << k;
  }
}

TEST(Integrate, LengthMismatch) {
  EXPECT_THROW(integrate(*make_grid(2, 8), std::vector<double>(7, 1.0)), InvalidArgument);
}

TEST(Integrate, RefinementReducesErrorOnSmoothFunction) {
  auto quad = [](int k) {
    const auto g = make_grid(2, k);
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(g->node(i)[0]);
    return integrate(*g, v);
  };
  const double reference = quad(4096);
  double previous = std::abs(quad(4) - reference);
  for (int k : {5, 6, 7, 8, 10}) {
    const double err = std::abs(quad(k) - reference);
    EXPECT_LT(err, previous) << "k = " << k;
    previous = err;
  }
}

TEST(SphereGrid, RejectsBrokenInvariants) {
  Eigen::MatrixXd nodes(2, 2);
  nodes << 1, -1, 0, 0;
  EXPECT_NO_THROW(SphereGrid(nodes, {M_PI, M_PI}));
  EXPECT_THROW(SphereGrid(nodes, {M_PI, M_PI + 1e-6}), InvalidArgument);
  EXPECT_THROW(SphereGrid(nodes, {2 * M_PI, 0.0}), InvalidArgument);
  Eigen::MatrixXd same(2, 2);
  same << 1, 1, 0, 0;
  EXPECT_THROW(SphereGrid(same, {M_PI, M_PI}), InvalidArgument);
  Eigen::MatrixXd long_node(2, 2);
  long_node << 1.1, -1, 0, 0;
  EXPECT_THROW(SphereGrid(long_node, {M_PI, M_PI}), InvalidArgument);
}

TEST(Rotation, Validation) {
  EXPECT_NO_THROW(Rotation::planar(0.3));
  Eigen::MatrixXd reflection(2, 2);
  reflection << 1, 0, 0, -1;
  EXPECT_THROW(Rotation{reflection}, InvalidArgument);
  Eigen::MatrixXd shear(2, 2);
  shear << 1, 0.1, 0, 1;
  EXPECT_THROW(Rotation{shear}, InvalidArgument);
}

TEST(GridPermutation, CyclicShift) {
  const auto g = make_grid(2, 8);
  const auto p = grid_permutation(*g, Rotation::planar(2 * M_PI / 8));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(p[i], (i + 1) % 8);
}

TEST(GridPermutation, Identity) {
  for (int dim : {2, 3}) {
    const auto g = make_grid(dim, 6);
    const auto p = grid_permutation(*g, Rotation::identity(dim));
    for (std::size_t i = 0; i < g->size(); ++i) EXPECT_EQ(p[i], i);
  }
}

TEST(GridPermutation, NotClosed) {
  const auto g = make_grid(2, 8);
  try {
    grid_permutation(*g, Rotation::planar(M_PI / 3));
    FAIL() << "expected GridNotClosed";
  } catch (const GridNotClosed& e) {
    EXPECT_EQ(e.node(), 0u);
  }
}

TEST(GridPermutation, GeneratorPowerIsIdentity) {
  for (std::size_t k : {4u, 7u, 12u}) {
    const auto g = make_grid(2, static_cast<int>(k));
    const auto step = grid_permutation(*g, Rotation::planar(2 * M_PI / static_cast<double>(k)));
    std::vector<std::size_t> acc(k);
    for (std::size_t i = 0; i < k; ++i) acc[i] = i;
    for (std::size_t r = 0; r < k; ++r) {
      for (auto& x : acc) x = step[x];
      if (r + 1 < k) EXPECT_NE(acc[0], 0u);
    }
    for (std::size_t i = 0; i < k; ++i) EXPECT_EQ(acc[i], i);
  }
}

TEST(GridPermutation, AzimuthalRotationOfProductGrid) {
  const int res = 6;
  const auto g = make_grid(3, res);
  const auto p = grid_permutation(*g, Rotation::about_axis({0, 0, 1}, 2 * M_PI / (2 * res)));
  for (std::size_t i = 0; i < g->size(); ++i) {
    EXPECT_DOUBLE_EQ(g->weight(p[i]), g->weight(i));
    EXPECT_NEAR(g->node(p[i])[2], g->node(i)[2], 1e-12);
  }
}

}  // namespace
}  // namespace starform
