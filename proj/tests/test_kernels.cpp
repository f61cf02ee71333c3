#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "coarse/kernels.hpp"

using namespace coarse;

namespace {

// Dense l^p difference of two sparse rows, written out without merging.
double dense_distance(const SparseRow& a, const SparseRow& b, double p) {
  std::map<PointId, double> diff;
  for (auto [z, v] : a) diff[z] += v;
  for (auto [z, v] : b) diff[z] -= v;
  double s = 0;
  for (auto& [z, v] : diff) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

// max ||xi_x - xi_y|| / d(x, y) over every pair of defined points.
double brute_lipschitz(const Kernel& k, Distance min_interior) {
  double best = 0;
  const auto& s = *k.space;
  for (PointId x = 0; x < s.size(); ++x) {
    if (!k.has(x) || s.interior_radius(x) < min_interior) continue;
    for (PointId y = x + 1; y < s.size(); ++y) {
      if (!k.has(y) || s.interior_radius(y) < min_interior) continue;
      best = std::max(best, dense_distance(k.rows[x], k.rows[y], k.p) / static_cast<double>(s.distance(x, y)));
    }
  }
  return best;
}

}  // namespace

TEST(Lp, NormsAndDistances) {
  SparseRow a{{0, 3.0}, {2, 4.0}}, b{{1, 1.0}, {2, 4.0}};
  EXPECT_DOUBLE_EQ(lp_norm(a, 2), 5.0);
  EXPECT_DOUBLE_EQ(lp_norm(a, 1), 7.0);
  EXPECT_DOUBLE_EQ(lp_distance(a, b, 1), 4.0);
  EXPECT_DOUBLE_EQ(lp_distance(a, b, 2), std::sqrt(10.0));
  EXPECT_NEAR(lp_distance(a, b, 3), dense_distance(a, b, 3), 1e-12);
}

TEST(PouKernel, UnitRowsAndLipschitzBound) {
  auto line = grid_space(1, 40);
  auto cover = interval_cover(line, 8, 4);
  auto st = cover_stats(cover);
  for (double p : {1.0, 2.0, 3.0}) {
    auto k = pou_kernel(cover, p);
    PairOptions opt;
    opt.policy = PairPolicy::kAllPairs;
    opt.min_interior = st.lebesgue - 1;
    auto ks = kernel_stats(k, opt);
    EXPECT_LT(ks.max_norm_error, 1e-12);
    EXPECT_LE(ks.support_radius, st.mesh);
    EXPECT_NEAR(ks.lipschitz, brute_lipschitz(k, st.lebesgue - 1), 1e-12);
    EXPECT_LE(ks.lipschitz, pou_lipschitz_bound(st.multiplicity, st.lebesgue, p));
  }
}

TEST(PouKernel, EdgesAgreeWithAllPairsOnAGrid) {
  auto g = grid_space(2, 6);
  auto cover = balls_cover(g, Rational(2));
  auto k = pou_kernel(cover, 2.0);
  PairOptions all, edges;
  all.policy = PairPolicy::kAllPairs;
  edges.policy = PairPolicy::kEdges;
  EXPECT_NEAR(kernel_stats(k, all).lipschitz, kernel_stats(k, edges).lipschitz, 1e-12);
}

TEST(PouKernel, LipschitzBoundFormula) {
  EXPECT_DOUBLE_EQ(pou_lipschitz_bound(2, 1, 1.0), 16.0);
  EXPECT_DOUBLE_EQ(pou_lipschitz_bound(2, 4, 2.0), 2 * std::sqrt(8.0) / 4);
}

TEST(TreeKernels, TentRowsFollowTheRay) {
  auto t = tree_ball(3, 5, 8);
  const auto& tree = t->tree();
  const int S = 4;
  for (double p : {1.0, 2.0}) {
    auto k = tree_kernel_tent(t, S, p);
    double norm = 0;
    for (int i = 0; i <= S; ++i) norm += std::pow(S + 2 - std::abs(S - 2 * i), p);
    norm = std::pow(norm, 1.0 / p);
    EXPECT_NEAR(tent_norm(S, p), norm, 1e-12);
    for (PointId x = 0; x < t->size(); ++x) {
      ASSERT_EQ(k.has(x), tree.ray_length(static_cast<std::int32_t>(x)) > S);
      if (!k.has(x)) continue;
      std::map<PointId, double> expected;
      for (int i = 0; i <= S; ++i) expected[*tree.ray_point(static_cast<std::int32_t>(x), i)] = (S + 2 - std::abs(S - 2 * i)) / norm;
      ASSERT_EQ(k.rows[x].size(), expected.size());
      for (auto [z, v] : k.rows[x]) EXPECT_NEAR(v, expected[z], 1e-12);
    }
    PairOptions opt;
    opt.policy = PairPolicy::kAllPairs;
    auto ks = kernel_stats(k, opt);
    EXPECT_LE(ks.support_radius, S);
    EXPECT_NEAR(ks.lipschitz, brute_lipschitz(k, std::numeric_limits<Distance>::min()), 1e-12);
    EXPECT_LE(ks.lipschitz, 8.0 / S + 1e-9);
  }
}

TEST(TreeKernels, FlatKernelNeighbourDistance) {
  auto t = tree_ball(3, 4, 8);
  const int S = 5;
  auto k = tree_kernel_flat(t, S, 2.0);
  PairOptions opt;
  opt.policy = PairPolicy::kEdges;
  auto ks = kernel_stats(k, opt);
  EXPECT_EQ(ks.support_radius, S - 1);
  // Neighbouring rays share S - 1 points.
  EXPECT_NEAR(ks.lipschitz, std::sqrt(2.0 / S), 1e-12);
}

TEST(Mazur, MapsUnitSpheres) {
  std::vector<double> v{0.6, -0.8};
  auto w = mazur_map(v, 2.0, 1.0);
  EXPECT_NEAR(std::abs(w[0]) + std::abs(w[1]), 1.0, 1e-12);
  EXPECT_LT(w[1], 0);
  EXPECT_THROW(mazur_map({0.5, 0.5}, 2.0, 1.0), std::invalid_argument);
}

TEST(Pullback, IdentityKeepsTheKernel) {
  auto g = grid_space(2, 4);
  auto xi = pou_kernel(balls_cover(g, Rational(1)), 2.0);
  PointMap id{g, g, {}};
  for (PointId x = 0; x < g->size(); ++x) id.image.push_back(x);
  auto sigma = pullback_kernel(id, xi);
  for (PointId x = 0; x < g->size(); ++x) {
    ASSERT_EQ(sigma.rows[x].size(), xi.rows[x].size());
    for (std::size_t i = 0; i < xi.rows[x].size(); ++i) EXPECT_NEAR(sigma.rows[x][i].second, xi.rows[x][i].second, 1e-12);
  }
  auto check = check_pullback(id, xi, sigma);
  EXPECT_LT(check.max_norm_gap, 1e-12);
  EXPECT_LE(check.max_contraction_excess, 1e-12);
}

TEST(Pullback, LineIntoPlaneContracts) {
  auto line = grid_space(1, 5);
  auto plane = grid_space(2, 5);
  PointMap f{line, plane, {}};
  for (PointId x = 0; x < line->size(); ++x) {
    std::vector<std::int64_t> z{line->coords(x)[0], 0};
    f.image.push_back(*plane->index_of(z));
  }
  auto xi = pou_kernel(balls_cover(plane, Rational(2)), 2.0);
  auto sigma = pullback_kernel(f, xi);
  auto check = check_pullback(f, xi, sigma);
  EXPECT_LT(check.max_norm_gap, 1e-12);
  EXPECT_LE(check.max_contraction_excess, 1e-12);
  EXPECT_LE(check.rho_of_sigma_support, 3 * check.xi_support);
}

TEST(Profile, UpperCurveIsNonIncreasing) {
  std::vector<ProfileCandidate> c{{"a", 2, 1.0}, {"b", 4, 2.0}, {"c", 8, 0.25}};
  auto curve = epsilon_profile_upper(c, {8, 2, 4, 16}, 2.0);
  ASSERT_EQ(curve.size(), 4u);
  EXPECT_EQ(curve[0].S, 2);
  EXPECT_DOUBLE_EQ(curve[1].epsilon, 1.0);
  EXPECT_EQ(curve[1].source, "a");
  EXPECT_DOUBLE_EQ(curve[2].epsilon, 0.25);
  for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i].epsilon, curve[i - 1].epsilon);
  EXPECT_THROW(epsilon_profile_upper(c, {1}, 2.0), std::invalid_argument);
}

TEST(KernelStats, BrokenRowIsReported) {
  auto g = grid_space(1, 3);
  auto k = pou_kernel(interval_cover(g, 2, 1), 2.0);
  k.rows[2][0].second *= 2;
  try {
    kernel_stats(k);
    FAIL() << "expected KernelNormError";
  } catch (const KernelNormError& e) {
    EXPECT_EQ(e.witness(), 2u);
  }
}
