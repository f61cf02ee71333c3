#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "coarse/embeddings.hpp"

using namespace coarse;

namespace {

// inf { s >= x_0 : pred(g(s)) } scanned on a fine grid.
template <class Pred>
double scan_inverse(const StepFunction& g, Pred pred, double step = 1e-3) {
  for (double s = g.x.front(); s <= g.x.back() + 2; s += step)
    if (pred(g(s))) return s;
  return kInfinity;
}

KernelField tent_field(const std::shared_ptr<const TreeSpace>& tree, const std::vector<int>& levels, double p) {
  KernelField field;
  for (int S : levels) {
    field.levels.push_back(S);
    field.kernels.push_back(tree_kernel_tent(tree, S, p));
    PairOptions opt;
    opt.policy = PairPolicy::kEdges;
    field.eps.push_back(kernel_stats(field.kernels.back(), opt).lipschitz);
  }
  return field;
}

UFamily overlog(double a, double p) {
  UFamily u;
  u.kind = UFamily::Kind::kOverlog;
  u.a = a;
  u.p = p;
  return u;
}

}  // namespace

TEST(GeneralizedInverse, Examples) {
  EXPECT_DOUBLE_EQ(generalized_inverse(TypeCurve{LinearType{1.0}}, 5.0), 5.0);
  EXPECT_DOUBLE_EQ(generalized_inverse(TypeCurve{LinearType{4.0}}, 6.0), 1.5);
  StepFunction g{{0, 1}, {0, 2}, false};
  EXPECT_DOUBLE_EQ(generalized_inverse(g, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(generalized_inverse(g, 0.0), 0.0);
  EXPECT_EQ(generalized_inverse(g, 3.0), kInfinity);
}

TEST(GeneralizedInverse, MatchesAGridScan) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    StepFunction g;
    g.left_continuous = trial % 2 == 0;
    const bool up = trial % 4 < 2;
    double x = 1, v = up ? 0 : 20;
    for (int i = 0; i < 5; ++i) {
      g.x.push_back(x);
      g.v.push_back(v);
      x += 1 + static_cast<double>(rng() % 4);
      v += (up ? 1 : -1) * static_cast<double>(rng() % 5);
    }
    for (double t : {0.5, 2.0, 5.0, 9.0, 15.0}) {
      const double got = generalized_inverse(g, t);
      const double want = up ? scan_inverse(g, [t](double y) { return y >= t; })
                             : scan_inverse(g, [t](double y) { return y > 0 && y <= t; });
      if (std::isinf(want)) {
        EXPECT_TRUE(std::isinf(got));
      } else {
        EXPECT_NEAR(got, want, 2e-3) << "trial " << trial << " t " << t;
      }
    }
  }
}

TEST(WeightFunction, FromLinearCurve) {
  UFamily id;
  auto f = weight_from_type(id, LinearType{2.0}, {4, 8, 16});
  EXPECT_EQ(f.values, (std::vector<double>{2, 4, 8}));
  EXPECT_DOUBLE_EQ(f(5), 4);
  EXPECT_DOUBLE_EQ(f(4), 2);
  EXPECT_DOUBLE_EQ(f(100), 8);
}

TEST(WeightFunction, FromOverlogAndConstant) {
  auto f = weight_from_type(overlog(1, 2), LinearType{1.0}, {4, 8, 16, 32});
  for (std::size_t i = 0; i < f.values.size(); ++i) EXPECT_NEAR(f.values[i], f.breakpoints[i] / std::log(f.breakpoints[i]), 1e-12);
  UFamily c;
  c.kind = UFamily::Kind::kConstant;
  c.constant = 3;
  EXPECT_EQ(weight_from_type(c, LinearType{1.0}, {2, 4}).values, (std::vector<double>{3, 3}));
}

TEST(WeightFunction, StepCurveBeyondItsRangeKeepsTheLastValue) {
  UFamily id;
  auto D = type_curve_from_table({{1, 4}, {2, 8}});
  auto f = weight_from_type(id, D, {4, 8, 16});
  // D reaches 8 just after L = 1, so the infimum is 1 at every breakpoint.
  EXPECT_EQ(f.values, (std::vector<double>{1, 1, 1}));
}

TEST(WeightFunction, RejectsBadInput) {
  WeightFunction f{{1, 2}, {1, 2}};
  EXPECT_THROW(f.validate(), std::invalid_argument);
  f = {{2, 4}, {3, 1}};
  EXPECT_THROW(f.validate(), std::invalid_argument);
}

class TreeEmbedding : public ::testing::TestWithParam<double> {};

TEST_P(TreeEmbedding, AxiomsAndBounds) {
  const double p = GetParam();
  auto tree = tree_ball(3, 7, 16);
  // S / log S is not monotone on [4, 16] for p = 1, so that case uses u(t) = t.
  auto f = weight_from_type(p == 1.0 ? UFamily{} : overlog(1, p), LinearType{1.0}, {4, 8, 16});
  auto emb = build_embedding(tent_field(tree, {4, 8}, p), f, 0);
  EXPECT_DOUBLE_EQ(emb.norm(0), 0.0);
  for (std::size_t j = 0; j < emb.weights().size(); ++j)
    EXPECT_NEAR(emb.weights()[j], std::pow(f.values[j + 1], p) - std::pow(f.values[j], p), 1e-12);

  const double C = emb.theoretical_C();
  const double root2 = std::pow(2.0, 1.0 / p);
  bool saw_touching_pair = false;
  for (PointId x = 0; x < tree->size(); ++x) {
    if (!emb.defined_at(x)) continue;
    for (PointId y = x + 1; y < tree->size(); ++y) {
      if (!emb.defined_at(y)) continue;
      const auto d = static_cast<double>(tree->distance(x, y));
      const auto diff = emb.difference(x, y);
      ASSERT_NEAR(diff.total, emb.distance(y, x), 1e-12);
      ASSERT_LE(diff.total, C * d + 1e-9);
      ASSERT_GE(diff.total, emb.compression_floor(d) - 1e-9);
      for (std::size_t j = 0; j < diff.level_norms.size(); ++j) {
        const double S = emb.weight().breakpoints[j];
        if (2 * S < d) ASSERT_NEAR(diff.level_norms[j], root2, 1e-12);
        // At 2S = d both tents can reach the meeting point.
        if (2 * S == d && diff.level_norms[j] < root2 - 1e-9) saw_touching_pair = true;
      }
    }
  }
  EXPECT_TRUE(saw_touching_pair);
}

INSTANTIATE_TEST_SUITE_P(Exponents, TreeEmbedding, ::testing::Values(1.0, 2.0));

TEST(Embedding, ConstantWeightCollapses) {
  auto tree = tree_ball(3, 4, 8);
  UFamily c;
  c.kind = UFamily::Kind::kConstant;
  c.constant = 2;
  auto emb = build_embedding(tent_field(tree, {4}, 2.0), weight_from_type(c, LinearType{1.0}, {4, 8}), 0);
  EXPECT_DOUBLE_EQ(emb.theoretical_C(), 0.0);
  EXPECT_DOUBLE_EQ(emb.distance(0, 5), 0.0);
}

TEST(Embedding, RejectsMismatchedInput) {
  auto tree = tree_ball(3, 4, 8);
  UFamily id;
  auto f = weight_from_type(id, LinearType{1.0}, {4, 8, 16});
  EXPECT_THROW(build_embedding(tent_field(tree, {4}, 2.0), f, 0), std::invalid_argument);
  EXPECT_THROW(build_embedding(tent_field(tree, {4, 6}, 2.0), f, 0), std::invalid_argument);
  // Support 8 exceeds level 4.
  auto field = tent_field(tree, {8, 8}, 2.0);
  field.levels = {4, 8};
  EXPECT_THROW(build_embedding(field, f, 0), std::invalid_argument);
  // The spine top has no ray of length 8.
  const auto top = static_cast<PointId>(tree->size() - 1);
  EXPECT_THROW(build_embedding(tent_field(tree, {4, 8}, 2.0), f, top), std::invalid_argument);
}

TEST(Compression, MatchesBruteForce) {
  std::mt19937_64 rng(31);
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < 300; ++i) pairs.emplace_back(1 + static_cast<double>(rng() % 10), static_cast<double>(rng() % 1000) / 37.0);
  auto r = compression_report(pairs, [](double d) { return d / 2; });
  double lip = 0;
  for (auto [d, e] : pairs) lip = std::max(lip, e / d);
  EXPECT_DOUBLE_EQ(r.lipschitz_estimate, lip);
  for (const auto& row : r.rows) {
    double lo = kInfinity, hi = 0;
    for (auto [d, e] : pairs) {
      if (d >= row.d) lo = std::min(lo, e);
      if (d <= row.d) hi = std::max(hi, e);
    }
    EXPECT_DOUBLE_EQ(row.rho_minus, lo);
    EXPECT_DOUBLE_EQ(row.rho_plus, hi);
    EXPECT_DOUBLE_EQ(row.floor_2f, row.d / 2);
  }
}

TEST(CpCondition, IdentityDivergesAtPOne) {
  UFamily id;
  auto rows = cp_condition(id, 1.0, 3.0, {10, 20});
  ASSERT_EQ(rows.size(), 2u);
  // int_3^T dt / t = log T - log 3.
  EXPECT_NEAR(rows[1].partial, 20 - std::log(3.0), 0.2);
  EXPECT_EQ(rows[1].verdict, CpVerdict::kDiverging);
}

TEST(CpCondition, OverlogConvergesAtPTwo) {
  auto rows = cp_condition(overlog(1, 2), 2.0, 3.0, {10, 100, 1000, 10000, 100000});
  EXPECT_EQ(rows.back().verdict, CpVerdict::kConverging);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].partial, rows[i - 1].partial);
  EXPECT_LT(rows.back().partial, 1.5);
}

TEST(CpCondition, ConstantIsZero) {
  UFamily c;
  c.kind = UFamily::Kind::kConstant;
  auto rows = cp_condition(c, 2.0, 3.0, {10, 20});
  EXPECT_DOUBLE_EQ(rows[1].partial, 0.0);
  // A single truncation cannot show convergence.
  EXPECT_EQ(rows[0].verdict, CpVerdict::kUndecided);
  EXPECT_EQ(rows[1].verdict, CpVerdict::kConverging);
}

TEST(CpCondition, DecreasingUThrows) {
  EXPECT_THROW(cp_condition(overlog(5, 1), 1.0, 1.5, {10}), std::domain_error);
}
