#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "coarse/lattice.hpp"

using namespace coarse;

namespace {

RationalVector random_zero_sum(std::mt19937_64& rng, int n, int den, int spread) {
  RationalVector y(static_cast<std::size_t>(n));
  Rational total = 0;
  for (int i = 0; i + 1 < n; ++i) {
    y[static_cast<std::size_t>(i)] = Rational(static_cast<std::int64_t>(rng() % (2 * spread + 1)) - spread, den);
    total += y[static_cast<std::size_t>(i)];
  }
  y.back() = -total;
  return y;
}

std::vector<int> subset(std::uint32_t mask, int n) {
  std::vector<int> I;
  for (int i = 0; i < n; ++i)
    if (mask >> i & 1u) I.push_back(i);
  return I;
}

// Every translate (family, lambda) with lambda in a box, tested through all
// subsets.
std::vector<LatticeTranslate> brute_membership(const RationalVector& x, const LatticeCoverSpec& spec) {
  const int n = spec.n;
  std::vector<LatticeTranslate> out;
  for (int family = 0; family < n; ++family) {
    auto glue = glue_vector(n, family);
    RationalVector b(x.size());
    std::int64_t lo = 0, hi = 0;
    for (int j = 0; j < n; ++j) {
      b[j] = x[j] / spec.scale - glue[j];
      lo = std::min(lo, floor(b[j]) - 2);
      hi = std::max(hi, ceil(b[j]) + 2);
    }
    std::vector<std::int64_t> lambda(static_cast<std::size_t>(n), lo);
    while (true) {
      std::int64_t s = 0;
      for (auto v : lambda) s += v;
      if (s == 0) {
        RationalVector d(x.size());
        for (int j = 0; j < n; ++j) d[j] = b[j] - lambda[j];
        if (in_cell_by_subsets(d, spec.thickening, spec.open)) out.push_back({family, lambda});
      }
      int j = 0;
      while (j < n && lambda[j] == hi) lambda[j++] = lo;
      if (j == n) break;
      ++lambda[j];
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(PhiI, WorkedExample) {
  RationalVector x{Rational(-3, 8), Rational(-1, 8), Rational(1, 8), Rational(3, 8)};
  EXPECT_EQ(phi_I(x, {3}), Rational(1, 2));
  EXPECT_EQ(phi_I(x, {0, 1}), Rational(-1, 2));
}

TEST(PhiI, AntisymmetricAndBoundedByL1) {
  std::mt19937_64 rng(11);
  for (int n : {2, 4, 6}) {
    for (int trial = 0; trial < 50; ++trial) {
      auto x = random_zero_sum(rng, n, 12, 30);
      for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        auto I = subset(mask, n), J = subset(~mask & ((1u << n) - 1), n);
        EXPECT_EQ(phi_I(x, I), -phi_I(x, J));
        EXPECT_LE(phi_I(x, I), l1_norm(x) * Rational(n, 2 * (n - 1)));
      }
    }
  }
}

TEST(Cell, PrefixTestAgreesWithSubsets) {
  std::mt19937_64 rng(13);
  for (int n : {2, 4, 6}) {
    for (int trial = 0; trial < 400; ++trial) {
      auto y = random_zero_sum(rng, n, 24, 20);
      for (auto tau : {Rational(0), Rational(1, 2 * (n - 1)), Rational(1, n)}) {
        for (bool strict : {false, true}) ASSERT_EQ(in_cell(y, tau, strict), in_cell_by_subsets(y, tau, strict));
      }
    }
  }
}

TEST(Cell, ThickeningIsTheL1Neighbourhood) {
  std::mt19937_64 rng(17);
  for (int n : {2, 4}) {
    for (int trial = 0; trial < 400; ++trial) {
      auto y = random_zero_sum(rng, n, 24, 24);
      const auto d = distance_to_cell(y);
      EXPECT_EQ(d == 0, in_cell(y));
      for (auto tau : {Rational(1, 6), Rational(1, 4), Rational(1, 2)}) EXPECT_EQ(in_cell(y, tau), d <= tau);
    }
  }
}

TEST(Glue, VectorsAreInTheHyperplane) {
  for (int n : {2, 4, 6}) {
    EXPECT_EQ(l1_norm(glue_vector(n, 0)), Rational(0));
    for (int i = 0; i < n; ++i) EXPECT_EQ(sum(glue_vector(n, i)), Rational(0));
  }
}

TEST(Membership, MatchesBruteForceAndDoubledArithmetic) {
  std::mt19937_64 rng(19);
  for (int n : {2, 4}) {
    for (auto scale : {Rational(1), Rational(5, 2)}) {
      for (bool open : {true, false}) {
        LatticeCoverSpec spec{n, scale, LatticeCoverSpec::default_thickening(n), open};
        for (int trial = 0; trial < 60; ++trial) {
          auto x = random_zero_sum(rng, n, 2, 8);
          auto got = voronoi_membership(x, spec);
          std::sort(got.begin(), got.end());
          ASSERT_EQ(got, brute_membership(x, spec));
          ASSERT_FALSE(got.empty());
          // Closed cells of one family touch at the largest thickening.
          if (open) ASSERT_LE(static_cast<int>(got.size()), n);
          std::vector<std::int64_t> w;
          for (const auto& v : x) w.push_back((v * 2).numerator());
          auto doubled = voronoi_membership_doubled(w, spec);
          std::sort(doubled.begin(), doubled.end());
          ASSERT_EQ(doubled, got);
          if (open)
            for (std::size_t i = 1; i < got.size(); ++i) EXPECT_NE(got[i].family, got[i - 1].family);
        }
      }
    }
  }
}

TEST(Separation, BoundHoldsOnSampledCellPoints) {
  EXPECT_EQ(translate_separation_bound({1, -1}), Rational(1));
  EXPECT_EQ(translate_separation_bound({1, -1, 0, 0}), Rational(1, 2));
  std::mt19937_64 rng(23);
  const int n = 4;
  std::vector<RationalVector> cell;
  while (cell.size() < 300) {
    auto y = random_zero_sum(rng, n, 24, 18);
    if (in_cell(y)) cell.push_back(y);
  }
  for (const std::vector<std::int64_t>& mu : {std::vector<std::int64_t>{1, -1, 0, 0}, {1, 1, -1, -1}, {2, -1, -1, 0}}) {
    const auto bound = translate_separation_bound(mu);
    EXPECT_GE(bound, Rational(1, n - 1));
    for (const auto& a : cell) {
      for (const auto& b : cell) {
        Rational d = 0;
        for (int j = 0; j < n; ++j) d += boost::abs(a[j] - b[j] - mu[j]);
        ASSERT_GE(d, bound);
      }
    }
  }
}
