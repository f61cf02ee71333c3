#include <gtest/gtest.h>

#include <random>

#include "coarse/spaces.hpp"
#include "oracles.hpp"

using namespace coarse;

TEST(GridSpace, DistancesMatchBfs) {
  for (int k : {1, 2, 3}) {
    auto g = grid_space(k, k == 3 ? 2 : 4);
    auto adj = oracle::grid_adjacency(*g);
    for (PointId x = 0; x < g->size(); x += 3) {
      auto d = oracle::bfs(adj, x);
      for (PointId y = 0; y < g->size(); ++y) ASSERT_EQ(g->distance(x, y), d[y]) << k << " " << x << " " << y;
    }
  }
}

TEST(GridSpace, InteriorRadiusIsDistanceToTheBoundary) {
  auto g = grid_space(2, 3);
  for (PointId x = 0; x < g->size(); ++x) {
    auto c = g->coords(x);
    EXPECT_EQ(g->interior_radius(x), 3 - std::max(std::abs(c[0]), std::abs(c[1])));
  }
}

TEST(Spaces, SpheresPartitionBalls) {
  std::vector<SpacePtr> spaces{grid_space(2, 5), tree_ball(3, 5), lamplighter_ball(5), a_lattice_ball(4, 4)};
  for (const auto& s : spaces) {
    for (PointId x = 0; x < s->size(); x += 7) {
      for (Distance r = 0; r <= 4; ++r) {
        std::vector<PointId> expected;
        for (PointId y = 0; y < s->size(); ++y)
          if (s->distance(x, y) == r) expected.push_back(y);
        ASSERT_EQ(s->sphere(x, r), expected) << s->metric_tag() << " x=" << x << " r=" << r;
      }
    }
  }
}

TEST(TreeSpace, DistancesMatchBfs) {
  auto t = tree_ball(3, 5, 7);
  const auto& tree = t->tree();
  auto adj = oracle::tree_adjacency(tree);
  for (PointId x = 0; x < t->size(); ++x) {
    auto d = oracle::bfs(adj, x);
    for (PointId y = 0; y < t->size(); ++y) ASSERT_EQ(t->distance(x, y), d[y]);
  }
  // Root has valence - 1 children; each internal node below it too.
  EXPECT_EQ(tree.children[0].size(), 2u);
  EXPECT_EQ(tree.subtree_size, 1u + 2 + 4 + 8 + 16 + 32);
}

TEST(TreeSpace, RaysClimbTowardsTheEnd) {
  auto t = tree_ball(3, 4, 6);
  const auto& tree = t->tree();
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(tree.size()); ++v) {
    for (int s = 0; s < tree.ray_length(v); ++s) {
      auto a = tree.ray_point(v, s);
      ASSERT_TRUE(a.has_value());
      EXPECT_EQ(tree.distance(v, *a), s);
    }
    EXPECT_FALSE(tree.ray_point(v, tree.ray_length(v)).has_value());
  }
}

TEST(ALattice, DoubledMetricMatchesRationalL1) {
  auto w = a_lattice_ball(4, 3);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    PointId x = rng() % w->size(), y = rng() % w->size();
    auto a = w->point(x), b = w->point(y);
    Rational l1 = 0;
    for (std::size_t j = 0; j < a.size(); ++j) l1 += boost::abs(a[j] - b[j]);
    EXPECT_EQ(Rational(w->distance(x, y)), l1);
    EXPECT_EQ(sum(a), Rational(0));
    EXPECT_EQ(w->index_of(a), x);
  }
}

TEST(Iota, IsAnL1Isometry) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::int64_t> a(3), b(3);
    std::int64_t l1 = 0;
    for (int j = 0; j < 3; ++j) {
      a[j] = static_cast<std::int64_t>(rng() % 21) - 10;
      b[j] = static_cast<std::int64_t>(rng() % 21) - 10;
      l1 += std::abs(a[j] - b[j]);
    }
    auto ia = iota_embed(std::span<const std::int64_t>(a)), ib = iota_embed(std::span<const std::int64_t>(b));
    ASSERT_EQ(ia.size(), 6u);
    Rational d = 0;
    for (int j = 0; j < 6; ++j) d += boost::abs(ia[j] - ib[j]);
    EXPECT_EQ(d, Rational(l1));
    EXPECT_EQ(sum(ia), Rational(0));
  }
}

// On K_m the word metric and the l1 metric of the lamp coordinates differ by
// at most the cursor travel 4(m - 1).
TEST(JEmbed, SandwichOnLocalLamps) {
  for (int m : {2, 3}) {
    auto w = local_lamp_ball(8, m);
    for (PointId x = 0; x < w->size(); ++x) {
      for (PointId y = 0; y < w->size(); ++y) {
        auto jx = j_embed(w->element(x), m), jy = j_embed(w->element(y), m);
        std::int64_t l1 = 0;
        for (std::size_t i = 0; i < jx.size(); ++i) l1 += std::abs(jx[i] - jy[i]);
        const auto d = w->distance(x, y);
        ASSERT_LE(l1, d);
        ASSERT_GE(l1, d - 4 * (m - 1));
      }
    }
  }
}

TEST(Metric, AxiomsHoldOnModelSpaces) {
  std::vector<SpacePtr> spaces{grid_space(2, 3), tree_ball(3, 3), lamplighter_ball(3), lamp_ball(6),
                               a_lattice_ball(3, 2)};
  for (const auto& s : spaces) EXPECT_FALSE(check_metric_axioms(*s).has_value()) << s->window_tag();
}

TEST(Metric, TriangleViolationIsReported) {
  ExplicitSpace bad("bad", {"a", "b", "c"}, {{}, {1}, {5, 1}});
  auto v = check_metric_axioms(bad);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->axiom, "triangle");
}

TEST(Serialization, RoundTrip) {
  std::vector<SpacePtr> spaces{grid_space(2, 2), tree_ball(3, 3), lamplighter_ball(3), a_lattice_ball(3, 2),
                               std::make_shared<ExplicitSpace>("tri", std::vector<std::string>{"a", "b", "c"},
                                                               std::vector<std::vector<Distance>>{{}, {1}, {2, 1}})};
  for (const auto& s : spaces) {
    auto back = space_from_json(to_json(*s));
    ASSERT_EQ(back->size(), s->size());
    EXPECT_EQ(back->metric_tag(), s->metric_tag());
    for (PointId x = 0; x < s->size(); ++x) {
      EXPECT_EQ(back->label(x), s->label(x));
      EXPECT_EQ(back->interior_radius(x), s->interior_radius(x));
      for (PointId y = 0; y < s->size(); ++y) ASSERT_EQ(back->distance(x, y), s->distance(x, y));
    }
  }
}

TEST(Cap, OversizedWindowThrows) {
  const auto saved = point_cap();
  set_point_cap(100);
  EXPECT_THROW(grid_space(2, 10), CapExceeded);
  EXPECT_THROW(lamplighter_ball(6), CapExceeded);
  EXPECT_NO_THROW(grid_space(2, 4));
  set_point_cap(saved);
}
