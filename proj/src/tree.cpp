#include <algorithm>
#include <deque>

#include "coarse/spaces.hpp"

namespace coarse {

int TreeBall::depth_below_root(std::size_t v) const {
  return level[v] - spine_length;
}

std::optional<std::int32_t> TreeBall::ray_point(std::int32_t v, int t) const {
  if (t < 0 || t > level[static_cast<std::size_t>(v)]) return std::nullopt;
  for (int i = 0; i < t; ++i) v = parent[static_cast<std::size_t>(v)];
  return v;
}

std::int64_t TreeBall::distance(std::int32_t a, std::int32_t b) const {
  std::int64_t d = 0;
  while (level[static_cast<std::size_t>(a)] > level[static_cast<std::size_t>(b)]) {
    a = parent[static_cast<std::size_t>(a)];
    ++d;
  }
  while (level[static_cast<std::size_t>(b)] > level[static_cast<std::size_t>(a)]) {
    b = parent[static_cast<std::size_t>(b)];
    ++d;
  }
  while (a != b) {
    a = parent[static_cast<std::size_t>(a)];
    b = parent[static_cast<std::size_t>(b)];
    d += 2;
  }
  return d;
}

TreeSpace::TreeSpace(std::shared_ptr<const TreeBall> tree)
    : FiniteMetricSpace("tree valence=" + std::to_string(tree->valence) + " depth=" +
                        std::to_string(tree->depth) + " spine=" + std::to_string(tree->spine_length)),
      tree_(std::move(tree)) {}

Distance TreeSpace::distance(PointId a, PointId b) const {
  return tree_->distance(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
}

std::string TreeSpace::label(PointId x) const {
  if (tree_->on_spine(x)) return "s" + std::to_string(x - tree_->subtree_size + 1);
  return "v" + std::to_string(x);
}

Distance TreeSpace::interior_radius(PointId x) const {
  // Ambient valence-regular tree: the spine carries no side branches inside
  // the window, so spine nodes sit on the window boundary.
  if (tree_->on_spine(x)) return 0;
  auto delta = tree_->depth_below_root(x);
  return std::min(tree_->depth - delta, delta + 1);
}

std::vector<PointId> TreeSpace::sphere(PointId x, Distance r) const {
  if (r < 0) return {};
  // Layered walk that never steps back to the node it came from.
  std::vector<std::pair<std::int32_t, std::int32_t>> layer{{static_cast<std::int32_t>(x), -1}};
  for (Distance step = 0; step < r && !layer.empty(); ++step) {
    std::vector<std::pair<std::int32_t, std::int32_t>> next;
    for (auto [v, from] : layer) {
      auto up = tree_->parent[static_cast<std::size_t>(v)];
      if (up >= 0 && up != from) next.emplace_back(up, v);
      for (auto c : tree_->children[static_cast<std::size_t>(v)]) {
        if (c != from) next.emplace_back(c, v);
      }
    }
    layer = std::move(next);
  }
  std::vector<PointId> out;
  out.reserve(layer.size());
  for (auto [v, from] : layer) out.push_back(static_cast<PointId>(v));
  std::sort(out.begin(), out.end());
  return out;
}

std::shared_ptr<const TreeSpace> tree_ball(int valence, int depth, int spine_length) {
  if (valence < 3) throw std::invalid_argument("tree_ball: valence must be >= 3");
  if (depth < 1) throw std::invalid_argument("tree_ball: depth must be >= 1");
  if (spine_length < 0) spine_length = 2 * depth;
  if (spine_length < 1) throw std::invalid_argument("tree_ball: spine length must be >= 1");

  // Count first so the cap is checked before allocating.
  std::size_t count = 0;
  std::size_t layer = 1;
  for (int d = 0; d <= depth; ++d) {
    count += layer;
    if (count > point_cap()) throw CapExceeded("tree_ball: node count exceeds cap");
    layer *= static_cast<std::size_t>(valence - 1);
  }

  auto tree = std::make_shared<TreeBall>();
  tree->valence = valence;
  tree->depth = depth;
  tree->spine_length = spine_length;
  tree->subtree_size = count;
  std::size_t total = count + static_cast<std::size_t>(spine_length);
  tree->parent.assign(total, -1);
  tree->level.assign(total, 0);
  tree->children.assign(total, {});

  std::int32_t next = 1;
  std::deque<std::int32_t> queue{0};
  tree->level[0] = spine_length;
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    if (tree->level[static_cast<std::size_t>(v)] - spine_length == depth) continue;
    for (int c = 0; c < valence - 1; ++c) {
      auto child = next++;
      tree->parent[static_cast<std::size_t>(child)] = v;
      tree->level[static_cast<std::size_t>(child)] = tree->level[static_cast<std::size_t>(v)] + 1;
      tree->children[static_cast<std::size_t>(v)].push_back(child);
      queue.push_back(child);
    }
  }
  // Spine node t (1-based, bottom-up) has id count + t - 1.
  for (int t = 1; t <= spine_length; ++t) {
    auto id = static_cast<std::int32_t>(count) + t - 1;
    auto below = (t == 1) ? 0 : id - 1;
    tree->parent[static_cast<std::size_t>(below)] = id;
    tree->children[static_cast<std::size_t>(id)].push_back(below);
    tree->level[static_cast<std::size_t>(id)] = spine_length - t;
  }
  return std::make_shared<TreeSpace>(std::move(tree));
}

}  // namespace coarse
