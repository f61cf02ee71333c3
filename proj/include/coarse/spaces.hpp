#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "coarse/lamplighter.hpp"
#include "coarse/rational.hpp"

namespace coarse {

using PointId = std::uint32_t;
using Distance = std::int64_t;

/// Interior radius of a point in a space that is not a window of anything larger.
inline constexpr Distance kUnbounded = std::numeric_limits<Distance>::max() / 4;

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point cap for constructed windows. COARSE_EMBED_CAP overrides the default.
std::size_t point_cap();
void set_point_cap(std::size_t cap);

/// A finite window of a metric space with an exact integer metric.
///
/// interior_radius(x) is the largest r such that the ambient closed ball
/// B_r(x) lies inside the window; ambient points outside the window are at
/// distance at least interior_radius(x) + 1 from x.
class FiniteMetricSpace {
 public:
  explicit FiniteMetricSpace(std::string window_tag) : window_tag_(std::move(window_tag)) {}
  virtual ~FiniteMetricSpace() = default;

  FiniteMetricSpace(const FiniteMetricSpace&) = delete;
  FiniteMetricSpace& operator=(const FiniteMetricSpace&) = delete;

  virtual std::size_t size() const = 0;
  virtual Distance distance(PointId a, PointId b) const = 0;
  virtual std::string label(PointId x) const = 0;
  /// "l1-grid", "tree", "lamplighter", "a-lattice" or "explicit".
  virtual std::string metric_tag() const = 0;
  virtual Distance interior_radius(PointId x) const = 0;

  /// Window points at distance exactly r from x, in increasing id order.
  virtual std::vector<PointId> sphere(PointId x, Distance r) const;

  /// Window points within distance r of x, ordered by (distance, id).
  std::vector<PointId> ball(PointId x, Distance r) const;

  /// True when sphere() enumerates locally instead of scanning the window.
  virtual bool local_spheres() const { return false; }

  /// True for graph metrics whose window contains a unit-step geodesic
  /// between any two of its points.
  virtual bool geodesically_convex() const { return false; }

  const std::string& window_tag() const { return window_tag_; }

  Distance diameter() const;

 private:
  std::string window_tag_;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

/// Window {-half_width..half_width}^k of Z^k with the l1 metric.
class GridSpace final : public FiniteMetricSpace {
 public:
  GridSpace(int k, int half_width);

  std::size_t size() const override { return count_; }
  Distance distance(PointId a, PointId b) const override;
  std::string label(PointId x) const override;
  std::string metric_tag() const override { return "l1-grid"; }
  Distance interior_radius(PointId x) const override;
  std::vector<PointId> sphere(PointId x, Distance r) const override;
  bool local_spheres() const override { return true; }
  bool geodesically_convex() const override { return true; }

  int dimension() const { return k_; }
  int half_width() const { return half_width_; }
  std::span<const int> coords(PointId x) const {
    return {coords_.data() + static_cast<std::size_t>(x) * k_, static_cast<std::size_t>(k_)};
  }
  std::optional<PointId> index_of(std::span<const std::int64_t> z) const;

 private:
  int k_;
  int half_width_;
  std::size_t count_;
  std::vector<int> coords_;
};

/// A rooted tree of constant valence cut at a given depth, with a spine
/// continuing from the root towards a fixed end. Node 0 is the root;
/// subtree nodes come in breadth-first order, then the spine bottom-up.
struct TreeBall {
  int valence = 3;
  int depth = 1;
  int spine_length = 2;
  std::vector<std::int32_t> parent;   // towards the end; -1 at the spine top
  std::vector<std::int32_t> level;    // distance from the spine top
  std::vector<std::vector<std::int32_t>> children;
  std::size_t subtree_size = 0;       // nodes [0, subtree_size) hang below the root

  std::size_t size() const { return parent.size(); }
  bool on_spine(std::size_t v) const { return v >= subtree_size; }
  /// Depth below the root for subtree nodes.
  int depth_below_root(std::size_t v) const;
  /// The t-th node on the ray from v towards the end, if inside the window.
  std::optional<std::int32_t> ray_point(std::int32_t v, int t) const;
  /// Number of ray points available from v, including v itself.
  int ray_length(std::int32_t v) const { return level[static_cast<std::size_t>(v)] + 1; }
  std::int64_t distance(std::int32_t a, std::int32_t b) const;
};

class TreeSpace final : public FiniteMetricSpace {
 public:
  explicit TreeSpace(std::shared_ptr<const TreeBall> tree);

  std::size_t size() const override { return tree_->size(); }
  Distance distance(PointId a, PointId b) const override;
  std::string label(PointId x) const override;
  std::string metric_tag() const override { return "tree"; }
  Distance interior_radius(PointId x) const override;
  std::vector<PointId> sphere(PointId x, Distance r) const override;
  bool local_spheres() const override { return true; }
  bool geodesically_convex() const override { return true; }

  const TreeBall& tree() const { return *tree_; }
  std::shared_ptr<const TreeBall> tree_ptr() const { return tree_; }

 private:
  std::shared_ptr<const TreeBall> tree_;
};

/// Which subgroup of Z wr Z a lamplighter window samples.
struct LamplighterWindowKind {
  enum class Subgroup { kWhole, kLamps, kLocalLamps };
  Subgroup subgroup = Subgroup::kWhole;
  int m = 0;  // for kLocalLamps: lamps supported in {-m+1..m-1}, cursor 0
  bool contains(const LamplighterElement& g) const;
  std::string describe() const;
};

/// H intersected with the word-metric ball B_R(e) of Z wr Z, for H the whole
/// group, the lamp subgroup K, or a finite-support subgroup K_m.
class LamplighterSpace final : public FiniteMetricSpace {
 public:
  LamplighterSpace(std::vector<LamplighterElement> elements, int radius, LamplighterWindowKind kind);

  std::size_t size() const override { return elements_.size(); }
  Distance distance(PointId a, PointId b) const override;
  std::string label(PointId x) const override { return elements_[x].label(); }
  std::string metric_tag() const override { return "lamplighter"; }
  Distance interior_radius(PointId x) const override;
  std::vector<PointId> sphere(PointId x, Distance r) const override;
  bool local_spheres() const override { return true; }

  const LamplighterElement& element(PointId x) const { return elements_[x]; }
  const std::vector<LamplighterElement>& elements() const { return elements_; }
  std::optional<PointId> index_of(const LamplighterElement& g) const;
  int radius() const { return radius_; }
  const LamplighterWindowKind& kind() const { return kind_; }
  std::int64_t length(PointId x) const { return lengths_[x]; }

 private:
  std::vector<LamplighterElement> elements_;
  std::vector<std::int64_t> lengths_;
  std::unordered_map<LamplighterElement, PointId, LamplighterElementHash> index_;
  std::vector<std::vector<PointId>> identity_spheres_;
  int radius_;
  LamplighterWindowKind kind_;
};

/// Points of A^{n-1} with half-integer coordinates inside an l1 ball of the
/// given radius. Points are stored doubled (w = 2y, integer, sum zero); the
/// l1 distance between such points is always an integer.
class ALatticeSpace final : public FiniteMetricSpace {
 public:
  ALatticeSpace(int n, int radius);

  std::size_t size() const override { return points_.size() / static_cast<std::size_t>(n_); }
  Distance distance(PointId a, PointId b) const override;
  std::string label(PointId x) const override;
  std::string metric_tag() const override { return "a-lattice"; }
  Distance interior_radius(PointId x) const override;
  std::vector<PointId> sphere(PointId x, Distance r) const override;
  bool local_spheres() const override { return true; }

  int ambient_dimension() const { return n_; }
  int radius() const { return radius_; }
  std::span<const std::int64_t> doubled(PointId x) const {
    return {points_.data() + static_cast<std::size_t>(x) * n_, static_cast<std::size_t>(n_)};
  }
  RationalVector point(PointId x) const;
  std::optional<PointId> index_of(const RationalVector& y) const;

 private:
  std::optional<PointId> index_of_doubled(const std::vector<std::int64_t>& w) const;
  const std::vector<std::vector<std::int64_t>>& offsets(Distance r) const;

  int n_;
  int radius_;
  std::vector<std::int64_t> points_;
  std::map<std::vector<std::int64_t>, PointId> index_;
  mutable std::vector<std::vector<std::vector<std::int64_t>>> offsets_;
};

/// A finite space given by its distance matrix.
class ExplicitSpace final : public FiniteMetricSpace {
 public:
  /// lower_triangle[i] holds d(i, 0..i-1). Interior radii default to kUnbounded.
  ExplicitSpace(std::string window_tag, std::vector<std::string> labels,
                std::vector<std::vector<Distance>> lower_triangle,
                std::vector<Distance> interior_radius = {});

  std::size_t size() const override { return labels_.size(); }
  Distance distance(PointId a, PointId b) const override;
  std::string label(PointId x) const override { return labels_[x]; }
  std::string metric_tag() const override { return "explicit"; }
  Distance interior_radius(PointId x) const override { return interior_[x]; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<Distance>> lower_;
  std::vector<Distance> interior_;
};

// Constructors.

std::shared_ptr<const GridSpace> grid_space(int k, int half_width);
std::shared_ptr<const TreeSpace> tree_ball(int valence, int depth, int spine_length = -1);
std::shared_ptr<const LamplighterSpace> lamplighter_ball(int radius);
/// The lamp subgroup K (cursor 0) inside the radius ball, with the restricted metric.
std::shared_ptr<const LamplighterSpace> lamp_ball(int radius);
/// The part of the radius ball lying in K_m.
std::shared_ptr<const LamplighterSpace> local_lamp_ball(int radius, int m);
std::shared_ptr<const ALatticeSpace> a_lattice_ball(int n, int radius);

/// Largest radius accepted by lamplighter_ball.
int lamplighter_radius_cap();

// Embeddings between the model spaces.

/// Z^k -> A^{2k-1}, z -> (1/2)(z_1, -z_1, ..., z_k, -z_k); an l1 isometry.
RationalVector iota_embed(std::span<const std::int64_t> z);
RationalVector iota_embed(std::span<const int> z);

/// K_m -> Z^{2m-1}, the coordinate map (f(-m+1), ..., f(m-1)).
std::vector<std::int64_t> j_embed(const LamplighterElement& x, int m);

// Verification.

struct MetricViolation {
  std::string axiom;
  std::vector<PointId> witness;
};

/// Checks the metric axioms on all pairs/triples when the space is small,
/// otherwise on `samples` pseudo-random triples drawn with the given seed.
std::optional<MetricViolation> check_metric_axioms(const FiniteMetricSpace& space,
                                                   std::size_t exhaustive_limit = 60,
                                                   std::size_t samples = 100,
                                                   std::uint64_t seed = 1);

// Serialization.

nlohmann::ordered_json to_json(const FiniteMetricSpace& space);
/// Rebuilds a space from to_json output. Recomputable metrics are rebuilt from
/// the window tag and checked against the stored labels.
SpacePtr space_from_json(const nlohmann::json& j);

}  // namespace coarse
