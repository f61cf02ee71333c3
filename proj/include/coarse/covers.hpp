#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coarse/lattice.hpp"
#include "coarse/rational.hpp"
#include "coarse/spaces.hpp"

namespace coarse {

/// A finite family of point sets over a window.
struct Cover {
  SpacePtr space;
  std::vector<std::vector<PointId>> sets;  // each sorted, nonempty
  std::vector<int> family;                 // empty, or one label per set

  /// For every point, the sorted ids of the sets containing it.
  std::vector<std::vector<std::uint32_t>> memberships() const;
  /// Sorts each set, drops empty sets (and their family labels).
  void normalize();
};

class CoverageError : public std::runtime_error {
 public:
  CoverageError(const std::string& what, PointId witness) : std::runtime_error(what), witness_(witness) {}
  PointId witness() const { return witness_; }

 private:
  PointId witness_;
};

struct CoverStats {
  /// Largest r such that every point whose ambient open r-ball lies in the
  /// window has that ball inside one set. kUnbounded when no set boundary is
  /// ever reached inside the window.
  Distance lebesgue = 0;
  int multiplicity = 0;
  Distance mesh = 0;
  std::vector<std::pair<double, double>> delta_p;  // (p, lebesgue / multiplicity^{2/p})

  PointId lebesgue_witness = 0;
  PointId multiplicity_witness = 0;
  std::size_t mesh_witness = 0;  // set id
  std::size_t set_count = 0;
};

/// Exact statistics; throws CoverageError if some point lies in no set.
CoverStats cover_stats(const Cover& cover, const std::vector<double>& p_list = {});

/// psi_U(x) = dist(x, X - U) for every set U through x, where ambient points
/// beyond the window count as outside: the value is capped at
/// interior_radius(x) + 1. Entries are (set id, psi), in set order.
std::vector<std::vector<std::pair<std::uint32_t, Distance>>> set_depths(const Cover& cover);

/// Per-point Lebesgue value: the largest r with the open r-ball around x in
/// one set, capped at interior_radius(x) + 1 where the window ends.
std::vector<Distance> pointwise_lebesgue(const Cover& cover);

/// Intervals [step z - radius, step z + radius] of a Z window, clipped to it.
Cover interval_cover(const std::shared_ptr<const GridSpace>& line, std::int64_t step, std::int64_t radius);

/// One closed ball of radius floor(r) per point.
Cover balls_cover(const SpacePtr& space, const Rational& r);

/// Pullback of the implicit thickened lattice cover through iota on a grid
/// window. Sets are keyed by lattice translate; family[i] is the translate's
/// family.
Cover lattice_pullback_cover(const std::shared_ptr<const GridSpace>& grid, const LatticeCoverSpec& spec);

/// The same implicit cover restricted to the points of an A^{n-1} window.
Cover lattice_window_cover(const std::shared_ptr<const ALatticeSpace>& window, const LatticeCoverSpec& spec);

/// Exact diameter of a point set (pairs pruned through a centre and the
/// triangle inequality).
Distance set_diameter(const FiniteMetricSpace& space, const std::vector<PointId>& set);

struct ZkCoverReport {
  LatticeCoverSpec chosen;
  CoverStats stats;
  std::size_t candidates_tried = 0;
  bool certified_scale = false;  // the chosen scale is L divided by the thickening
};

/// Cover of a Z^k grid window pulled back from the scaled thickened A^{2k-1}
/// lattice cover. Thickening tau is the default or 1/n; the homothety factor
/// runs over multiples of 1/4 up to the certified value L/tau. The
/// smallest-mesh cover whose measured interior Lebesgue number is at least L
/// with multiplicity at most 2k wins.
Cover zk_cover(int k, const Rational& L, const std::shared_ptr<const GridSpace>& window,
               ZkCoverReport* report = nullptr);

/// Explicit map between windows: image[x] is f(x) in the target.
struct PointMap {
  SpacePtr source;
  SpacePtr target;
  std::vector<PointId> image;
};

/// f^{-1} of every set, empty preimages dropped.
Cover pullback_cover(const PointMap& f, const Cover& cover);

/// Compression and dilation of a map measured on all source pairs:
/// rho_minus(t) = min d_Y over pairs with d_X >= t, rho_plus(t) = max d_Y over
/// pairs with d_X <= t.
struct MapDistortion {
  std::vector<Distance> source_distances;  // realized, increasing
  std::vector<Distance> rho_minus;
  std::vector<Distance> rho_plus;
  Distance minus_at(Distance t) const;
  Distance plus_at(Distance t) const;
};
MapDistortion measure_distortion(const PointMap& f);

struct InducedCheck {
  CoverStats source_stats;
  CoverStats target_stats;
  bool lebesgue_ok = false;  // rho_plus(L(f*U)) >= L(U)
  bool mesh_ok = false;      // rho_minus(S(f*U)) <= S(U)
};
InducedCheck check_induced(const PointMap& f, const Cover& cover);

/// Cover of the lamp subgroup window by translates g_alpha V of a cover of
/// its K_m portion, where g_alpha runs over the coset representatives given
/// by lamps outside {-m+1..m-1}.
Cover extend_by_cosets(const Cover& local_cover, int m, const std::shared_ptr<const LamplighterSpace>& window);

/// K_m portion of a window covered through j by the lattice cover of
/// Z^{2m-1} at the scale certifying Lebesgue number `lebesgue` in l1.
Cover local_lamp_cover(const std::shared_ptr<const LamplighterSpace>& local_window, int m, const Rational& lebesgue);

struct WreathCoverReport {
  int m = 0;
  std::int64_t interval_radius = 0;  // r: intervals [ia - r, ia + a - 1 + r] with a = 2r
  LatticeCoverSpec lamp_spec;
  CoverStats stats;
};

/// Cover of a window of Z wr Z with Lebesgue number >= L: the cursor axis is
/// covered by two shifted interval families, each slab is split by coset of
/// the lamps far from the slab centre, and the remaining lamps are covered
/// through j by the lattice cover of Z^{2m-1}, m = ceil(12 L).
Cover wreath_cover(const Rational& L, const std::shared_ptr<const LamplighterSpace>& window,
                   WreathCoverReport* report = nullptr);

struct TypePoint {
  Rational L;
  Distance measured_mesh = 0;
  Distance upper = 0;  // after taking the minimum over larger L
  int multiplicity = 0;
};

/// Upper bounds on D_k(L): measured meshes of the given construction, then
/// replaced by the minimum over all larger tested L so the curve is
/// non-decreasing. Throws if a construction is missing or has multiplicity
/// above k + 1.
std::vector<TypePoint> type_function_upper(const std::function<std::optional<CoverStats>(const Rational&)>& build,
                                           int k, const std::vector<Rational>& L_list);

nlohmann::ordered_json to_json(const Cover& cover);
Cover cover_from_json(const nlohmann::json& j, const SpacePtr& space);

}  // namespace coarse
