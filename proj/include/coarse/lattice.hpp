#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "coarse/rational.hpp"

namespace coarse {

/// Thickened lattice cover of A^{n-1} = {x in Q^n : sum x = 0}.
///
/// Family i consists of the sets scale * ([i] + lambda + V_tau) for lambda in
/// the root lattice A_{n-1} = A^{n-1} cap Z^n, where V is the cell cut out by
/// phi_I <= 1/2 and V_tau its l1 thickening.
struct LatticeCoverSpec {
  int n = 2;
  Rational scale{1};
  Rational thickening{1, 2};
  bool open = true;  // open thickening (strict inequalities)

  void validate() const;
  /// 1/(2(n-1)), the largest thickening keeping each family disjoint.
  static Rational default_thickening(int n) { return Rational(1, 2 * (n - 1)); }
};

/// (sum_{i in I} x_i)/#I - (sum_{i not in I} x_i)/#I^c, with I given as
/// 0-based coordinate indices.
Rational phi_I(const RationalVector& x, const std::vector<int>& I);

/// Membership in V thickened by tau, tested through every nonempty proper
/// subset I (2^n - 2 conditions). Used as the reference for small n.
bool in_cell_by_subsets(const RationalVector& y, const Rational& tau = 0, bool strict = false);

/// The same test through the n - 1 prefix sums of the sorted coordinates.
bool in_cell(const RationalVector& y, const Rational& tau = 0, bool strict = false);

/// max_j max(0, 2 (top_j(y) - j(n-j)/(2n))), the l1 distance from y to V.
Rational distance_to_cell(const RationalVector& y);

/// The shift vector [i] of family i, with [i]_j = (i - n)/n for j <= i and
/// i/n otherwise (1-based j).
RationalVector glue_vector(int n, int i);

struct LatticeTranslate {
  int family = 0;
  std::vector<std::int64_t> lambda;
  auto operator<=>(const LatticeTranslate&) const = default;
};

/// All translates (i, lambda) whose scaled thickened cell contains x.
std::vector<LatticeTranslate> voronoi_membership(const RationalVector& x, const LatticeCoverSpec& spec);

/// voronoi_membership for x = w/2 with w an integer vector of zero sum,
/// evaluated in integer arithmetic after clearing all denominators.
std::vector<LatticeTranslate> voronoi_membership_doubled(std::span<const std::int64_t> w, const LatticeCoverSpec& spec);

/// Certified lower bound on the l1 distance between lambda + V and
/// lambda + mu + V: max over subsets I of 2 (sum_I mu - #I #I^c / n).
Rational translate_separation_bound(const std::vector<std::int64_t>& mu);

}  // namespace coarse
