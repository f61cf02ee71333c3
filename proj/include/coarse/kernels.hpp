#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "coarse/covers.hpp"
#include "coarse/spaces.hpp"

namespace coarse {

using SparseRow = std::vector<std::pair<PointId, double>>;  // sorted by point, values > 0

/// x -> xi_x, a nonnegative unit vector of l^p over the window. Rows exist
/// for the points in `domain` only (kernels built from rays or maps may not
/// reach every window point).
struct Kernel {
  SpacePtr space;
  double p = 2.0;
  std::vector<SparseRow> rows;  // indexed by point; empty rows are undefined
  std::vector<char> defined;

  bool has(PointId x) const { return x < defined.size() && defined[x]; }
  std::vector<PointId> domain() const;
};

double lp_norm(const SparseRow& row, double p);
double lp_distance(const SparseRow& a, const SparseRow& b, double p);

class KernelNormError : public std::runtime_error {
 public:
  KernelNormError(const std::string& what, PointId witness) : std::runtime_error(what), witness_(witness) {}
  PointId witness() const { return witness_; }

 private:
  PointId witness_;
};

enum class PairPolicy {
  kAuto,      // all pairs up to a size limit, else near pairs plus a fixed-seed far sample
  kAllPairs,
  kEdges,     // pairs at distance 1; exact for geodesically convex graph domains
};

struct PairOptions {
  PairPolicy policy = PairPolicy::kAuto;
  std::size_t all_pairs_limit = 4000;
  std::size_t far_samples = 100000;
  std::uint64_t seed = 1;
  /// Only points with interior_radius >= min_interior take part.
  Distance min_interior = std::numeric_limits<Distance>::min();
  double norm_tolerance = 1e-9;
};

struct KernelStats {
  Distance support_radius = 0;
  double lipschitz = 0;  // max ||xi_x - xi_y||_p / d(x, y) over evaluated pairs
  PointId arg_x = 0, arg_y = 0;
  double max_norm_error = 0;
  std::size_t pairs = 0;
  std::size_t points = 0;
};

/// Throws KernelNormError when some row misses unit norm by more than the
/// tolerance.
KernelStats kernel_stats(const Kernel& kernel, const PairOptions& options = {});

/// Partition-of-unity kernel of a cover:
/// xi_x(z) = (sum_U phi_U(x)^p chi_U(z)^p)^{1/p} with phi_U = psi_U / ||psi(x)||_p
/// and chi_U = psi_U / ||psi_U||_p, psi_U as in set_depths. When psi_U is
/// unbounded (U is all of a complete space) chi_U is the normalized indicator.
Kernel pou_kernel(const Cover& cover, double p);

/// 2 (2 m^2)^{1/p} / L.
double pou_lipschitz_bound(int multiplicity, Distance lebesgue, double p);

/// zeta_x(a_t) = S + 2 - |S - 2t| on the ray a_0 = x, ..., a_S towards the
/// end, normalized. Defined at nodes whose ray of length S fits in the window.
Kernel tree_kernel_tent(const std::shared_ptr<const TreeSpace>& tree, int S, double p);

/// S^{-1/p} on the S ray points a_0..a_{S-1}.
Kernel tree_kernel_flat(const std::shared_ptr<const TreeSpace>& tree, int S, double p);

/// The unnormalized tent norm ||zeta||_p, same for every node.
double tent_norm(int S, double p);

/// (Mf)_i = |f_i|^{q/p - 1} f_i. Throws if ||v||_q differs from 1 by more than 1e-9.
std::vector<double> mazur_map(const std::vector<double>& v, double q, double p);

/// sigma_x(z) = (sum_{s(y) = f(z)} xi_{f(x)}(y)^p)^{1/p} for the retraction s
/// sending y to its nearest point of f(X) (smallest id on ties). When f is not
/// injective the mass of a fibre goes to its smallest-id preimage.
Kernel pullback_kernel(const PointMap& f, const Kernel& kernel);

struct PullbackCheck {
  double max_norm_gap = 0;          // | ||sigma_x|| - ||xi_f(x)|| |
  double max_contraction_excess = 0;  // ||sigma_x - sigma_x'|| - ||xi_f(x) - xi_f(x')||, should be <= 0
  Distance sigma_support = 0;
  Distance xi_support = 0;
  Distance rho_of_sigma_support = 0;  // rho_f(S(sigma))
  std::size_t pairs = 0;
};
PullbackCheck check_pullback(const PointMap& f, const Kernel& xi, const Kernel& sigma);

struct ProfilePoint {
  Distance S = 0;
  double epsilon = 0;     // best measured epsilon with support <= S, then running minimum
  std::string source;     // which construction produced it
  std::optional<double> log_mazur;  // (e^alpha / p) phi(S) log S when requested and S >= e^p
};

struct ProfileCandidate {
  std::string name;
  Distance support = 0;
  double epsilon = 0;
};

struct LogMazurBound {
  double alpha = 0;
  std::function<double(double)> phi;
};

/// Upper bounds on eps_{X;p}(S) from measured candidates; non-increasing in S.
/// Throws when no candidate fits some S.
std::vector<ProfilePoint> epsilon_profile_upper(const std::vector<ProfileCandidate>& candidates,
                                                const std::vector<Distance>& S_list, double p,
                                                const std::optional<LogMazurBound>& log_mazur = std::nullopt);

nlohmann::ordered_json to_json(const Kernel& kernel, Distance support_radius);

}  // namespace coarse
