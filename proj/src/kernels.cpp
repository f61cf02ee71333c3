#include "coarse/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace coarse {

std::vector<PointId> Kernel::domain() const {
  std::vector<PointId> out;
  for (PointId x = 0; x < defined.size(); ++x) {
    if (defined[x]) out.push_back(x);
  }
  return out;
}

namespace {

double power(double v, double p) {
  if (p == 1.0) return v;
  if (p == 2.0) return v * v;
  return std::pow(v, p);
}

double root(double s, double p) {
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

Kernel empty_kernel(const SpacePtr& space, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("kernel exponent must be >= 1");
  Kernel k;
  k.space = space;
  k.p = p;
  k.rows.assign(space->size(), {});
  k.defined.assign(space->size(), 0);
  return k;
}

// Dense accumulator for building sparse rows.
class Accumulator {
 public:
  explicit Accumulator(std::size_t n) : value_(n, 0.0), touched_flag_(n, 0) {}
  void add(PointId z, double v) {
    if (!touched_flag_[z]) {
      touched_flag_[z] = 1;
      touched_.push_back(z);
    }
    value_[z] += v;
  }
  // Emits (z, root(sum)) and resets.
  SparseRow take(double p) {
    std::sort(touched_.begin(), touched_.end());
    SparseRow row;
    row.reserve(touched_.size());
    for (auto z : touched_) {
      if (value_[z] > 0) row.emplace_back(z, root(value_[z], p));
      value_[z] = 0;
      touched_flag_[z] = 0;
    }
    touched_.clear();
    return row;
  }

 private:
  std::vector<double> value_;
  std::vector<char> touched_flag_;
  std::vector<PointId> touched_;
};

}  // namespace

double lp_norm(const SparseRow& row, double p) {
  double s = 0;
  for (const auto& [z, v] : row) s += power(std::abs(v), p);
  return root(s, p);
}

double lp_distance(const SparseRow& a, const SparseRow& b, double p) {
  double s = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      s += power(std::abs(i->second), p);
      ++i;
    } else if (i == a.end() || j->first < i->first) {
      s += power(std::abs(j->second), p);
      ++j;
    } else {
      s += power(std::abs(i->second - j->second), p);
      ++i;
      ++j;
    }
  }
  return root(s, p);
}

// ---------------------------------------------------------------------------
// Statistics

KernelStats kernel_stats(const Kernel& kernel, const PairOptions& options) {
  const auto& space = *kernel.space;
  KernelStats st;
  std::vector<PointId> pts;
  std::vector<char> in_domain(space.size(), 0);
  for (auto x : kernel.domain()) {
    if (space.interior_radius(x) < options.min_interior) continue;
    pts.push_back(x);
    in_domain[x] = 1;
  }
  st.points = pts.size();

  for (auto x : pts) {
    const auto& row = kernel.rows[x];
    double err = std::abs(lp_norm(row, kernel.p) - 1.0);
    if (err > st.max_norm_error) st.max_norm_error = err;
    if (err > options.norm_tolerance) {
      throw KernelNormError("row of " + space.label(x) + " has norm off by " + std::to_string(err), x);
    }
    for (const auto& [z, v] : row) st.support_radius = std::max(st.support_radius, space.distance(x, z));
  }

  auto visit = [&](PointId x, PointId y) {
    auto d = space.distance(x, y);
    if (d == 0) return;
    ++st.pairs;
    double q = lp_distance(kernel.rows[x], kernel.rows[y], kernel.p) / static_cast<double>(d);
    if (q > st.lipschitz) {
      st.lipschitz = q;
      st.arg_x = x;
      st.arg_y = y;
    }
  };

  auto policy = options.policy;
  if (policy == PairPolicy::kAuto && pts.size() <= options.all_pairs_limit) policy = PairPolicy::kAllPairs;

  switch (policy) {
    case PairPolicy::kAllPairs:
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) visit(pts[i], pts[j]);
      break;
    case PairPolicy::kEdges:
      for (auto x : pts)
        for (auto y : space.sphere(x, 1))
          if (y > x && in_domain[y]) visit(x, y);
      break;
    case PairPolicy::kAuto: {
      // Near pairs exhaustively; beyond 2S the supports are disjoint and the
      // quotient is at most 2/d, so a fixed-seed sample suffices.
      const Distance near = 2 * st.support_radius;
      for (auto x : pts)
        for (auto y : space.ball(x, near))
          if (y > x && in_domain[y]) visit(x, y);
      std::mt19937_64 rng(options.seed);
      std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
      for (std::size_t s = 0; s < options.far_samples; ++s) {
        auto x = pts[pick(rng)], y = pts[pick(rng)];
        if (space.distance(x, y) > near) visit(x, y);
      }
      break;
    }
  }
  return st;
}

// ---------------------------------------------------------------------------
// Partition of unity

double pou_lipschitz_bound(int multiplicity, Distance lebesgue, double p) {
  return 2.0 * std::pow(2.0 * multiplicity * multiplicity, 1.0 / p) / static_cast<double>(lebesgue);
}

Kernel pou_kernel(const Cover& cover, double p) {
  auto kernel = empty_kernel(cover.space, p);
  const auto depth = set_depths(cover);
  const auto n = cover.space->size();

  // chi_U(z)^p = psi_U(z)^p / sum_U psi_U^p, or 1/|U| when psi_U is unbounded.
  std::vector<double> mass(cover.sets.size(), 0.0);
  std::vector<char> unbounded(cover.sets.size(), 0);
  for (PointId z = 0; z < n; ++z) {
    for (auto [s, d] : depth[z]) {
      if (d >= kUnbounded) unbounded[s] = 1;
      else mass[s] += power(static_cast<double>(d), p);
    }
  }
  std::vector<std::vector<std::pair<PointId, double>>> chi_p(cover.sets.size());
  for (PointId z = 0; z < n; ++z) {
    for (auto [s, d] : depth[z]) {
      double v = unbounded[s] ? 1.0 / static_cast<double>(cover.sets[s].size())
                              : power(static_cast<double>(d), p) / mass[s];
      chi_p[s].emplace_back(z, v);
    }
  }

  Accumulator acc(n);
  for (PointId x = 0; x < n; ++x) {
    const auto& here = depth[x];
    if (here.empty()) continue;
    std::size_t infinite = 0;
    double total = 0;
    for (auto [s, d] : here) {
      if (d >= kUnbounded) ++infinite;
      else total += power(static_cast<double>(d), p);
    }
    for (auto [s, d] : here) {
      double phi_p;
      if (infinite) phi_p = d >= kUnbounded ? 1.0 / static_cast<double>(infinite) : 0.0;
      else phi_p = power(static_cast<double>(d), p) / total;
      if (phi_p == 0) continue;
      for (auto [z, c] : chi_p[s]) acc.add(z, phi_p * c);
    }
    kernel.rows[x] = acc.take(p);
    kernel.defined[x] = 1;
  }
  return kernel;
}

// ---------------------------------------------------------------------------
// Trees

double tent_norm(int S, double p) {
  double s = 0;
  for (int t = 0; t <= S; ++t) s += std::pow(static_cast<double>(S + 2 - std::abs(S - 2 * t)), p);
  return std::pow(s, 1.0 / p);
}

namespace {

Kernel ray_kernel(const std::shared_ptr<const TreeSpace>& space, int points, double p,
                  const std::function<double(int)>& value) {
  auto kernel = empty_kernel(space, p);
  const auto& tree = space->tree();
  for (PointId x = 0; x < space->size(); ++x) {
    if (tree.ray_length(static_cast<std::int32_t>(x)) < points) continue;
    SparseRow row;
    auto v = static_cast<std::int32_t>(x);
    for (int t = 0; t < points; ++t) {
      row.emplace_back(static_cast<PointId>(v), value(t));
      if (t + 1 < points) v = tree.parent[static_cast<std::size_t>(v)];
    }
    std::sort(row.begin(), row.end());
    kernel.rows[x] = std::move(row);
    kernel.defined[x] = 1;
  }
  return kernel;
}

}  // namespace

Kernel tree_kernel_tent(const std::shared_ptr<const TreeSpace>& tree, int S, double p) {
  if (S < 1) throw std::invalid_argument("tree_kernel_tent: S must be >= 1");
  if (tree->tree().spine_length < S) throw std::invalid_argument("tree_kernel_tent: spine shorter than S");
  const double norm = tent_norm(S, p);
  return ray_kernel(tree, S + 1, p, [&](int t) { return (S + 2 - std::abs(S - 2 * t)) / norm; });
}

Kernel tree_kernel_flat(const std::shared_ptr<const TreeSpace>& tree, int S, double p) {
  if (S < 1) throw std::invalid_argument("tree_kernel_flat: S must be >= 1");
  if (tree->tree().spine_length < S) throw std::invalid_argument("tree_kernel_flat: spine shorter than S");
  const double v = std::pow(static_cast<double>(S), -1.0 / p);
  return ray_kernel(tree, S, p, [&](int) { return v; });
}

// ---------------------------------------------------------------------------
// Mazur map

std::vector<double> mazur_map(const std::vector<double>& v, double q, double p) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw std::invalid_argument("mazur_map: exponents must be >= 1");
  double s = 0;
  for (double x : v) s += std::pow(std::abs(x), q);
  if (std::abs(std::pow(s, 1.0 / q) - 1.0) > 1e-9) throw std::invalid_argument("mazur_map: input is not a unit vector of l^q");
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(std::copysign(std::pow(std::abs(x), q / p), x));
  return out;
}

// ---------------------------------------------------------------------------
// Pullback

Kernel pullback_kernel(const PointMap& f, const Kernel& kernel) {
  if (f.image.size() != f.source->size()) throw std::invalid_argument("pullback_kernel: map is not total");
  if (f.image.empty()) throw std::invalid_argument("pullback_kernel: f(X) is empty");
  auto out = empty_kernel(f.source, kernel.p);

  // Section of f over f(X): the smallest source id in each fibre.
  std::map<PointId, PointId> section;
  for (PointId x = 0; x < f.image.size(); ++x) section.emplace(f.image[x], x);
  std::vector<PointId> image_points;
  for (auto& [y, x] : section) image_points.push_back(y);

  std::vector<std::int64_t> nearest(f.target->size(), -1);
  auto retract = [&](PointId y) {
    if (nearest[y] >= 0) return static_cast<PointId>(nearest[y]);
    PointId best = image_points.front();
    Distance best_d = f.target->distance(y, best);
    for (auto c : image_points) {
      auto d = f.target->distance(y, c);
      if (d < best_d) {
        best = c;
        best_d = d;
      }
    }
    nearest[y] = best;
    return best;
  };

  Accumulator acc(f.source->size());
  for (PointId x = 0; x < f.source->size(); ++x) {
    if (!kernel.has(f.image[x])) continue;
    for (const auto& [y, v] : kernel.rows[f.image[x]]) acc.add(section.at(retract(y)), power(v, kernel.p));
    out.rows[x] = acc.take(kernel.p);
    out.defined[x] = 1;
  }
  return out;
}

PullbackCheck check_pullback(const PointMap& f, const Kernel& xi, const Kernel& sigma) {
  PullbackCheck r;
  const auto dom = sigma.domain();
  for (auto x : dom) {
    r.max_norm_gap = std::max(r.max_norm_gap, std::abs(lp_norm(sigma.rows[x], sigma.p) - lp_norm(xi.rows[f.image[x]], xi.p)));
    for (const auto& [z, v] : sigma.rows[x]) r.sigma_support = std::max(r.sigma_support, f.source->distance(x, z));
  }
  r.max_contraction_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dom.size(); ++i) {
    for (std::size_t j = i + 1; j < dom.size(); ++j) {
      auto a = dom[i], b = dom[j];
      double lhs = lp_distance(sigma.rows[a], sigma.rows[b], sigma.p);
      double rhs = lp_distance(xi.rows[f.image[a]], xi.rows[f.image[b]], xi.p);
      r.max_contraction_excess = std::max(r.max_contraction_excess, lhs - rhs);
      ++r.pairs;
    }
  }
  for (auto y : xi.domain()) {
    for (const auto& [z, v] : xi.rows[y]) r.xi_support = std::max(r.xi_support, xi.space->distance(y, z));
  }
  r.rho_of_sigma_support = measure_distortion(f).minus_at(r.sigma_support);
  return r;
}

// ---------------------------------------------------------------------------
// Profile

std::vector<ProfilePoint> epsilon_profile_upper(const std::vector<ProfileCandidate>& candidates,
                                                const std::vector<Distance>& S_list, double p,
                                                const std::optional<LogMazurBound>& log_mazur) {
  std::vector<Distance> scales = S_list;
  std::sort(scales.begin(), scales.end());
  std::vector<ProfilePoint> out;
  for (auto S : scales) {
    ProfilePoint pt;
    pt.S = S;
    pt.epsilon = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
      if (c.support <= S && c.epsilon < pt.epsilon) {
        pt.epsilon = c.epsilon;
        pt.source = c.name;
      }
    }
    // eps_{X;p} is non-increasing, so a smaller scale's bound carries over.
    if (!out.empty() && out.back().epsilon <= pt.epsilon) {
      pt.epsilon = out.back().epsilon;
      pt.source = out.back().source;
    }
    if (!std::isfinite(pt.epsilon)) throw std::invalid_argument("epsilon_profile_upper: no construction with support <= " + std::to_string(S));
    if (log_mazur && static_cast<double>(S) >= std::exp(p)) {
      auto s = static_cast<double>(S);
      pt.log_mazur = std::exp(log_mazur->alpha) / p * log_mazur->phi(s) * std::log(s);
    }
    out.push_back(std::move(pt));
  }
  return out;
}

nlohmann::ordered_json to_json(const Kernel& kernel, Distance support_radius) {
  nlohmann::ordered_json j;
  j["p"] = kernel.p;
  j["S"] = support_radius;
  auto rows = nlohmann::ordered_json::array();
  for (auto x : kernel.domain()) {
    nlohmann::ordered_json row;
    row["x"] = x;
    auto support = nlohmann::ordered_json::array();
    for (const auto& [z, v] : kernel.rows[x]) support.push_back({z, v});
    row["support"] = std::move(support);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace coarse
