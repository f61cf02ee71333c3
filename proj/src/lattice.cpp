#include "coarse/lattice.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

namespace coarse {

void LatticeCoverSpec::validate() const {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("lattice cover: n must be even and >= 2");
  if (scale <= 0) throw std::invalid_argument("lattice cover: scale must be positive");
  if (thickening <= 0) throw std::invalid_argument("lattice cover: thickening must be positive");
}

namespace {

void require_zero_sum(const RationalVector& x, const char* who) {
  if (sum(x) != 0) throw std::invalid_argument(std::string(who) + ": point is not in A^{n-1} (nonzero sum)");
}

// Bound on sum_I y for #I = j: j(n-j)/(2n) plus half the thickening.
Rational prefix_bound(int n, int j, const Rational& tau) {
  return Rational(j * (n - j), 2 * n) + tau / 2;
}

bool within(const Rational& value, const Rational& bound, bool strict) {
  return strict ? value < bound : value <= bound;
}

}  // namespace

Rational phi_I(const RationalVector& x, const std::vector<int>& I) {
  const int n = static_cast<int>(x.size());
  std::vector<char> in(x.size(), 0);
  for (int i : I) {
    if (i < 0 || i >= n) throw std::invalid_argument("phi_I: index out of range");
    if (in[static_cast<std::size_t>(i)]) throw std::invalid_argument("phi_I: repeated index");
    in[static_cast<std::size_t>(i)] = 1;
  }
  const int size = static_cast<int>(I.size());
  if (size == 0 || size == n) throw std::invalid_argument("phi_I: I must be nonempty and proper");
  Rational inside = 0, outside = 0;
  for (int i = 0; i < n; ++i) (in[static_cast<std::size_t>(i)] ? inside : outside) += x[static_cast<std::size_t>(i)];
  return inside / size - outside / (n - size);
}

bool in_cell_by_subsets(const RationalVector& y, const Rational& tau, bool strict) {
  require_zero_sum(y, "in_cell_by_subsets");
  const int n = static_cast<int>(y.size());
  if (n > 20) throw std::invalid_argument("in_cell_by_subsets: n too large for subset enumeration");
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    Rational s = 0;
    int size = 0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1u) {
        s += y[static_cast<std::size_t>(i)];
        ++size;
      }
    }
    if (!within(s, prefix_bound(n, size, tau), strict)) return false;
  }
  return true;
}

bool in_cell(const RationalVector& y, const Rational& tau, bool strict) {
  require_zero_sum(y, "in_cell");
  const int n = static_cast<int>(y.size());
  // For fixed #I = j the largest sum_I y takes the j largest coordinates.
  RationalVector sorted = y;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  Rational prefix = 0;
  for (int j = 1; j < n; ++j) {
    prefix += sorted[static_cast<std::size_t>(j - 1)];
    if (!within(prefix, prefix_bound(n, j, tau), strict)) return false;
  }
  return true;
}

Rational distance_to_cell(const RationalVector& y) {
  require_zero_sum(y, "distance_to_cell");
  const int n = static_cast<int>(y.size());
  RationalVector sorted = y;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  Rational prefix = 0, worst = 0;
  for (int j = 1; j < n; ++j) {
    prefix += sorted[static_cast<std::size_t>(j - 1)];
    worst = std::max(worst, 2 * (prefix - prefix_bound(n, j, 0)));
  }
  return worst;
}

RationalVector glue_vector(int n, int i) {
  if (i < 0 || i >= n) throw std::invalid_argument("glue_vector: family index out of range");
  RationalVector g;
  g.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) g.emplace_back(j <= i ? i - n : i, n);
  return g;
}

std::vector<LatticeTranslate> voronoi_membership(const RationalVector& x, const LatticeCoverSpec& spec) {
  spec.validate();
  if (static_cast<int>(x.size()) != spec.n) throw std::invalid_argument("voronoi_membership: dimension mismatch");
  require_zero_sum(x, "voronoi_membership");
  const int n = spec.n;
  const auto tau = spec.thickening;
  // Every coordinate of a point of V_tau lies within (n-1)/(2n) + tau/2 of 0,
  // so lambda_j ranges over the integers that close to b_j.
  const Rational reach = Rational(n - 1, 2 * n) + tau / 2;

  std::vector<LatticeTranslate> out;
  std::vector<std::vector<std::int64_t>> options(static_cast<std::size_t>(n));
  std::vector<std::int64_t> lambda(static_cast<std::size_t>(n));
  RationalVector b(static_cast<std::size_t>(n));
  RationalVector diff(static_cast<std::size_t>(n));

  for (int family = 0; family < n; ++family) {
    auto glue = glue_vector(n, family);
    bool empty = false;
    for (int j = 0; j < n; ++j) {
      auto& bj = b[static_cast<std::size_t>(j)];
      bj = x[static_cast<std::size_t>(j)] / spec.scale - glue[static_cast<std::size_t>(j)];
      auto& opt = options[static_cast<std::size_t>(j)];
      opt.clear();
      for (auto v = ceil(bj - reach); v <= floor(bj + reach); ++v) {
        if (!spec.open || abs(bj - v) < reach) opt.push_back(v);
      }
      if (opt.empty()) empty = true;
    }
    if (empty) continue;

    std::function<void(int, std::int64_t)> choose = [&](int j, std::int64_t partial) {
      if (j == n) {
        if (partial != 0) return;
        for (int t = 0; t < n; ++t) diff[static_cast<std::size_t>(t)] = b[static_cast<std::size_t>(t)] - lambda[static_cast<std::size_t>(t)];
        if (in_cell(diff, tau, spec.open)) out.push_back({family, lambda});
        return;
      }
      for (auto v : options[static_cast<std::size_t>(j)]) {
        lambda[static_cast<std::size_t>(j)] = v;
        choose(j + 1, partial + v);
      }
    };
    choose(0, 0);
  }
  return out;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  auto q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace

std::vector<LatticeTranslate> voronoi_membership_doubled(std::span<const std::int64_t> w, const LatticeCoverSpec& spec) {
  spec.validate();
  const int n = spec.n;
  if (static_cast<int>(w.size()) != n) throw std::invalid_argument("voronoi_membership: dimension mismatch");
  std::int64_t total = 0;
  for (auto v : w) total += v;
  if (total != 0) throw std::invalid_argument("voronoi_membership: point is not in A^{n-1} (nonzero sum)");

  // Everything is multiplied by D = 2 n h_num tau_den.
  const std::int64_t hn = spec.scale.numerator(), hd = spec.scale.denominator();
  const std::int64_t tn = spec.thickening.numerator(), td = spec.thickening.denominator();
  const std::int64_t D = 2 * n * hn * td;
  const std::int64_t reach = hn * td * (n - 1) + n * hn * tn;
  std::vector<std::int64_t> bound(static_cast<std::size_t>(n), 0);
  for (int j = 1; j < n; ++j) bound[static_cast<std::size_t>(j)] = hn * td * j * (n - j) + n * hn * tn;

  std::vector<LatticeTranslate> out;
  std::vector<std::int64_t> B(static_cast<std::size_t>(n)), lambda(static_cast<std::size_t>(n)), E(static_cast<std::size_t>(n));
  std::vector<std::vector<std::int64_t>> options(static_cast<std::size_t>(n));

  auto accepts = [&]() {
    for (int j = 0; j < n; ++j) E[static_cast<std::size_t>(j)] = B[static_cast<std::size_t>(j)] - D * lambda[static_cast<std::size_t>(j)];
    std::sort(E.begin(), E.end(), std::greater<>());
    std::int64_t prefix = 0;
    for (int j = 1; j < n; ++j) {
      prefix += E[static_cast<std::size_t>(j - 1)];
      auto b = bound[static_cast<std::size_t>(j)];
      if (spec.open ? prefix >= b : prefix > b) return false;
    }
    return true;
  };

  for (int family = 0; family < n; ++family) {
    bool empty = false;
    for (int j = 0; j < n; ++j) {
      auto glue = 2 * hn * td * ((j + 1) <= family ? family - n : family);
      auto b = n * td * hd * w[static_cast<std::size_t>(j)] - glue;
      B[static_cast<std::size_t>(j)] = b;
      auto& opt = options[static_cast<std::size_t>(j)];
      opt.clear();
      for (auto v = ceil_div(b - reach, D); v <= floor_div(b + reach, D); ++v) {
        auto gap = b - D * v;
        if (gap < 0) gap = -gap;
        if (spec.open ? gap < reach : gap <= reach) opt.push_back(v);
      }
      if (opt.empty()) empty = true;
    }
    if (empty) continue;
    std::function<void(int, std::int64_t)> choose = [&](int j, std::int64_t partial) {
      if (j == n) {
        if (partial == 0 && accepts()) out.push_back({family, lambda});
        return;
      }
      for (auto v : options[static_cast<std::size_t>(j)]) {
        lambda[static_cast<std::size_t>(j)] = v;
        choose(j + 1, partial + v);
      }
    };
    choose(0, 0);
  }
  return out;
}

Rational translate_separation_bound(const std::vector<std::int64_t>& mu) {
  const int n = static_cast<int>(mu.size());
  if (n > 20) throw std::invalid_argument("translate_separation_bound: n too large");
  Rational best = 0;
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    std::int64_t s = 0;
    int size = 0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1u) {
        s += mu[static_cast<std::size_t>(i)];
        ++size;
      }
    }
    best = std::max(best, 2 * (Rational(s) - Rational(size * (n - size), n)));
  }
  return best;
}

}  // namespace coarse
