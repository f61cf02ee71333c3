#include "coarse/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include "coarse/covers.hpp"
#include "coarse/embeddings.hpp"
#include "coarse/kernels.hpp"
#include "coarse/lattice.hpp"
#include "coarse/spaces.hpp"

namespace coarse {

namespace {

using json = nlohmann::json;

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

// Typed access to experiment parameters with defaults. Every key read is
// recorded; leftovers are rejected so that typos surface as config errors.
class Params {
 public:
  Params(const json& j, std::string experiment) : j_(j), experiment_(std::move(experiment)) {
    if (!j_.is_object()) throw ConfigError(experiment_ + ": params must be an object");
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    T value = fallback;
    if (j_.contains(key)) {
      try {
        json v = j_.at(key);
        if constexpr (is_vector<T>::value) {
          if (!v.is_array()) v = json::array({v});  // a single value stands for a one-element list
        }
        value = v.get<T>();
      } catch (const json::exception& e) {
        throw ConfigError(experiment_ + ": parameter '" + key + "' has the wrong type");
      }
    }
    effective_[key] = value;
    return value;
  }

  Rational rational(const std::string& key, const Rational& fallback) {
    used_.insert(key);
    Rational value = fallback;
    if (j_.contains(key)) value = parse(key, j_.at(key));
    effective_[key] = to_string(value);
    return value;
  }

  std::vector<Rational> rationals(const std::string& key, const std::vector<Rational>& fallback) {
    used_.insert(key);
    std::vector<Rational> values = fallback;
    if (j_.contains(key)) {
      json list = j_.at(key);
      if (!list.is_array()) list = json::array({list});
      values.clear();
      for (const auto& v : list) values.push_back(parse(key, v));
    }
    auto out = json::array();
    for (const auto& v : values) out.push_back(to_string(v));
    effective_[key] = out;
    return values;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError(experiment_ + ": unknown parameter '" + key + "'");
    }
  }

  const nlohmann::ordered_json& effective() const { return effective_; }

 private:
  Rational parse(const std::string& key, const json& v) const {
    try {
      if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
      if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const std::exception&) {
    }
    throw ConfigError(experiment_ + ": parameter '" + key + "' must be an integer or a \"num/den\" string");
  }

  const json& j_;
  std::string experiment_;
  std::set<std::string> used_;
  nlohmann::ordered_json effective_ = nlohmann::ordered_json::object();
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

PairPolicy pair_policy(const std::string& name) {
  if (name == "auto") return PairPolicy::kAuto;
  if (name == "all") return PairPolicy::kAllPairs;
  if (name == "edges") return PairPolicy::kEdges;
  throw ConfigError("unknown pair policy '" + name + "' (auto, all, edges)");
}

std::string label_pair(const FiniteMetricSpace& s, PointId x, PointId y) { return s.label(x) + " / " + s.label(y); }

// ---------------------------------------------------------------------------
// zk-cover

Report zk_cover_experiment(Params& P) {
  const int k = P.get("k", 2);
  const int hw = P.get("half_width", 40);
  const auto Ls = P.rationals("L", {Rational(1), Rational(3)});
  const auto ps = P.get("p", std::vector<double>{1.0, 2.0});
  P.finish();
  require(k >= 1 && k <= 4, "zk-cover: k must be in 1..4");
  require(hw >= 1, "zk-cover: half_width must be positive");

  Report r;
  std::vector<std::string> cols{"L", "k", "scale", "thickening", "lebesgue", "multiplicity", "mesh", "mesh_bound"};
  for (double p : ps) cols.push_back("delta_p" + format_double(p));
  cols.insert(cols.end(), {"sets", "ok"});
  auto& t = r.table("stats", cols);
  auto grid = grid_space(k, hw);
  const std::int64_t constant = 2 * k * k - 2 * k + 1;
  for (const auto& L : Ls) {
    require(L > 0, "zk-cover: L must be positive");
    ZkCoverReport rep;
    auto cover = zk_cover(k, L, grid, &rep);
    auto st = cover_stats(cover, ps);
    const Rational bound = constant * L;
    const bool leb_ok = Rational(st.lebesgue) >= L;
    const bool mult_ok = st.multiplicity <= 2 * k;
    const bool mesh_ok = Rational(st.mesh) <= bound;
    std::vector<Cell> row{L, std::int64_t{k}, rep.chosen.scale, rep.chosen.thickening, std::int64_t{st.lebesgue},
                          std::int64_t{st.multiplicity}, std::int64_t{st.mesh}, bound};
    for (const auto& [p, d] : st.delta_p) row.push_back(d);
    row.insert(row.end(), {static_cast<std::int64_t>(st.set_count), leb_ok && mult_ok && mesh_ok});
    t.add(std::move(row));
    if (!leb_ok) r.fail("L=" + to_string(L) + ": lebesgue " + std::to_string(st.lebesgue) + " < L at " + grid->label(st.lebesgue_witness));
    if (!mult_ok) r.fail("L=" + to_string(L) + ": multiplicity " + std::to_string(st.multiplicity) + " > 2k at " + grid->label(st.multiplicity_witness));
    if (!mesh_ok) r.fail("L=" + to_string(L) + ": mesh " + std::to_string(st.mesh) + " > " + to_string(bound) + " (set " + std::to_string(st.mesh_witness) + ")");
  }
  return r;
}

// ---------------------------------------------------------------------------
// voronoi-check

RationalVector random_a_point(int n, std::int64_t box, std::int64_t den, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> coord(-box * den, box * den);
  RationalVector y(static_cast<std::size_t>(n));
  Rational s = 0;
  for (int i = 0; i + 1 < n; ++i) {
    y[static_cast<std::size_t>(i)] = Rational(coord(rng), den);
    s += y[static_cast<std::size_t>(i)];
  }
  y.back() = -s;
  return y;
}

Report voronoi_experiment(Params& P, std::uint64_t seed) {
  const auto ns = P.get("n", std::vector<int>{2, 4, 6});
  const int samples = P.get("samples", 10000);
  const std::int64_t box = P.get("box", std::int64_t{1});
  const std::int64_t den = P.get("denominator", std::int64_t{24});
  P.finish();
  require(samples > 0 && box > 0 && den > 0, "voronoi-check: samples, box and denominator must be positive");

  Report r;
  auto& t = r.table("checks", {"n", "samples", "prefix_mismatches", "thickened_mismatches", "uncovered", "translates",
                              "min_separation", "separation_bound", "max_multiplicity", "max_per_family", "ok"});
  for (int n : ns) {
    require(n >= 2 && n % 2 == 0 && n <= 12, "voronoi-check: n must be even and in 2..12");
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(n));
    const LatticeCoverSpec spec{n, Rational(1), LatticeCoverSpec::default_thickening(n), true};
    std::int64_t prefix_bad = 0, thick_bad = 0, uncovered = 0;
    int max_mult = 0, max_family = 0;
    std::map<int, std::set<std::vector<std::int64_t>>> translates;
    for (int s = 0; s < samples; ++s) {
      auto y = random_a_point(n, box, den, rng);
      if (in_cell(y) != in_cell_by_subsets(y)) {
        if (prefix_bad++ == 0) r.fail("n=" + std::to_string(n) + ": prefix test disagrees with subset enumeration");
      }
      if (in_cell(y, spec.thickening, true) != in_cell_by_subsets(y, spec.thickening, true)) {
        if (thick_bad++ == 0) r.fail("n=" + std::to_string(n) + ": thickened prefix test disagrees with subset enumeration");
      }
      auto found = voronoi_membership(y, spec);
      if (found.empty()) {
        if (uncovered++ == 0) r.fail("n=" + std::to_string(n) + ": sample point in no cell");
        continue;
      }
      max_mult = std::max(max_mult, static_cast<int>(found.size()));
      std::map<int, int> per_family;
      for (auto& tr : found) {
        max_family = std::max(max_family, ++per_family[tr.family]);
        translates[tr.family].insert(tr.lambda);
      }
    }
    // Exact separation certificate on every pair of translates within a family.
    const Rational want(1, n - 1);
    Rational min_sep = -1;
    std::size_t count = 0;
    for (const auto& [family, lambdas] : translates) {
      std::vector<std::vector<std::int64_t>> v(lambdas.begin(), lambdas.end());
      count += v.size();
      for (std::size_t a = 0; a < v.size(); ++a) {
        for (std::size_t b = a + 1; b < v.size(); ++b) {
          std::vector<std::int64_t> mu(v[a].size());
          for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = v[b][i] - v[a][i];
          auto sep = translate_separation_bound(mu);
          if (min_sep < 0 || sep < min_sep) min_sep = sep;
        }
      }
    }
    const bool sep_ok = min_sep < 0 || min_sep >= want;
    if (!sep_ok) r.fail("n=" + std::to_string(n) + ": translates within a family closer than 1/(n-1)");
    if (max_mult > n) r.fail("n=" + std::to_string(n) + ": thickened multiplicity " + std::to_string(max_mult) + " > n");
    if (max_family > 1) r.fail("n=" + std::to_string(n) + ": two translates of one family share a point");
    const bool ok = prefix_bad == 0 && thick_bad == 0 && uncovered == 0 && sep_ok && max_mult <= n && max_family <= 1;
    t.add({std::int64_t{n}, std::int64_t{samples}, prefix_bad, thick_bad, uncovered, static_cast<std::int64_t>(count),
           min_sep < 0 ? Cell{} : Cell{min_sep}, want, std::int64_t{max_mult}, std::int64_t{max_family}, ok});
  }
  return r;
}

// ---------------------------------------------------------------------------
// cover-kernel

struct BuiltCover {
  Cover cover;
  std::string description;
};

BuiltCover build_grid_cover(const std::string& kind, int hw, int k, const Rational& r, const Rational& L) {
  if (kind == "interval") {
    auto g = grid_space(1, hw);
    return {interval_cover(g, 2, 1), "intervals [2z-1, 2z+1]"};
  }
  if (kind == "balls") {
    auto g = grid_space(k, hw);
    return {balls_cover(g, r), "balls_cover r=" + to_string(r)};
  }
  if (kind == "zk") {
    auto g = grid_space(k, hw);
    return {zk_cover(k, L, g), "zk_cover k=" + std::to_string(k) + " L=" + to_string(L)};
  }
  throw ConfigError("cover-kernel: unknown cover '" + kind + "' (interval, balls, zk, pullback)");
}

Report pullback_experiment(int hw, const Rational& scale, double p) {
  Report r;
  auto grid = grid_space(2, hw);
  auto window = a_lattice_ball(4, 2 * hw);
  PointMap f{grid, window, std::vector<PointId>(grid->size())};
  for (PointId x = 0; x < grid->size(); ++x) {
    auto c = grid->coords(x);
    auto id = window->index_of(iota_embed(c));
    if (!id) throw std::logic_error("iota image outside the A^3 window");
    f.image[x] = *id;
  }
  const LatticeCoverSpec spec{4, scale, LatticeCoverSpec::default_thickening(4), true};
  auto cover = lattice_window_cover(window, spec);
  auto xi = pou_kernel(cover, p);
  auto sigma = pullback_kernel(f, xi);
  auto chk = check_pullback(f, xi, sigma);
  auto& t = r.table("pullback", {"p", "scale", "pairs", "max_norm_gap", "max_contraction_excess", "sigma_support",
                                 "xi_support", "rho_of_sigma_support", "ok"});
  const bool norm_ok = chk.max_norm_gap <= 1e-12;
  const bool contraction_ok = chk.max_contraction_excess <= 1e-12;
  const bool support_ok = chk.rho_of_sigma_support <= 3 * chk.xi_support;
  t.add({p, scale, static_cast<std::int64_t>(chk.pairs), chk.max_norm_gap, chk.max_contraction_excess,
         std::int64_t{chk.sigma_support}, std::int64_t{chk.xi_support}, std::int64_t{chk.rho_of_sigma_support},
         norm_ok && contraction_ok && support_ok});
  if (!norm_ok) r.fail("pullback norm gap " + format_double(chk.max_norm_gap));
  if (!contraction_ok) r.fail("pullback difference exceeds the original by " + format_double(chk.max_contraction_excess));
  if (!support_ok) r.fail("rho(S(sigma)) = " + std::to_string(chk.rho_of_sigma_support) + " > 3 S(xi)");
  return r;
}

Report cover_kernel_experiment(Params& P) {
  const auto kind = P.get<std::string>("cover", "balls");
  const int hw = P.get("half_width", kind == "interval" ? 100 : (kind == "pullback" ? 10 : 40));
  const int k = P.get("k", 2);
  const auto radius = P.rational("r", Rational(2));
  const auto L = P.rational("L", Rational(1));
  const auto scale = P.rational("scale", Rational(2));
  const auto ps = P.get("p", std::vector<double>{1.0, 2.0, 3.0});
  const auto policy = pair_policy(P.get<std::string>("pairs", "edges"));
  P.finish();
  require(hw >= 1 && k >= 1 && k <= 4, "cover-kernel: bad window parameters");
  for (double p : ps) require(p >= 1, "cover-kernel: p must be >= 1");

  if (kind == "pullback") {
    Report r;
    for (double p : ps) {
      auto part = pullback_experiment(hw, scale, p);
      auto& t = r.table("pullback", part.tables.front().columns);
      for (auto& row : part.tables.front().rows) t.add(row);
      for (auto& f : part.failures) r.fail("p=" + format_double(p) + ": " + f);
    }
    return r;
  }

  auto built = build_grid_cover(kind, hw, k, radius, L);
  auto st = cover_stats(built.cover);
  Report r;
  auto& t = r.table("kernels", {"cover", "p", "lebesgue", "multiplicity", "mesh", "support_radius", "epsilon", "bound",
                                "max_norm_error", "points", "pairs", "ok"});
  for (double p : ps) {
    auto xi = pou_kernel(built.cover, p);
    PairOptions opt;
    opt.policy = policy;
    opt.min_interior = st.lebesgue - 1;
    KernelStats ks;
    try {
      ks = kernel_stats(xi, opt);
    } catch (const KernelNormError& e) {
      r.fail("p=" + format_double(p) + ": " + e.what());
      continue;
    }
    const double bound = pou_lipschitz_bound(st.multiplicity, st.lebesgue, p);
    const bool support_ok = ks.support_radius <= st.mesh;
    const bool eps_ok = ks.lipschitz <= bound;
    t.add({built.description, p, std::int64_t{st.lebesgue}, std::int64_t{st.multiplicity}, std::int64_t{st.mesh},
           std::int64_t{ks.support_radius}, ks.lipschitz, bound, ks.max_norm_error, static_cast<std::int64_t>(ks.points),
           static_cast<std::int64_t>(ks.pairs), support_ok && eps_ok});
    if (!support_ok) r.fail("p=" + format_double(p) + ": support radius " + std::to_string(ks.support_radius) + " > mesh");
    if (!eps_ok) {
      r.fail("p=" + format_double(p) + ": epsilon " + format_double(ks.lipschitz) + " > " + format_double(bound) + " at " +
             label_pair(*built.cover.space, ks.arg_x, ks.arg_y));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// tree-embed

Report tree_embed_experiment(Params& P) {
  const int valence = P.get("valence", 3);
  const int depth = P.get("depth", 12);
  const auto Ss = P.get("S", std::vector<int>{2, 4, 8, 16});
  const auto ps = P.get("p", std::vector<double>{1.0, 2.0});
  const auto shape = P.get<std::string>("kernel", "tent");
  P.finish();
  require(valence >= 2 && depth >= 1, "tree-embed: bad tree parameters");
  require(shape == "tent" || shape == "flat", "tree-embed: kernel must be tent or flat");
  int top = 0;
  for (int S : Ss) {
    require(S >= 1, "tree-embed: S must be positive");
    top = std::max(top, S);
  }
  auto tree = tree_ball(valence, depth, std::max(2 * depth, top));

  Report r;
  auto& t = r.table("tree", {"S", "p", "kernel", "support_radius", "epsilon", "bound", "tent_norm", "norm_lower_bound",
                             "points", "pairs", "ok"});
  for (int S : Ss) {
    for (double p : ps) {
      auto xi = shape == "tent" ? tree_kernel_tent(tree, S, p) : tree_kernel_flat(tree, S, p);
      PairOptions opt;
      opt.policy = PairPolicy::kEdges;
      KernelStats ks;
      try {
        ks = kernel_stats(xi, opt);
      } catch (const KernelNormError& e) {
        r.fail("S=" + std::to_string(S) + " p=" + format_double(p) + ": " + e.what());
        continue;
      }
      const double bound = 8.0 / S;
      const double norm = shape == "tent" ? tent_norm(S, p) : std::pow(static_cast<double>(S), 1.0 / p);
      const double lower = std::pow(std::pow(static_cast<double>(S), p + 1) / (p + 1), 1.0 / p);
      const bool eps_ok = ks.lipschitz <= bound + 1e-9;
      const bool norm_ok = shape != "tent" || norm >= lower;
      const bool support_ok = ks.support_radius <= S;
      t.add({std::int64_t{S}, p, shape, std::int64_t{ks.support_radius}, ks.lipschitz, bound, norm, lower,
             static_cast<std::int64_t>(ks.points), static_cast<std::int64_t>(ks.pairs), eps_ok && norm_ok && support_ok});
      const std::string at = "S=" + std::to_string(S) + " p=" + format_double(p) + ": ";
      if (!eps_ok) r.fail(at + "epsilon " + format_double(ks.lipschitz) + " > 8/S at " + label_pair(*tree, ks.arg_x, ks.arg_y));
      if (!norm_ok) r.fail(at + "tent norm below (S^{p+1}/(p+1))^{1/p}");
      if (!support_ok) r.fail(at + "support radius exceeds S");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// lamplighter-metric

Report lamplighter_metric_experiment(Params& P, std::uint64_t seed) {
  const int radius = P.get("radius", 8);
  const auto ms = P.get("sandwich_m", std::vector<int>{2, 3});
  const int sandwich_radius = P.get("sandwich_radius", 10);
  const int sandwich_pairs = P.get("sandwich_pairs", 200);
  P.finish();
  require(radius >= 0 && radius <= lamplighter_radius_cap(), "lamplighter-metric: radius out of range");
  require(sandwich_radius >= 0 && sandwich_radius <= lamplighter_radius_cap(), "lamplighter-metric: sandwich_radius out of range");

  Report r;
  // Breadth-first search over the generators t^{+-1}, a^{+-1}.
  std::unordered_map<LamplighterElement, int, LamplighterElementHash> depth;
  std::deque<LamplighterElement> queue{LamplighterElement::identity()};
  depth.emplace(LamplighterElement::identity(), 0);
  std::int64_t mismatches = 0;
  while (!queue.empty()) {
    auto g = queue.front();
    queue.pop_front();
    const int d = depth.at(g);
    if (lamplighter_length(g) != d && mismatches++ < 5) {
      r.fail(g.label() + ": formula " + std::to_string(lamplighter_length(g)) + " vs BFS " + std::to_string(d));
    }
    if (d == radius) continue;
    for (const auto& h : {g.move_cursor(1), g.move_cursor(-1), g.toggle(1), g.toggle(-1)}) {
      if (depth.emplace(h, d + 1).second) queue.push_back(h);
    }
  }
  auto& t = r.table("metric", {"radius", "elements", "mismatches", "ok"});
  t.add({std::int64_t{radius}, static_cast<std::int64_t>(depth.size()), mismatches, mismatches == 0});

  auto& s = r.table("sandwich", {"m", "radius", "pairs", "max_gap", "lower_violations", "upper_violations", "ok"});
  std::mt19937_64 rng(seed);
  for (int m : ms) {
    require(m >= 1, "lamplighter-metric: m must be positive");
    auto km = local_lamp_ball(sandwich_radius, m);
    std::uniform_int_distribution<PointId> pick(0, static_cast<PointId>(km->size() - 1));
    std::int64_t lower_bad = 0, upper_bad = 0, max_gap = 0;
    for (int i = 0; i < sandwich_pairs; ++i) {
      const auto x = pick(rng), y = pick(rng);
      const auto d = km->distance(x, y);
      auto jx = j_embed(km->element(x), m), jy = j_embed(km->element(y), m);
      std::int64_t l1 = 0;
      for (std::size_t c = 0; c < jx.size(); ++c) l1 += std::abs(jx[c] - jy[c]);
      max_gap = std::max(max_gap, d - l1);
      if (d - 4 * (m - 1) > l1 && lower_bad++ == 0) r.fail("m=" + std::to_string(m) + ": l1 below d - 4(m-1) at " + label_pair(*km, x, y));
      if (l1 > d && upper_bad++ == 0) r.fail("m=" + std::to_string(m) + ": l1 above d at " + label_pair(*km, x, y));
    }
    s.add({std::int64_t{m}, std::int64_t{sandwich_radius}, std::int64_t{sandwich_pairs}, max_gap, lower_bad, upper_bad,
           lower_bad == 0 && upper_bad == 0});
  }
  return r;
}

// ---------------------------------------------------------------------------
// lamplighter-cover

Report lamplighter_cover_experiment(Params& P) {
  const auto L = P.rational("L", Rational(1));
  const int radius = P.get("radius", 10);
  P.finish();
  require(L > 0, "lamplighter-cover: L must be positive");
  require(radius >= 1 && radius <= lamplighter_radius_cap(), "lamplighter-cover: radius out of range");
  auto window = lamplighter_ball(radius);
  WreathCoverReport rep;
  Report r;
  Cover cover;
  try {
    cover = wreath_cover(L, window, &rep);
  } catch (const CoverageError& e) {
    r.fail(std::string(e.what()));
    return r;
  }
  const auto& st = rep.stats;
  const Rational mult_bound = 96 * L, mesh_bound = 36864 * L * L * L;
  const bool leb_ok = Rational(st.lebesgue) >= L;
  const bool mult_ok = Rational(st.multiplicity) <= mult_bound;
  const bool mesh_ok = Rational(st.mesh) <= mesh_bound;
  auto& t = r.table("stats", {"L", "radius", "points", "m", "sets", "lebesgue", "multiplicity", "multiplicity_bound", "mesh",
                              "mesh_bound", "delta_p1", "delta_p2", "ok"});
  t.add({L, std::int64_t{radius}, static_cast<std::int64_t>(window->size()), std::int64_t{rep.m},
         static_cast<std::int64_t>(st.set_count), std::int64_t{st.lebesgue}, std::int64_t{st.multiplicity}, mult_bound,
         std::int64_t{st.mesh}, mesh_bound, st.delta_p.at(0).second, st.delta_p.at(1).second, leb_ok && mult_ok && mesh_ok});
  if (!leb_ok) r.fail("lebesgue " + std::to_string(st.lebesgue) + " < L at " + window->label(st.lebesgue_witness));
  if (!mult_ok) r.fail("multiplicity " + std::to_string(st.multiplicity) + " > 96L at " + window->label(st.multiplicity_witness));
  if (!mesh_ok) r.fail("mesh " + std::to_string(st.mesh) + " > 36864 L^3");
  return r;
}

// ---------------------------------------------------------------------------
// embed

UFamily u_family(const std::string& name, double a, double p, double constant) {
  UFamily u;
  u.a = a;
  u.p = p;
  u.constant = constant;
  if (name == "identity") {
    u.kind = UFamily::Kind::kIdentity;
  } else if (name == "overlog") {
    u.kind = UFamily::Kind::kOverlog;
  } else if (name == "constant") {
    u.kind = UFamily::Kind::kConstant;
  } else {
    throw ConfigError("unknown u family '" + name + "' (identity, overlog, constant)");
  }
  return u;
}

Report mazur_experiment(Params& P, std::uint64_t seed) {
  const double q = P.get("q", 2.0);
  const double p = P.get("p", 1.0);
  const int samples = P.get("samples", 10000);
  const int dim = P.get("dimension", 12);
  P.finish();
  require(q >= 1 && p >= 1 && samples > 0 && dim > 0, "embed mazur: bad parameters");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto unit = [&] {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double s = 0;
    for (auto& x : v) {
      x = gauss(rng);
      s += std::pow(std::abs(x), q);
    }
    s = std::pow(s, 1.0 / q);
    for (auto& x : v) x /= s;
    return v;
  };
  auto lp = [](const std::vector<double>& a, const std::vector<double>& b, double e) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i] - b[i]), e);
    return std::pow(s, 1.0 / e);
  };
  const double factor = std::max(1.0, q / p);
  std::int64_t violations = 0;
  double worst = 0;
  Report r;
  for (int i = 0; i < samples; ++i) {
    auto f = unit(), g = unit();
    if (i % 4 == 1) {
      g = f;  // near pairs too
      g[static_cast<std::size_t>(i) % g.size()] *= -1;
    }
    const double lhs = lp(mazur_map(f, q, p), mazur_map(g, q, p), p);
    const double rhs = factor * lp(f, g, q);
    if (rhs > 0) worst = std::max(worst, lhs / rhs);
    if (lhs > rhs && violations++ == 0) r.fail("Mazur bound violated at sample " + std::to_string(i));
  }
  auto& t = r.table("mazur", {"q", "p", "samples", "constant", "worst_ratio", "violations", "ok"});
  t.add({q, p, std::int64_t{samples}, factor, worst, violations, violations == 0});
  return r;
}

Report embed_experiment(Params& P, std::uint64_t seed) {
  const auto kind = P.get<std::string>("kind", "tree");
  if (kind == "mazur") return mazur_experiment(P, seed);
  require(kind == "tree", "embed: kind must be tree or mazur");
  const int valence = P.get("valence", 3);
  const int depth = P.get("depth", 14);
  const auto breakpoints = P.get("breakpoints", std::vector<double>{4, 8, 16, 32});
  const auto u_name = P.get<std::string>("u", "overlog");
  const double a = P.get("a", 1.0);
  const double p = P.get("p", 2.0);
  const double slope = P.get("D_slope", 1.0);
  const int sample_points = P.get("sample_points", 1500);
  P.finish();
  require(valence >= 2 && depth >= 1 && p >= 1 && sample_points > 1, "embed: bad parameters");
  require(breakpoints.size() >= 2, "embed: need at least two breakpoints");
  for (std::size_t j = 0; j < breakpoints.size(); ++j) {
    require(breakpoints[j] >= 1 && breakpoints[j] == std::floor(breakpoints[j]), "embed: breakpoints must be integers >= 1");
    require(j == 0 || breakpoints[j] > breakpoints[j - 1], "embed: breakpoints must increase");
  }
  const auto u = u_family(u_name, a, p, 1.0);
  WeightFunction f;
  try {
    f = weight_from_type(u, LinearType{slope}, breakpoints);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("embed: ") + e.what());
  }

  const int top = static_cast<int>(breakpoints[breakpoints.size() - 2]);
  auto tree = tree_ball(valence, depth, std::max(2 * depth, top));
  KernelField field;
  for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j) {
    const int S = static_cast<int>(breakpoints[j]);
    field.levels.push_back(breakpoints[j]);
    field.kernels.push_back(tree_kernel_tent(tree, S, p));
    PairOptions opt;
    opt.policy = PairPolicy::kEdges;
    field.eps.push_back(kernel_stats(field.kernels.back(), opt).lipschitz);
  }
  Embedding theta = build_embedding(field, f, 0);
  const double C = theta.theoretical_C();

  std::vector<PointId> domain;
  for (PointId x = 0; x < tree->size(); ++x)
    if (theta.defined_at(x)) domain.push_back(x);
  std::vector<PointId> sample = domain;
  std::mt19937_64 rng(seed);
  std::shuffle(sample.begin(), sample.end(), rng);
  if (sample.size() > static_cast<std::size_t>(sample_points)) sample.resize(static_cast<std::size_t>(sample_points));
  std::sort(sample.begin(), sample.end());

  Report r;
  std::vector<std::pair<double, double>> pairs;
  double worst_excess = -kInfinity;
  std::int64_t lip_bad = 0, level_bad = 0;
  const double disjoint = std::pow(2.0, 1.0 / p);
  auto visit = [&](PointId x, PointId y) {
    const auto d = static_cast<double>(tree->distance(x, y));
    const auto diff = theta.difference(x, y);
    pairs.emplace_back(d, diff.total);
    worst_excess = std::max(worst_excess, diff.total - C * d);
    if (diff.total > C * d + 1e-6 && lip_bad++ == 0) r.fail("Lipschitz bound exceeded at " + label_pair(*tree, x, y));
    for (std::size_t j = 0; j < diff.level_norms.size(); ++j) {
      // Disjoint supports: two unit vectors at l^p distance 2^{1/p}.
      if (2 * field.levels[j] < d && std::abs(diff.level_norms[j] - disjoint) > 1e-9 && level_bad++ == 0) {
        r.fail("level " + std::to_string(j) + " difference is not 2^{1/p} at " + label_pair(*tree, x, y));
      }
    }
  };
  for (auto x : domain) {
    if (x != theta.reference()) visit(theta.reference(), x);
    for (auto y : tree->sphere(x, 1))
      if (y > x && theta.defined_at(y)) visit(x, y);
  }
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t k = i + 1; k < sample.size(); ++k) visit(sample[i], sample[k]);

  auto report = compression_report(pairs, [&](double d) { return theta.compression_floor(d); });
  report.theoretical_C = C;
  std::int64_t floor_bad = 0;
  auto& rows = r.table("compression", {"d", "rho_minus", "rho_plus", "floor_2f"});
  for (const auto& row : report.rows) {
    rows.add({row.d, row.rho_minus, row.rho_plus, row.floor_2f});
    if (row.rho_minus < row.floor_2f - 1e-6 && floor_bad++ == 0) {
      r.fail("rho_minus(" + format_double(row.d) + ") = " + format_double(row.rho_minus) + " below 2f(d/2) - 2f(c) = " +
             format_double(row.floor_2f));
    }
  }
  auto& levels = r.table("levels", {"S", "f", "weight", "epsilon"});
  for (std::size_t j = 0; j < field.levels.size(); ++j) {
    levels.add({field.levels[j], f.values[j], theta.weights()[j], field.eps[j]});
  }
  auto& summary = r.table("summary", {"points", "pairs", "theoretical_C", "lipschitz_estimate", "max_excess",
                                      "lipschitz_violations", "floor_violations", "level_violations", "ok"});
  summary.add({static_cast<std::int64_t>(domain.size()), static_cast<std::int64_t>(report.pairs), C, report.lipschitz_estimate,
               worst_excess, lip_bad, floor_bad, level_bad, lip_bad == 0 && floor_bad == 0 && level_bad == 0});
  return r;
}

// ---------------------------------------------------------------------------
// cp-check

Report cp_experiment(Params& P) {
  const auto u_name = P.get<std::string>("u", "overlog");
  const double a = P.get("a", 1.0);
  const double p = P.get("p", 2.0);
  const double c = P.get("c", 3.0);
  const double constant = P.get("constant", 1.0);
  const auto log_T = P.get("log_T", std::vector<double>{10, 100, 1000, 10000, 100000});
  const double h = P.get("grid_step", 0.01);
  const double tolerance = P.get("tolerance", 1e-3);
  const double threshold = P.get("threshold", 10.0);
  const auto expect = P.get<std::string>("expect", "");
  P.finish();
  require(!log_T.empty(), "cp-check: log_T must be nonempty");
  require(expect.empty() || expect == "converging" || expect == "diverging", "cp-check: expect must be converging or diverging");
  const auto u = u_family(u_name, a, p, constant);
  CpOptions opt{h, tolerance, threshold};
  CpOptions half = opt;
  half.grid_step = h / 2;
  std::vector<CpRow> rows, fine;
  try {
    rows = cp_condition(u, p, c, log_T, opt);
    fine = cp_condition(u, p, c, log_T, half);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("cp-check: ") + e.what());
  }

  Report r;
  auto& t = r.table("cp", {"T", "partial_integral", "verdict", "partial_half_step", "relative_change"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double rel = rows[i].partial > 0 ? std::abs(fine[i].partial - rows[i].partial) / rows[i].partial : 0.0;
    t.add({"e^" + format_double(rows[i].log_T), rows[i].partial, to_string(rows[i].verdict), fine[i].partial, rel});
  }
  const auto final = rows.back().verdict;
  if (!expect.empty() && to_string(final) != expect) r.fail("verdict " + to_string(final) + ", expected " + expect);
  if (final != fine.back().verdict) r.fail("verdict changes under grid halving");
  if (final == CpVerdict::kConverging) {
    const double rel = std::abs(fine.back().partial - rows.back().partial) / rows.back().partial;
    if (rel >= 1e-2) r.fail("converged value moves by " + format_double(rel) + " under grid halving");
  }
  return r;
}

// ---------------------------------------------------------------------------
// profile

struct ProfileSpace {
  std::string name;
  std::vector<ProfileCandidate> candidates;
};

ProfileCandidate pou_candidate(const std::string& name, const Cover& cover, double p, PairPolicy policy) {
  auto st = cover_stats(cover);
  auto xi = pou_kernel(cover, p);
  PairOptions opt;
  opt.policy = policy;
  opt.min_interior = st.lebesgue == kUnbounded ? 0 : st.lebesgue - 1;
  auto ks = kernel_stats(xi, opt);
  return {name, ks.support_radius, ks.lipschitz};
}

Report profile_experiment(Params& P) {
  const double p = P.get("p", 2.0);
  const auto Ss = P.get("S", std::vector<std::int64_t>{2, 4, 8, 16, 32});
  const int grid_hw = P.get("grid_half_width", 20);
  const int tree_depth = P.get("tree_depth", 10);
  const int ll_radius = P.get("lamplighter_radius", 6);
  const double exponent = P.get("exponent", 1.0 / 3.0);
  P.finish();
  require(p >= 1 && grid_hw >= 2 && tree_depth >= 2, "profile: bad parameters");
  require(ll_radius >= 2 && ll_radius <= lamplighter_radius_cap(), "profile: lamplighter_radius out of range");
  for (auto S : Ss) require(S >= 2, "profile: S values must be at least 2");

  std::vector<ProfileSpace> spaces;
  {
    ProfileSpace z{"Z2", {}};
    auto g = grid_space(2, grid_hw);
    for (int r : {0, 1, 2, 4}) {
      const Rational rad = r == 0 ? Rational(1, 2) : Rational(r);
      z.candidates.push_back(pou_candidate("balls r=" + to_string(rad), balls_cover(g, rad), p, PairPolicy::kEdges));
    }
    for (int L : {2, 3}) z.candidates.push_back(pou_candidate("zk L=" + std::to_string(L), zk_cover(2, Rational(L), g), p, PairPolicy::kEdges));
    spaces.push_back(std::move(z));
  }
  {
    ProfileSpace t{"tree", {}};
    int top = 1;
    for (auto S : Ss) top = std::max<int>(top, static_cast<int>(S));
    auto tree = tree_ball(3, tree_depth, std::max(2 * tree_depth, top));
    for (auto S : Ss) {
      PairOptions opt;
      opt.policy = PairPolicy::kEdges;
      auto ks = kernel_stats(tree_kernel_tent(tree, static_cast<int>(S), p), opt);
      t.candidates.push_back({"tent S=" + std::to_string(S), ks.support_radius, ks.lipschitz});
    }
    spaces.push_back(std::move(t));
  }
  {
    ProfileSpace w{"ZwrZ", {}};
    auto ball = lamplighter_ball(ll_radius);
    w.candidates.push_back(pou_candidate("balls r=1/2", balls_cover(ball, Rational(1, 2)), p, PairPolicy::kAuto));
    for (int r : {1, 2, 3}) {
      w.candidates.push_back(pou_candidate("balls r=" + std::to_string(r), balls_cover(ball, Rational(r)), p, PairPolicy::kAuto));
    }
    w.candidates.push_back(pou_candidate("wreath L=1", wreath_cover(Rational(1), ball), p, PairPolicy::kAuto));
    spaces.push_back(std::move(w));
  }

  Report r;
  auto& cand = r.table("candidates", {"space", "construction", "support", "epsilon"});
  auto& prof = r.table("profile", {"space", "S", "epsilon_upper", "source"});
  std::vector<ProfilePoint> wr;
  for (const auto& s : spaces) {
    for (const auto& c : s.candidates) cand.add({s.name, c.name, std::int64_t{c.support}, c.epsilon});
    std::vector<Distance> S_list(Ss.begin(), Ss.end());
    auto curve = epsilon_profile_upper(s.candidates, S_list, p);
    for (const auto& pt : curve) prof.add({s.name, std::int64_t{pt.S}, pt.epsilon, pt.source});
    if (s.name == "ZwrZ") wr = curve;
  }

  // Least-squares fit of C in log space against log(S) / S^exponent.
  auto shape = [&](double S) { return std::log(S) / std::pow(S, exponent); };
  double acc = 0;
  int used = 0;
  for (const auto& pt : wr) {
    if (pt.epsilon <= 0) continue;
    acc += std::log(pt.epsilon) - std::log(shape(static_cast<double>(pt.S)));
    ++used;
  }
  const double C = used ? std::exp(acc / used) : 0.0;
  auto& fit = r.table("fit", {"space", "S", "epsilon_upper", "fitted", "below"});
  std::int64_t above = 0;
  for (const auto& pt : wr) {
    const double fitted = C * shape(static_cast<double>(pt.S));
    const bool below = pt.epsilon <= fitted;
    if (!below) ++above;
    fit.add({"ZwrZ", std::int64_t{pt.S}, pt.epsilon, fitted, below});
  }
  r.parameters["fitted_C"] = C;
  r.parameters["warnings"] = above;
  return r;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "experiment") {
        c.name = value.get<std::string>();
      } else if (key == "params") {
        if (!value.is_object()) throw ConfigError("params must be an object");
        c.params = value;
      } else if (key == "output") {
        c.output = value.get<std::string>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "cap") {
        c.cap = value.get<std::size_t>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }
  return c;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"zk-cover", "voronoi-check", "cover-kernel", "tree-embed", "lamplighter-metric",
                                              "lamplighter-cover", "profile", "embed", "cp-check"};
  return names;
}

namespace {

struct CapScope {
  std::size_t saved = point_cap();
  explicit CapScope(const std::optional<std::size_t>& cap) {
    if (cap) set_point_cap(*cap);
  }
  ~CapScope() { set_point_cap(saved); }
};

}  // namespace

Report run_experiment(const ExperimentConfig& config) {
  CapScope cap(config.cap);
  Params P(config.params, config.name);
  Report r;
  const auto& n = config.name;
  if (n == "zk-cover") {
    r = zk_cover_experiment(P);
  } else if (n == "voronoi-check") {
    r = voronoi_experiment(P, config.seed);
  } else if (n == "cover-kernel") {
    r = cover_kernel_experiment(P);
  } else if (n == "tree-embed") {
    r = tree_embed_experiment(P);
  } else if (n == "lamplighter-metric") {
    r = lamplighter_metric_experiment(P, config.seed);
  } else if (n == "lamplighter-cover") {
    r = lamplighter_cover_experiment(P);
  } else if (n == "profile") {
    r = profile_experiment(P);
  } else if (n == "embed") {
    r = embed_experiment(P, config.seed);
  } else if (n == "cp-check") {
    r = cp_experiment(P);
  } else {
    throw ConfigError("unknown experiment '" + n + "'");
  }
  r.experiment = n;
  auto extra = r.parameters;
  r.parameters = nlohmann::ordered_json::object();
  r.parameters["seed"] = config.seed;
  r.parameters["params"] = P.effective();
  for (const auto& [k, v] : extra.items()) r.parameters[k] = v;
  return r;
}

int run_and_emit(const ExperimentConfig& config, std::ostream& log) {
  Report report;
  try {
    report = run_experiment(config);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CapExceeded& e) {
    log << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  }
  if (!config.output.empty()) {
    try {
      for (const auto& path : emit_report(report, config.output)) log << "wrote " << path.string() << "\n";
    } catch (const std::runtime_error& e) {
      log << "error: " << e.what() << "\n";
      return kExitAssertion;
    }
  }
  for (const auto& t : report.tables) {
    log << "[" << t.name << "]\n";
    write_csv(t, log);
  }
  for (const auto& f : report.failures) log << "FAIL " << f << "\n";
  return report.ok() ? kExitOk : kExitAssertion;
}

}  // namespace coarse
