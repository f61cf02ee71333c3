#include "coarse/spaces.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>
#include <random>
#include <sstream>

namespace coarse {

namespace {

std::size_t& cap_slot() {
  static std::size_t cap = [] {
    if (const char* env = std::getenv("COARSE_EMBED_CAP")) {
      try {
        auto v = std::stoull(env);
        if (v > 0) return static_cast<std::size_t>(v);
      } catch (const std::logic_error&) {
      }
    }
    return static_cast<std::size_t>(2'000'000);
  }();
  return cap;
}

}  // namespace

std::size_t point_cap() { return cap_slot(); }

void set_point_cap(std::size_t cap) {
  if (cap == 0) throw std::invalid_argument("point cap must be positive");
  cap_slot() = cap;
}

// ---------------------------------------------------------------------------
// FiniteMetricSpace

std::vector<PointId> FiniteMetricSpace::sphere(PointId x, Distance r) const {
  std::vector<PointId> out;
  for (PointId y = 0; y < size(); ++y) {
    if (distance(x, y) == r) out.push_back(y);
  }
  return out;
}

std::vector<PointId> FiniteMetricSpace::ball(PointId x, Distance r) const {
  std::vector<PointId> out;
  if (r < 0) return out;
  if (local_spheres()) {
    for (Distance s = 0; s <= r; ++s) {
      auto layer = sphere(x, s);
      out.insert(out.end(), layer.begin(), layer.end());
      if (out.size() == size()) break;
    }
    return out;
  }
  std::vector<std::pair<Distance, PointId>> found;
  for (PointId y = 0; y < size(); ++y) {
    auto d = distance(x, y);
    if (d <= r) found.emplace_back(d, y);
  }
  std::sort(found.begin(), found.end());
  out.reserve(found.size());
  for (auto [d, y] : found) out.push_back(y);
  return out;
}

Distance FiniteMetricSpace::diameter() const {
  Distance best = 0;
  for (PointId a = 0; a < size(); ++a) {
    for (PointId b = a + 1; b < size(); ++b) best = std::max(best, distance(a, b));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Grid

GridSpace::GridSpace(int k, int half_width)
    : FiniteMetricSpace("grid k=" + std::to_string(k) + " half_width=" + std::to_string(half_width)),
      k_(k),
      half_width_(half_width) {
  const std::size_t side = 2 * static_cast<std::size_t>(half_width) + 1;
  count_ = 1;
  for (int i = 0; i < k; ++i) {
    count_ *= side;
    if (count_ > point_cap()) throw CapExceeded("grid_space: point count exceeds cap");
  }
  coords_.resize(count_ * static_cast<std::size_t>(k));
  for (std::size_t id = 0; id < count_; ++id) {
    auto rest = id;
    for (int i = k - 1; i >= 0; --i) {
      coords_[id * k + i] = static_cast<int>(rest % side) - half_width;
      rest /= side;
    }
  }
}

Distance GridSpace::distance(PointId a, PointId b) const {
  auto ca = coords(a);
  auto cb = coords(b);
  Distance d = 0;
  for (int i = 0; i < k_; ++i) d += std::abs(ca[i] - cb[i]);
  return d;
}

std::string GridSpace::label(PointId x) const {
  std::string s = "(";
  auto c = coords(x);
  for (int i = 0; i < k_; ++i) {
    if (i) s += ',';
    s += std::to_string(c[i]);
  }
  return s + ")";
}

Distance GridSpace::interior_radius(PointId x) const {
  int worst = 0;
  for (int v : coords(x)) worst = std::max(worst, std::abs(v));
  return half_width_ - worst;
}

std::optional<PointId> GridSpace::index_of(std::span<const std::int64_t> z) const {
  if (z.size() != static_cast<std::size_t>(k_)) return std::nullopt;
  const std::int64_t side = 2 * static_cast<std::int64_t>(half_width_) + 1;
  std::int64_t id = 0;
  for (auto v : z) {
    if (v < -half_width_ || v > half_width_) return std::nullopt;
    id = id * side + (v + half_width_);
  }
  return static_cast<PointId>(id);
}

std::vector<PointId> GridSpace::sphere(PointId x, Distance r) const {
  std::vector<PointId> out;
  if (r < 0) return out;
  auto base = coords(x);
  std::vector<std::int64_t> z(base.begin(), base.end());
  // Distribute the remaining budget coordinate by coordinate; the last
  // coordinate absorbs whatever is left.
  std::function<void(int, Distance)> walk = [&](int i, Distance left) {
    if (i == k_ - 1) {
      for (Distance s : {left, -left}) {
        z[i] = base[i] + s;
        if (auto id = index_of(z)) out.push_back(*id);
        if (left == 0) break;
      }
      z[i] = base[i];
      return;
    }
    for (Distance s = -left; s <= left; ++s) {
      auto v = base[i] + s;
      if (v < -half_width_ || v > half_width_) continue;
      z[i] = v;
      walk(i + 1, left - std::abs(s));
    }
    z[i] = base[i];
  };
  walk(0, r);
  std::sort(out.begin(), out.end());
  return out;
}

std::shared_ptr<const GridSpace> grid_space(int k, int half_width) {
  if (k < 1) throw std::invalid_argument("grid_space: k must be >= 1");
  if (half_width < 1) throw std::invalid_argument("grid_space: half_width must be >= 1");
  return std::make_shared<GridSpace>(k, half_width);
}

// ---------------------------------------------------------------------------
// Lamplighter

bool LamplighterWindowKind::contains(const LamplighterElement& g) const {
  switch (subgroup) {
    case Subgroup::kWhole:
      return true;
    case Subgroup::kLamps:
      return g.cursor() == 0;
    case Subgroup::kLocalLamps:
      if (g.cursor() != 0) return false;
      return g.lamps().empty() || (g.support_min() > -m && g.support_max() < m);
  }
  return false;
}

std::string LamplighterWindowKind::describe() const {
  switch (subgroup) {
    case Subgroup::kWhole:
      return "subgroup=whole";
    case Subgroup::kLamps:
      return "subgroup=lamps";
    case Subgroup::kLocalLamps:
      return "subgroup=local m=" + std::to_string(m);
  }
  return {};
}

LamplighterSpace::LamplighterSpace(std::vector<LamplighterElement> elements, int radius, LamplighterWindowKind kind)
    : FiniteMetricSpace("lamplighter radius=" + std::to_string(radius) + " " + kind.describe()),
      elements_(std::move(elements)),
      radius_(radius),
      kind_(kind) {
  lengths_.reserve(elements_.size());
  index_.reserve(elements_.size());
  identity_spheres_.assign(static_cast<std::size_t>(radius) + 1, {});
  for (PointId i = 0; i < elements_.size(); ++i) {
    auto len = lamplighter_length(elements_[i]);
    lengths_.push_back(len);
    index_.emplace(elements_[i], i);
    identity_spheres_[static_cast<std::size_t>(len)].push_back(i);
  }
}

Distance LamplighterSpace::distance(PointId a, PointId b) const {
  return lamplighter_distance(elements_[a], elements_[b]);
}

Distance LamplighterSpace::interior_radius(PointId x) const {
  // Multiplying by a power of a at the cursor raises the length one step at a
  // time, so the bound R - |x| is attained by an ambient point in H.
  return radius_ - lengths_[x];
}

std::optional<PointId> LamplighterSpace::index_of(const LamplighterElement& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<PointId> LamplighterSpace::sphere(PointId x, Distance r) const {
  if (r < 0) return {};
  if (r > radius_) return FiniteMetricSpace::sphere(x, r);
  // Left translation is an isometry: S_r(x) = x S_r(e), and x S_r(e) stays in H.
  std::vector<PointId> out;
  const auto& g = elements_[x];
  for (auto s : identity_spheres_[static_cast<std::size_t>(r)]) {
    if (auto id = index_of(g * elements_[s])) out.push_back(*id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int lamplighter_radius_cap() { return 14; }

namespace {

std::vector<LamplighterElement> lamplighter_bfs(int radius) {
  if (radius < 0) throw std::invalid_argument("lamplighter_ball: radius must be >= 0");
  if (radius > lamplighter_radius_cap()) throw CapExceeded("lamplighter_ball: radius exceeds cap");
  std::vector<LamplighterElement> order{LamplighterElement::identity()};
  std::unordered_map<LamplighterElement, int, LamplighterElementHash> depth{{order.front(), 0}};
  for (std::size_t head = 0; head < order.size(); ++head) {
    const auto g = order[head];
    const int d = depth[g];
    if (d != lamplighter_length(g)) {
      throw std::logic_error("lamplighter length formula disagrees with BFS at " + g.label());
    }
    if (d == radius) continue;
    for (auto next : {g.move_cursor(1), g.move_cursor(-1), g.toggle(1), g.toggle(-1)}) {
      if (depth.emplace(next, d + 1).second) {
        order.push_back(std::move(next));
        if (order.size() > point_cap()) throw CapExceeded("lamplighter_ball: element count exceeds cap");
      }
    }
  }
  return order;
}

std::shared_ptr<const LamplighterSpace> lamplighter_window(int radius, LamplighterWindowKind kind) {
  auto all = lamplighter_bfs(radius);
  std::vector<LamplighterElement> kept;
  for (auto& g : all) {
    if (kind.contains(g)) kept.push_back(std::move(g));
  }
  return std::make_shared<LamplighterSpace>(std::move(kept), radius, kind);
}

}  // namespace

std::shared_ptr<const LamplighterSpace> lamplighter_ball(int radius) {
  return lamplighter_window(radius, {});
}

std::shared_ptr<const LamplighterSpace> lamp_ball(int radius) {
  return lamplighter_window(radius, {LamplighterWindowKind::Subgroup::kLamps, 0});
}

std::shared_ptr<const LamplighterSpace> local_lamp_ball(int radius, int m) {
  if (m < 1) throw std::invalid_argument("local_lamp_ball: m must be >= 1");
  return lamplighter_window(radius, {LamplighterWindowKind::Subgroup::kLocalLamps, m});
}

// ---------------------------------------------------------------------------
// A^{n-1} with half-integer coordinates

namespace {

// All integer vectors of length n with zero sum and l1 norm exactly `norm`.
void zero_sum_vectors(int n, std::int64_t norm, std::vector<std::vector<std::int64_t>>& out) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(n), 0);
  std::function<void(int, std::int64_t, std::int64_t)> rec = [&](int i, std::int64_t left, std::int64_t partial) {
    if (i == n - 1) {
      if (std::llabs(partial) == left) {
        v[static_cast<std::size_t>(i)] = -partial;
        out.push_back(v);
      }
      return;
    }
    for (std::int64_t s = -left; s <= left; ++s) {
      auto rest = left - std::llabs(s);
      // The remaining coordinates must cancel the running sum.
      if (std::llabs(partial + s) > rest) continue;
      v[static_cast<std::size_t>(i)] = s;
      rec(i + 1, rest, partial + s);
    }
  };
  rec(0, norm, 0);
}

}  // namespace

ALatticeSpace::ALatticeSpace(int n, int radius)
    : FiniteMetricSpace("a-lattice n=" + std::to_string(n) + " radius=" + std::to_string(radius)),
      n_(n),
      radius_(radius) {
  std::vector<std::vector<std::int64_t>> all;
  for (std::int64_t norm = 0; norm <= 2 * static_cast<std::int64_t>(radius); norm += 2) {
    zero_sum_vectors(n, norm, all);
    if (all.size() > point_cap()) throw CapExceeded("a_lattice_ball: point count exceeds cap");
  }
  points_.reserve(all.size() * static_cast<std::size_t>(n));
  for (PointId id = 0; id < all.size(); ++id) {
    points_.insert(points_.end(), all[id].begin(), all[id].end());
    index_.emplace(all[id], id);
  }
}

Distance ALatticeSpace::distance(PointId a, PointId b) const {
  auto wa = doubled(a);
  auto wb = doubled(b);
  Distance d = 0;
  for (int i = 0; i < n_; ++i) d += std::llabs(wa[i] - wb[i]);
  return d / 2;
}

std::string ALatticeSpace::label(PointId x) const {
  std::string s = "(";
  auto y = point(x);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i) s += ',';
    s += to_string(y[i]);
  }
  return s + ")";
}

Distance ALatticeSpace::interior_radius(PointId x) const {
  Distance norm = 0;
  for (auto v : doubled(x)) norm += std::llabs(v);
  return radius_ - norm / 2;
}

RationalVector ALatticeSpace::point(PointId x) const {
  RationalVector y;
  for (auto v : doubled(x)) y.emplace_back(v, 2);
  return y;
}

std::optional<PointId> ALatticeSpace::index_of_doubled(const std::vector<std::int64_t>& w) const {
  auto it = index_.find(w);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<PointId> ALatticeSpace::index_of(const RationalVector& y) const {
  if (y.size() != static_cast<std::size_t>(n_)) return std::nullopt;
  std::vector<std::int64_t> w;
  for (const auto& v : y) {
    auto d = v * 2;
    if (d.denominator() != 1) return std::nullopt;
    w.push_back(d.numerator());
  }
  return index_of_doubled(w);
}

const std::vector<std::vector<std::int64_t>>& ALatticeSpace::offsets(Distance r) const {
  if (offsets_.size() <= static_cast<std::size_t>(r)) offsets_.resize(static_cast<std::size_t>(r) + 1);
  auto& slot = offsets_[static_cast<std::size_t>(r)];
  if (slot.empty()) zero_sum_vectors(n_, 2 * r, slot);
  return slot;
}

std::vector<PointId> ALatticeSpace::sphere(PointId x, Distance r) const {
  if (r < 0) return {};
  if (r > 2 * radius_) return {};
  std::vector<PointId> out;
  auto base = doubled(x);
  std::vector<std::int64_t> w(static_cast<std::size_t>(n_));
  for (const auto& delta : offsets(r)) {
    for (int i = 0; i < n_; ++i) w[static_cast<std::size_t>(i)] = base[i] + delta[static_cast<std::size_t>(i)];
    if (auto id = index_of_doubled(w)) out.push_back(*id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::shared_ptr<const ALatticeSpace> a_lattice_ball(int n, int radius) {
  if (n < 2) throw std::invalid_argument("a_lattice_ball: n must be >= 2");
  if (radius < 0) throw std::invalid_argument("a_lattice_ball: radius must be >= 0");
  return std::make_shared<ALatticeSpace>(n, radius);
}

// ---------------------------------------------------------------------------
// Explicit

ExplicitSpace::ExplicitSpace(std::string window_tag, std::vector<std::string> labels,
                             std::vector<std::vector<Distance>> lower_triangle,
                             std::vector<Distance> interior_radius)
    : FiniteMetricSpace(std::move(window_tag)),
      labels_(std::move(labels)),
      lower_(std::move(lower_triangle)),
      interior_(std::move(interior_radius)) {
  if (lower_.size() != labels_.size()) throw std::invalid_argument("explicit space: matrix size mismatch");
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (lower_[i].size() != i) throw std::invalid_argument("explicit space: row " + std::to_string(i) + " has wrong length");
  }
  if (interior_.empty()) interior_.assign(labels_.size(), kUnbounded);
  if (interior_.size() != labels_.size()) throw std::invalid_argument("explicit space: interior_radius size mismatch");
}

Distance ExplicitSpace::distance(PointId a, PointId b) const {
  if (a == b) return 0;
  if (a < b) std::swap(a, b);
  return lower_[a][b];
}

// ---------------------------------------------------------------------------
// Embeddings

RationalVector iota_embed(std::span<const std::int64_t> z) {
  RationalVector y;
  y.reserve(2 * z.size());
  for (auto v : z) {
    y.emplace_back(v, 2);
    y.emplace_back(-v, 2);
  }
  return y;
}

RationalVector iota_embed(std::span<const int> z) {
  std::vector<std::int64_t> wide(z.begin(), z.end());
  return iota_embed(std::span<const std::int64_t>(wide));
}

std::vector<std::int64_t> j_embed(const LamplighterElement& x, int m) {
  if (m < 1) throw std::invalid_argument("j_embed: m must be >= 1");
  if (x.cursor() != 0) throw std::invalid_argument("j_embed: element " + x.label() + " is not in K");
  if (!x.lamps().empty() && (x.support_min() <= -m || x.support_max() >= m)) {
    throw std::invalid_argument("j_embed: support of " + x.label() + " leaves {-m+1..m-1}");
  }
  std::vector<std::int64_t> v(2 * static_cast<std::size_t>(m) - 1, 0);
  for (const auto& [pos, val] : x.lamps()) v[static_cast<std::size_t>(pos + m - 1)] = val;
  return v;
}

// ---------------------------------------------------------------------------
// Metric axioms

std::optional<MetricViolation> check_metric_axioms(const FiniteMetricSpace& space, std::size_t exhaustive_limit,
                                                   std::size_t samples, std::uint64_t seed) {
  const auto n = static_cast<PointId>(space.size());
  auto pair_check = [&](PointId a, PointId b) -> std::optional<MetricViolation> {
    auto d = space.distance(a, b);
    if (a == b && d != 0) return MetricViolation{"identity", {a}};
    if (a != b && d <= 0) return MetricViolation{"positivity", {a, b}};
    if (d != space.distance(b, a)) return MetricViolation{"symmetry", {a, b}};
    return std::nullopt;
  };
  auto triangle = [&](PointId a, PointId b, PointId c) -> std::optional<MetricViolation> {
    if (space.distance(a, c) > space.distance(a, b) + space.distance(b, c)) {
      return MetricViolation{"triangle", {a, b, c}};
    }
    return std::nullopt;
  };
  if (n <= exhaustive_limit) {
    for (PointId a = 0; a < n; ++a)
      for (PointId b = 0; b < n; ++b)
        if (auto v = pair_check(a, b)) return v;
    for (PointId a = 0; a < n; ++a)
      for (PointId b = 0; b < n; ++b)
        for (PointId c = 0; c < n; ++c)
          if (auto v = triangle(a, b, c)) return v;
    return std::nullopt;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<PointId> pick(0, n - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    PointId a = pick(rng), b = pick(rng), c = pick(rng);
    if (auto v = pair_check(a, a)) return v;
    if (auto v = pair_check(a, b)) return v;
    if (auto v = triangle(a, b, c)) return v;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::ordered_json to_json(const FiniteMetricSpace& space) {
  nlohmann::ordered_json j;
  j["window_tag"] = space.window_tag();
  auto& labels = j["points"] = nlohmann::ordered_json::array();
  for (PointId x = 0; x < space.size(); ++x) labels.push_back(space.label(x));
  auto tag = space.metric_tag();
  if (tag == "explicit") {
    auto rows = nlohmann::ordered_json::array();
    for (PointId a = 0; a < space.size(); ++a) {
      auto row = nlohmann::ordered_json::array();
      for (PointId b = 0; b < a; ++b) row.push_back(space.distance(a, b));
      rows.push_back(std::move(row));
    }
    j["dist"] = std::move(rows);
  } else {
    j["dist"] = tag;
  }
  auto& radii = j["interior_radius"] = nlohmann::ordered_json::array();
  for (PointId x = 0; x < space.size(); ++x) {
    auto r = space.interior_radius(x);
    if (r >= kUnbounded) {
      radii.push_back(nullptr);
    } else {
      radii.push_back(r);
    }
  }
  return j;
}

namespace {

std::map<std::string, std::string> parse_tag(const std::string& tag, std::string& head) {
  std::istringstream in(tag);
  in >> head;
  std::map<std::string, std::string> kv;
  std::string item;
  while (in >> item) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed window tag: '" + tag + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

int tag_int(const std::map<std::string, std::string>& kv, const std::string& key, const std::string& tag) {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::invalid_argument("window tag '" + tag + "' lacks " + key);
  try {
    return std::stoi(it->second);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("window tag '" + tag + "' has bad " + key);
  }
}

SpacePtr rebuild(const std::string& metric, const std::string& tag) {
  std::string head;
  auto kv = parse_tag(tag, head);
  if (metric == "l1-grid" && head == "grid") {
    return grid_space(tag_int(kv, "k", tag), tag_int(kv, "half_width", tag));
  }
  if (metric == "tree" && head == "tree") {
    return tree_ball(tag_int(kv, "valence", tag), tag_int(kv, "depth", tag), tag_int(kv, "spine", tag));
  }
  if (metric == "lamplighter" && head == "lamplighter") {
    auto radius = tag_int(kv, "radius", tag);
    auto sub = kv.count("subgroup") ? kv.at("subgroup") : "whole";
    if (sub == "whole") return lamplighter_ball(radius);
    if (sub == "lamps") return lamp_ball(radius);
    if (sub == "local") return local_lamp_ball(radius, tag_int(kv, "m", tag));
    throw std::invalid_argument("window tag '" + tag + "' has unknown subgroup");
  }
  if (metric == "a-lattice" && head == "a-lattice") {
    return a_lattice_ball(tag_int(kv, "n", tag), tag_int(kv, "radius", tag));
  }
  throw std::invalid_argument("cannot rebuild metric '" + metric + "' from window tag '" + tag + "'");
}

}  // namespace

SpacePtr space_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("window_tag") || !j.contains("points") || !j.contains("dist")) {
    throw std::invalid_argument("space JSON needs window_tag, points and dist");
  }
  auto tag = j.at("window_tag").get<std::string>();
  auto labels = j.at("points").get<std::vector<std::string>>();
  std::vector<Distance> radii;
  if (j.contains("interior_radius")) {
    for (const auto& r : j.at("interior_radius")) radii.push_back(r.is_null() ? kUnbounded : r.get<Distance>());
  }
  const auto& dist = j.at("dist");
  if (dist.is_string()) {
    auto space = rebuild(dist.get<std::string>(), tag);
    if (space->size() != labels.size()) throw std::invalid_argument("space JSON: point count disagrees with window tag");
    for (PointId x = 0; x < space->size(); ++x) {
      if (space->label(x) != labels[x]) {
        throw std::invalid_argument("space JSON: label " + labels[x] + " disagrees with rebuilt " + space->label(x));
      }
    }
    return space;
  }
  auto rows = dist.get<std::vector<std::vector<Distance>>>();
  return std::make_shared<ExplicitSpace>(tag, std::move(labels), std::move(rows), std::move(radii));
}

}  // namespace coarse
