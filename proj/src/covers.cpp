#include "coarse/covers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace coarse {

std::vector<std::vector<std::uint32_t>> Cover::memberships() const {
  std::vector<std::vector<std::uint32_t>> in(space->size());
  for (std::uint32_t s = 0; s < sets.size(); ++s) {
    for (auto x : sets[s]) in[x].push_back(s);
  }
  return in;
}

void Cover::normalize() {
  std::vector<std::vector<PointId>> kept;
  std::vector<int> kept_family;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    if (sets[s].empty()) continue;
    auto set = std::move(sets[s]);
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    kept.push_back(std::move(set));
    if (!family.empty()) kept_family.push_back(family[s]);
  }
  sets = std::move(kept);
  family = std::move(kept_family);
}

// ---------------------------------------------------------------------------
// Statistics

namespace {

bool contains(const std::vector<std::uint32_t>& sorted, std::uint32_t s) {
  return std::binary_search(sorted.begin(), sorted.end(), s);
}

Distance saturating_next(Distance r) { return r >= kUnbounded ? kUnbounded : r + 1; }

}  // namespace

std::vector<std::vector<std::pair<std::uint32_t, Distance>>> set_depths(const Cover& cover) {
  const auto& space = *cover.space;
  const auto in = cover.memberships();
  std::vector<std::vector<std::pair<std::uint32_t, Distance>>> depth(space.size());
  for (PointId x = 0; x < space.size(); ++x) {
    const Distance cap = saturating_next(space.interior_radius(x));
    auto& out = depth[x];
    for (auto s : in[x]) out.emplace_back(s, cap);
    if (in[x].empty()) continue;
    if (!space.local_spheres()) {
      for (auto& [s, d] : out) {
        for (PointId y = 0; y < space.size(); ++y) {
          if (!contains(in[y], s)) d = std::min(d, space.distance(x, y));
        }
      }
      continue;
    }
    // Grow spheres around x; a set dies at the first radius where a point
    // escapes it.
    std::vector<std::size_t> alive(out.size());
    for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
    std::size_t seen = 1;
    for (Distance r = 1; r < cap && !alive.empty() && seen < space.size(); ++r) {
      auto layer = space.sphere(x, r);
      seen += layer.size();
      for (auto y : layer) {
        std::erase_if(alive, [&](std::size_t i) {
          if (contains(in[y], out[i].first)) return false;
          out[i].second = r;
          return true;
        });
        if (alive.empty()) break;
      }
    }
  }
  return depth;
}

std::vector<Distance> pointwise_lebesgue(const Cover& cover) {
  auto depth = set_depths(cover);
  std::vector<Distance> value(depth.size(), 0);
  for (std::size_t x = 0; x < depth.size(); ++x) {
    for (auto [s, d] : depth[x]) value[x] = std::max(value[x], d);
  }
  return value;
}

Distance set_diameter(const FiniteMetricSpace& space, const std::vector<PointId>& set) {
  if (set.size() < 2) return 0;
  // Sort by distance from a centre; d(x, y) <= r_x + r_y bounds every pair
  // that is still to come.
  const auto centre = set.front();
  std::vector<std::pair<Distance, PointId>> by_radius;
  by_radius.reserve(set.size());
  for (auto x : set) by_radius.emplace_back(space.distance(centre, x), x);
  std::sort(by_radius.begin(), by_radius.end(), std::greater<>());
  Distance best = by_radius.front().first;
  for (std::size_t i = 0; i < by_radius.size(); ++i) {
    if (2 * by_radius[i].first <= best) break;
    for (std::size_t j = i + 1; j < by_radius.size(); ++j) {
      if (by_radius[i].first + by_radius[j].first <= best) break;
      best = std::max(best, space.distance(by_radius[i].second, by_radius[j].second));
    }
  }
  return best;
}

CoverStats cover_stats(const Cover& cover, const std::vector<double>& p_list) {
  const auto& space = *cover.space;
  CoverStats st;
  st.set_count = cover.sets.size();
  const auto in = cover.memberships();
  for (PointId x = 0; x < space.size(); ++x) {
    if (in[x].empty()) throw CoverageError("point " + space.label(x) + " lies in no set", x);
    if (static_cast<int>(in[x].size()) > st.multiplicity) {
      st.multiplicity = static_cast<int>(in[x].size());
      st.multiplicity_witness = x;
    }
  }
  for (std::size_t s = 0; s < cover.sets.size(); ++s) {
    auto d = set_diameter(space, cover.sets[s]);
    if (d > st.mesh) {
      st.mesh = d;
      st.mesh_witness = s;
    }
  }
  // Points whose value stops at the window edge say nothing about the cover;
  // the window itself certifies at most max interior_radius + 1.
  const auto value = pointwise_lebesgue(cover);
  Distance window_limit = 0;
  for (PointId x = 0; x < space.size(); ++x) window_limit = std::max(window_limit, saturating_next(space.interior_radius(x)));
  st.lebesgue = window_limit;
  for (PointId x = 0; x < space.size(); ++x) {
    if (value[x] <= space.interior_radius(x) && value[x] < st.lebesgue) {
      st.lebesgue = value[x];
      st.lebesgue_witness = x;
    }
  }
  for (double p : p_list) {
    double L = st.lebesgue >= kUnbounded ? std::numeric_limits<double>::infinity() : static_cast<double>(st.lebesgue);
    st.delta_p.emplace_back(p, L / std::pow(static_cast<double>(st.multiplicity), 2.0 / p));
  }
  return st;
}

// ---------------------------------------------------------------------------
// Constructions

Cover interval_cover(const std::shared_ptr<const GridSpace>& line, std::int64_t step, std::int64_t radius) {
  if (line->dimension() != 1) throw std::invalid_argument("interval_cover: window must be one-dimensional");
  if (step < 1 || radius < 0) throw std::invalid_argument("interval_cover: need step >= 1 and radius >= 0");
  const std::int64_t hw = line->half_width();
  Cover cover{line, {}, {}};
  auto first = [&](std::int64_t v) { return v >= 0 ? v / step : -((-v + step - 1) / step); };
  for (std::int64_t z = first(-hw - radius); z * step - radius <= hw; ++z) {
    std::vector<PointId> set;
    for (std::int64_t v = std::max(-hw, z * step - radius); v <= std::min(hw, z * step + radius); ++v) {
      const std::int64_t c[1] = {v};
      set.push_back(*line->index_of(c));
    }
    if (!set.empty()) {
      cover.sets.push_back(std::move(set));
      cover.family.push_back(static_cast<int>(((z % 2) + 2) % 2));
    }
  }
  cover.normalize();
  return cover;
}

Cover balls_cover(const SpacePtr& space, const Rational& r) {
  if (r <= 0) throw std::invalid_argument("balls_cover: radius must be positive");
  Cover cover{space, {}, {}};
  const auto radius = floor(r);
  cover.sets.reserve(space->size());
  for (PointId x = 0; x < space->size(); ++x) {
    auto b = space->ball(x, radius);
    std::sort(b.begin(), b.end());
    cover.sets.push_back(std::move(b));
  }
  return cover;
}

namespace {

// Groups points by the translates returned for their doubled coordinates.
template <class Doubled>
Cover lattice_cover_of(const SpacePtr& space, const LatticeCoverSpec& spec, Doubled&& doubled) {
  Cover cover{space, {}, {}};
  std::map<LatticeTranslate, std::uint32_t> id;
  for (PointId x = 0; x < space->size(); ++x) {
    auto w = doubled(x);
    auto found = voronoi_membership_doubled(w, spec);
    if (found.empty()) throw CoverageError("lattice cover misses " + space->label(x), x);
    for (auto& t : found) {
      auto [it, fresh] = id.emplace(t, static_cast<std::uint32_t>(cover.sets.size()));
      if (fresh) {
        cover.sets.emplace_back();
        cover.family.push_back(t.family);
      }
      cover.sets[it->second].push_back(x);
    }
  }
  return cover;
}

}  // namespace

Cover lattice_pullback_cover(const std::shared_ptr<const GridSpace>& grid, const LatticeCoverSpec& spec) {
  if (spec.n != 2 * grid->dimension()) throw std::invalid_argument("lattice_pullback_cover: need n = 2k");
  std::vector<std::int64_t> w(static_cast<std::size_t>(spec.n));
  return lattice_cover_of(grid, spec, [&](PointId x) {
    // 2 iota(z) = (z_1, -z_1, ..., z_k, -z_k)
    auto z = grid->coords(x);
    for (std::size_t i = 0; i < z.size(); ++i) {
      w[2 * i] = z[i];
      w[2 * i + 1] = -z[i];
    }
    return std::span<const std::int64_t>(w);
  });
}

Cover lattice_window_cover(const std::shared_ptr<const ALatticeSpace>& window, const LatticeCoverSpec& spec) {
  if (spec.n != window->ambient_dimension()) throw std::invalid_argument("lattice_window_cover: dimension mismatch");
  return lattice_cover_of(window, spec, [&](PointId x) { return window->doubled(x); });
}

Cover zk_cover(int k, const Rational& L, const std::shared_ptr<const GridSpace>& window, ZkCoverReport* report) {
  if (k < 1) throw std::invalid_argument("zk_cover: k must be >= 1");
  if (L <= 0) throw std::invalid_argument("zk_cover: L must be positive");
  if (window->dimension() != k) throw std::invalid_argument("zk_cover: window dimension differs from k");
  const int n = 2 * k;
  const auto tau = LatticeCoverSpec::default_thickening(n);
  const Rational certified = L / tau;

  // The default thickening with its certified scale, plus a thicker 1/n
  // variant; scales run over quarter steps below each certified value.
  std::vector<LatticeCoverSpec> specs;
  std::vector<Rational> thickenings{tau};
  if (Rational(1, n) > tau) thickenings.emplace_back(1, n);
  for (const auto& t : thickenings) {
    const Rational top = L / t;
    for (std::int64_t q = 1; Rational(q, 4) < top; ++q) specs.push_back({n, Rational(q, 4), t, true});
    specs.push_back({n, top, t, true});
  }

  std::optional<Cover> best;
  ZkCoverReport best_report;
  std::size_t tried = 0;
  for (const auto& spec : specs) {
    auto cover = lattice_pullback_cover(window, spec);
    ++tried;
    auto st = cover_stats(cover);
    if (st.multiplicity > n || Rational(st.lebesgue) < L) continue;
    if (!best || st.mesh < best_report.stats.mesh) {
      best = std::move(cover);
      best_report.chosen = spec;
      best_report.stats = st;
    }
  }
  if (!best) {
    // Nothing met the bounds on this window; fall back to the certified scale
    // and let the caller see the measured statistics.
    LatticeCoverSpec spec{n, certified, tau, true};
    best = lattice_pullback_cover(window, spec);
    best_report.chosen = spec;
    best_report.stats = cover_stats(*best);
  }
  best_report.candidates_tried = tried;
  best_report.certified_scale = best_report.chosen.thickening == tau && best_report.chosen.scale == certified;
  if (report) *report = best_report;
  return std::move(*best);
}

// ---------------------------------------------------------------------------
// Maps

Cover pullback_cover(const PointMap& f, const Cover& cover) {
  if (f.image.size() != f.source->size()) throw std::invalid_argument("pullback_cover: map is not total");
  const auto in = cover.memberships();
  Cover out{f.source, std::vector<std::vector<PointId>>(cover.sets.size()), cover.family};
  for (PointId x = 0; x < f.source->size(); ++x) {
    for (auto s : in.at(f.image[x])) out.sets[s].push_back(x);
  }
  out.normalize();
  return out;
}

Distance MapDistortion::minus_at(Distance t) const {
  auto it = std::lower_bound(source_distances.begin(), source_distances.end(), t);
  if (it == source_distances.end()) return kUnbounded;
  return rho_minus[static_cast<std::size_t>(it - source_distances.begin())];
}

Distance MapDistortion::plus_at(Distance t) const {
  auto it = std::upper_bound(source_distances.begin(), source_distances.end(), t);
  if (it == source_distances.begin()) return 0;
  return rho_plus[static_cast<std::size_t>(it - source_distances.begin()) - 1];
}

MapDistortion measure_distortion(const PointMap& f) {
  std::map<Distance, std::pair<Distance, Distance>> by_source;  // d_X -> (min d_Y, max d_Y)
  for (PointId a = 0; a < f.source->size(); ++a) {
    for (PointId b = a; b < f.source->size(); ++b) {
      auto dx = f.source->distance(a, b);
      auto dy = f.target->distance(f.image[a], f.image[b]);
      auto [it, fresh] = by_source.emplace(dx, std::make_pair(dy, dy));
      if (!fresh) {
        it->second.first = std::min(it->second.first, dy);
        it->second.second = std::max(it->second.second, dy);
      }
    }
  }
  MapDistortion m;
  for (auto& [dx, range] : by_source) {
    m.source_distances.push_back(dx);
    m.rho_minus.push_back(range.first);
    m.rho_plus.push_back(range.second);
  }
  for (std::size_t i = m.rho_minus.size(); i-- > 1;) m.rho_minus[i - 1] = std::min(m.rho_minus[i - 1], m.rho_minus[i]);
  for (std::size_t i = 1; i < m.rho_plus.size(); ++i) m.rho_plus[i] = std::max(m.rho_plus[i], m.rho_plus[i - 1]);
  return m;
}

InducedCheck check_induced(const PointMap& f, const Cover& cover) {
  InducedCheck r;
  auto pulled = pullback_cover(f, cover);
  r.source_stats = cover_stats(pulled);
  r.target_stats = cover_stats(cover);
  auto m = measure_distortion(f);
  r.lebesgue_ok = m.plus_at(r.source_stats.lebesgue) >= r.target_stats.lebesgue ||
                  r.source_stats.lebesgue >= kUnbounded;
  r.mesh_ok = m.minus_at(r.source_stats.mesh) <= r.target_stats.mesh;
  return r;
}

// ---------------------------------------------------------------------------
// Type function

std::vector<TypePoint> type_function_upper(const std::function<std::optional<CoverStats>(const Rational&)>& build,
                                           int k, const std::vector<Rational>& L_list) {
  std::vector<TypePoint> out;
  for (const auto& L : L_list) {
    auto st = build(L);
    if (!st) throw std::invalid_argument("type_function_upper: no construction for L = " + to_string(L));
    if (st->multiplicity > k + 1) {
      throw std::invalid_argument("type_function_upper: construction for L = " + to_string(L) +
                                  " has multiplicity " + std::to_string(st->multiplicity));
    }
    if (Rational(st->lebesgue) < L) {
      throw std::invalid_argument("type_function_upper: construction for L = " + to_string(L) +
                                  " has Lebesgue number " + std::to_string(st->lebesgue));
    }
    out.push_back({L, st->mesh, st->mesh, st->multiplicity});
  }
  std::sort(out.begin(), out.end(), [](const TypePoint& a, const TypePoint& b) { return a.L < b.L; });
  for (std::size_t i = out.size(); i-- > 1;) out[i - 1].upper = std::min(out[i - 1].upper, out[i].upper);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::ordered_json to_json(const Cover& cover) {
  nlohmann::ordered_json j;
  j["space"] = cover.space->window_tag();
  j["sets"] = cover.sets;
  j["family"] = cover.family;
  return j;
}

Cover cover_from_json(const nlohmann::json& j, const SpacePtr& space) {
  if (!j.contains("sets")) throw std::invalid_argument("cover JSON needs sets");
  if (j.contains("space") && j.at("space").get<std::string>() != space->window_tag()) {
    throw std::invalid_argument("cover JSON refers to '" + j.at("space").get<std::string>() + "'");
  }
  Cover c{space, j.at("sets").get<std::vector<std::vector<PointId>>>(), {}};
  if (j.contains("family")) c.family = j.at("family").get<std::vector<int>>();
  for (const auto& s : c.sets) {
    for (auto x : s) {
      if (x >= space->size()) throw std::invalid_argument("cover JSON: point index out of range");
    }
  }
  if (!c.family.empty() && c.family.size() != c.sets.size()) throw std::invalid_argument("cover JSON: family size mismatch");
  return c;
}

}  // namespace coarse
