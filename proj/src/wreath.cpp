#include <map>
#include <string>
#include <tuple>

#include "coarse/covers.hpp"

namespace coarse {

namespace {

// Splits lamps at positions |p| >= m (the coset part) from the rest.
std::pair<LamplighterElement, LamplighterElement> split_local(const LamplighterElement& f, int m) {
  std::vector<LamplighterElement::Lamp> far, near;
  for (const auto& lamp : f.lamps()) (lamp.first <= -m || lamp.first >= m ? far : near).push_back(lamp);
  return {LamplighterElement(std::move(far), 0), LamplighterElement(std::move(near), 0)};
}

// 2 iota(j(x)) for x in K_m.
std::vector<std::int64_t> doubled_iota_of_lamps(const LamplighterElement& local, int m) {
  auto z = j_embed(local, m);
  std::vector<std::int64_t> w;
  w.reserve(2 * z.size());
  for (auto v : z) {
    w.push_back(v);
    w.push_back(-v);
  }
  return w;
}

LatticeCoverSpec lamp_lattice_spec(int m, const Rational& lebesgue) {
  const int n = 2 * (2 * m - 1);
  const auto tau = LatticeCoverSpec::default_thickening(n);
  return {n, lebesgue / tau, tau, true};
}

}  // namespace

Cover local_lamp_cover(const std::shared_ptr<const LamplighterSpace>& local_window, int m, const Rational& lebesgue) {
  const auto spec = lamp_lattice_spec(m, lebesgue);
  Cover cover{local_window, {}, {}};
  std::map<LatticeTranslate, std::uint32_t> id;
  for (PointId x = 0; x < local_window->size(); ++x) {
    auto w = doubled_iota_of_lamps(local_window->element(x), m);
    auto found = voronoi_membership_doubled(w, spec);
    if (found.empty()) throw CoverageError("lattice cover misses " + local_window->label(x), x);
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

Cover extend_by_cosets(const Cover& local_cover, int m, const std::shared_ptr<const LamplighterSpace>& window) {
  auto local = std::dynamic_pointer_cast<const LamplighterSpace>(local_cover.space);
  if (!local || local->kind().subgroup != LamplighterWindowKind::Subgroup::kLocalLamps || local->kind().m != m) {
    throw std::invalid_argument("extend_by_cosets: cover must live on a K_m window with the same m");
  }
  if (window->kind().subgroup != LamplighterWindowKind::Subgroup::kLamps) {
    throw std::invalid_argument("extend_by_cosets: target window must be a lamp subgroup window");
  }
  const auto in = local_cover.memberships();
  Cover out{window, {}, {}};
  std::map<std::pair<std::string, std::uint32_t>, std::uint32_t> id;
  for (PointId x = 0; x < window->size(); ++x) {
    auto [coset, rest] = split_local(window->element(x), m);
    auto local_id = local->index_of(rest);
    if (!local_id) throw CoverageError("K_m part of " + window->label(x) + " is outside the local window", x);
    auto key_head = coset.label();
    for (auto s : in[*local_id]) {
      auto [it, fresh] = id.emplace(std::make_pair(key_head, s), static_cast<std::uint32_t>(out.sets.size()));
      if (fresh) {
        out.sets.emplace_back();
        out.family.push_back(local_cover.family.empty() ? 0 : local_cover.family[s]);
      }
      out.sets[it->second].push_back(x);
    }
  }
  return out;
}

Cover wreath_cover(const Rational& L, const std::shared_ptr<const LamplighterSpace>& window, WreathCoverReport* report) {
  if (L <= 0) throw std::invalid_argument("wreath_cover: L must be positive");
  if (window->kind().subgroup != LamplighterWindowKind::Subgroup::kWhole) {
    throw std::invalid_argument("wreath_cover: window must be a ball of the whole group");
  }
  const int m = static_cast<int>(ceil(12 * L));
  const std::int64_t r = ceil(L);
  const std::int64_t a = 2 * r;
  const auto spec = lamp_lattice_spec(m, Rational(2 * m));

  // Set key: (interval index, coset label, family, lambda).
  using Key = std::tuple<std::int64_t, std::string, LatticeTranslate>;
  std::map<Key, std::uint32_t> id;
  Cover cover{window, {}, {}};
  auto floor_div = [](std::int64_t p, std::int64_t q) { return p >= 0 ? p / q : -((-p + q - 1) / q); };

  for (PointId x = 0; x < window->size(); ++x) {
    const auto& g = window->element(x);
    const auto c = g.cursor();
    for (auto i = floor_div(c - r, a) - 1; i <= floor_div(c + r, a) + 1; ++i) {
      // J_i = [i a - r, i a + a - 1 + r], centred at c_i = i a + r.
      if (c < i * a - r || c > i * a + a - 1 + r) continue;
      const auto centre = i * a + r;
      auto [coset, rest] = split_local(g.shifted_lamps(centre), m);
      auto w = doubled_iota_of_lamps(rest, m);
      auto found = voronoi_membership_doubled(w, spec);
      if (found.empty()) throw CoverageError("lattice cover misses lamps of " + window->label(x), x);
      auto coset_label = coset.label();
      for (auto& t : found) {
        Key key{i, coset_label, t};
        auto [it, fresh] = id.emplace(std::move(key), static_cast<std::uint32_t>(cover.sets.size()));
        if (fresh) {
          cover.sets.emplace_back();
          cover.family.push_back(static_cast<int>(((i % 2) + 2) % 2) * spec.n + t.family);
        }
        cover.sets[it->second].push_back(x);
      }
    }
  }
  if (report) {
    report->m = m;
    report->interval_radius = r;
    report->lamp_spec = spec;
    report->stats = cover_stats(cover, {1.0, 2.0});
  }
  return cover;
}

}  // namespace coarse
