#include "coarse/lamplighter.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace coarse {

namespace {

// Shortest walk on Z from `from` to `to` visiting [lo, hi] (lo <= hi).
std::int64_t line_walk(std::int64_t from, std::int64_t to, std::int64_t lo, std::int64_t hi) {
  lo = std::min({lo, from, to});
  hi = std::max({hi, from, to});
  auto left_first = (from - lo) + (hi - lo) + (hi - to);
  auto right_first = (hi - from) + (hi - lo) + (to - lo);
  return std::min(left_first, right_first);
}

}  // namespace

LamplighterElement::LamplighterElement(std::vector<Lamp> lamps, std::int64_t cursor) : cursor_(cursor) {
  std::sort(lamps.begin(), lamps.end());
  for (const auto& [pos, val] : lamps) {
    if (!lamps_.empty() && lamps_.back().first == pos) {
      lamps_.back().second += val;
      if (lamps_.back().second == 0) lamps_.pop_back();
    } else if (val != 0) {
      lamps_.emplace_back(pos, val);
    }
  }
}

std::int64_t LamplighterElement::lamp(std::int64_t position) const {
  auto it = std::lower_bound(lamps_.begin(), lamps_.end(), Lamp{position, std::numeric_limits<std::int64_t>::min()});
  return (it != lamps_.end() && it->first == position) ? it->second : 0;
}

LamplighterElement LamplighterElement::inverse() const {
  // (f, c)^{-1} = (-f(. + c), -c)
  LamplighterElement r;
  r.cursor_ = -cursor_;
  r.lamps_.reserve(lamps_.size());
  for (const auto& [pos, val] : lamps_) r.lamps_.emplace_back(pos - cursor_, -val);
  return r;
}

LamplighterElement LamplighterElement::operator*(const LamplighterElement& other) const {
  std::vector<Lamp> merged;
  merged.reserve(lamps_.size() + other.lamps_.size());
  auto i = lamps_.begin();
  auto j = other.lamps_.begin();
  while (i != lamps_.end() || j != other.lamps_.end()) {
    if (j == other.lamps_.end() || (i != lamps_.end() && i->first < j->first + cursor_)) {
      merged.push_back(*i++);
    } else if (i == lamps_.end() || j->first + cursor_ < i->first) {
      merged.emplace_back(j->first + cursor_, j->second);
      ++j;
    } else {
      auto v = i->second + j->second;
      if (v != 0) merged.emplace_back(i->first, v);
      ++i;
      ++j;
    }
  }
  LamplighterElement r;
  r.lamps_ = std::move(merged);
  r.cursor_ = cursor_ + other.cursor_;
  return r;
}

LamplighterElement LamplighterElement::move_cursor(std::int64_t step) const {
  LamplighterElement r = *this;
  r.cursor_ += step;
  return r;
}

LamplighterElement LamplighterElement::toggle(std::int64_t delta) const {
  LamplighterElement r = *this;
  auto it = std::lower_bound(r.lamps_.begin(), r.lamps_.end(), Lamp{cursor_, std::numeric_limits<std::int64_t>::min()});
  if (it != r.lamps_.end() && it->first == cursor_) {
    it->second += delta;
    if (it->second == 0) r.lamps_.erase(it);
  } else if (delta != 0) {
    r.lamps_.insert(it, Lamp{cursor_, delta});
  }
  return r;
}

LamplighterElement LamplighterElement::shifted_lamps(std::int64_t offset) const {
  LamplighterElement r = *this;
  for (auto& lamp : r.lamps_) lamp.first -= offset;
  return r;
}

std::string LamplighterElement::label() const {
  std::ostringstream out;
  out << "c=" << cursor_ << ';';
  for (std::size_t i = 0; i < lamps_.size(); ++i) {
    if (i) out << ',';
    out << lamps_[i].first << ':' << lamps_[i].second;
  }
  return out.str();
}

LamplighterElement LamplighterElement::parse(const std::string& label) {
  auto fail = [&] { return std::invalid_argument("malformed lamplighter label: '" + label + "'"); };
  if (label.rfind("c=", 0) != 0) throw fail();
  auto semi = label.find(';');
  if (semi == std::string::npos) throw fail();
  std::vector<Lamp> lamps;
  std::int64_t cursor = 0;
  try {
    cursor = std::stoll(label.substr(2, semi - 2));
    std::string rest = label.substr(semi + 1);
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos) throw fail();
      lamps.emplace_back(std::stoll(item.substr(0, colon)), std::stoll(item.substr(colon + 1)));
    }
  } catch (const std::logic_error&) {
    throw fail();
  }
  return {std::move(lamps), cursor};
}

std::size_t LamplighterElementHash::operator()(const LamplighterElement& g) const noexcept {
  std::size_t h = std::hash<std::int64_t>{}(g.cursor()) * 0x9e3779b97f4a7c15ULL;
  for (const auto& [pos, val] : g.lamps()) {
    h ^= std::hash<std::int64_t>{}(pos * 1000003 + val) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::int64_t lamplighter_length(const LamplighterElement& g) {
  std::int64_t mass = 0;
  for (const auto& lamp : g.lamps()) mass += std::llabs(lamp.second);
  if (g.lamps().empty()) return mass + std::llabs(g.cursor());
  return mass + line_walk(0, g.cursor(), g.support_min(), g.support_max());
}

std::int64_t lamplighter_distance(const LamplighterElement& g, const LamplighterElement& h) {
  // g^{-1} h has lamps (h - g)(. + c_g) and cursor c_h - c_g; equivalently the
  // walk runs from c_g to c_h over the support of h - g.
  const auto& a = g.lamps();
  const auto& b = h.lamps();
  std::int64_t mass = 0;
  std::int64_t lo = 0, hi = 0;
  bool any = false;
  auto note = [&](std::int64_t pos, std::int64_t diff) {
    if (diff == 0) return;
    mass += std::llabs(diff);
    if (!any) {
      lo = hi = pos;
      any = true;
    } else {
      lo = std::min(lo, pos);
      hi = std::max(hi, pos);
    }
  };
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      note(i->first, -i->second);
      ++i;
    } else if (i == a.end() || j->first < i->first) {
      note(j->first, j->second);
      ++j;
    } else {
      note(i->first, j->second - i->second);
      ++i;
      ++j;
    }
  }
  if (!any) return std::llabs(h.cursor() - g.cursor());
  return mass + line_walk(g.cursor(), h.cursor(), lo, hi);
}

}  // namespace coarse
