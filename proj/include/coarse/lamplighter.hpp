#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace coarse {

/// An element of Z wr Z = (sum_Z Z) x| Z: a finitely supported lamp
/// configuration together with a cursor position.
///
/// Multiplication is (f, c) * (g, d) = (f + g(. - c), c + d); the generators
/// are t = (0, 1) and a = (delta_0, 0), so right multiplication by t moves
/// the cursor and right multiplication by a changes the lamp under it.
class LamplighterElement {
 public:
  using Lamp = std::pair<std::int64_t, std::int64_t>;  // (position, value), value != 0

  LamplighterElement() = default;
  LamplighterElement(std::vector<Lamp> lamps, std::int64_t cursor);

  static LamplighterElement identity() { return {}; }
  static LamplighterElement t(std::int64_t power = 1) { return {{}, power}; }
  static LamplighterElement a(std::int64_t power = 1) { return {{{0, power}}, 0}; }

  std::int64_t cursor() const { return cursor_; }
  /// Sorted by position, zero values removed.
  const std::vector<Lamp>& lamps() const { return lamps_; }
  std::int64_t lamp(std::int64_t position) const;
  bool is_identity() const { return cursor_ == 0 && lamps_.empty(); }

  /// Smallest and largest lit positions; only meaningful with lamps present.
  std::int64_t support_min() const { return lamps_.front().first; }
  std::int64_t support_max() const { return lamps_.back().first; }

  LamplighterElement inverse() const;
  LamplighterElement operator*(const LamplighterElement& other) const;

  /// Right multiplication by one generator: t^{+-1} or a^{+-1}.
  LamplighterElement move_cursor(std::int64_t step) const;
  LamplighterElement toggle(std::int64_t delta) const;

  /// Lamps shifted so that position p becomes p - offset; cursor untouched.
  LamplighterElement shifted_lamps(std::int64_t offset) const;

  /// "c=<cursor>;<pos>:<val>,..." e.g. "c=0;2:1".
  std::string label() const;
  static LamplighterElement parse(const std::string& label);

  friend bool operator==(const LamplighterElement&, const LamplighterElement&) = default;

 private:
  std::vector<Lamp> lamps_;
  std::int64_t cursor_ = 0;
};

struct LamplighterElementHash {
  std::size_t operator()(const LamplighterElement& g) const noexcept;
};

/// Word length for the generators {t, a}: the total lamp mass plus the
/// shortest walk on Z from 0 to the cursor that visits every lit position.
std::int64_t lamplighter_length(const LamplighterElement& g);

/// d(g, h) = |g^{-1} h|.
std::int64_t lamplighter_distance(const LamplighterElement& g, const LamplighterElement& h);

}  // namespace coarse
