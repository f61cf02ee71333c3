#include "coarse/rational.hpp"

#include <stdexcept>

namespace coarse {

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  try {
    if (auto slash = text.find('/'); slash != std::string::npos) {
      std::size_t used = 0;
      auto num = std::stoll(text.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument(text);
      auto den_text = text.substr(slash + 1);
      auto den = std::stoll(den_text, &used);
      if (used != den_text.size() || den == 0) throw std::invalid_argument(text);
      return Rational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string::npos) {
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      std::int64_t den = 1;
      for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
      std::size_t used = 0;
      auto num = std::stoll(digits, &used);
      if (used != digits.size()) throw std::invalid_argument(text);
      return Rational(num, den);
    }
    std::size_t used = 0;
    auto num = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return Rational(num);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("malformed rational: '" + text + "'");
  }
}

std::int64_t floor(const Rational& q) {
  auto n = q.numerator();
  auto d = q.denominator();  // always positive
  auto r = n / d;
  if (n % d != 0 && n < 0) --r;
  return r;
}

std::int64_t ceil(const Rational& q) { return -floor(-q); }

Rational l1_norm(const RationalVector& v) {
  Rational s = 0;
  for (const auto& x : v) s += abs(x);
  return s;
}

Rational sum(const RationalVector& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

}  // namespace coarse
