#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

// Under C++20 rewritten comparisons, rational<int64_t> == integer picks boost's
// templated overload and its reversed form, which recurse forever. Exact
// non-template overloads take precedence.
namespace boost {
inline bool operator==(const rational<std::int64_t>& a, int b) { return a == rational<std::int64_t>(b); }
inline bool operator==(int a, const rational<std::int64_t>& b) { return b == rational<std::int64_t>(a); }
inline bool operator==(const rational<std::int64_t>& a, std::int64_t b) { return a == rational<std::int64_t>(b); }
inline bool operator==(std::int64_t a, const rational<std::int64_t>& b) { return b == rational<std::int64_t>(a); }
}  // namespace boost

namespace coarse {

using Rational = boost::rational<std::int64_t>;
using RationalVector = std::vector<Rational>;

/// "num/den", or just "num" when the denominator is 1.
std::string to_string(const Rational& q);

/// Parses "a", "a/b" or a finite decimal such as "0.25".
Rational parse_rational(const std::string& text);

std::int64_t floor(const Rational& q);
std::int64_t ceil(const Rational& q);

inline double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

Rational l1_norm(const RationalVector& v);
Rational sum(const RationalVector& v);

}  // namespace coarse
