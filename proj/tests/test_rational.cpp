#include <gtest/gtest.h>

#include "coarse/rational.hpp"

using coarse::Rational;

TEST(Rational, ToStringDropsUnitDenominator) {
  EXPECT_EQ(coarse::to_string(Rational(6, 3)), "2");
  EXPECT_EQ(coarse::to_string(Rational(-3, 6)), "-1/2");
}

TEST(Rational, ParseForms) {
  EXPECT_EQ(coarse::parse_rational("7"), Rational(7));
  EXPECT_EQ(coarse::parse_rational("-3/12"), Rational(-1, 4));
  EXPECT_EQ(coarse::parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(coarse::parse_rational("-1.5"), Rational(-3, 2));
  EXPECT_THROW(coarse::parse_rational("1/0"), std::exception);
  EXPECT_THROW(coarse::parse_rational("abc"), std::exception);
}

TEST(Rational, FloorCeilMatchIntegerDivision) {
  for (std::int64_t num = -20; num <= 20; ++num) {
    for (std::int64_t den = 1; den <= 6; ++den) {
      const Rational q(num, den);
      std::int64_t f = num / den;
      if (f * den > num) --f;
      std::int64_t c = num / den;
      if (c * den < num) ++c;
      EXPECT_EQ(coarse::floor(q), f) << num << "/" << den;
      EXPECT_EQ(coarse::ceil(q), c) << num << "/" << den;
    }
  }
}

// Comparing with plain integers used to recurse forever under C++20 rewritten
// comparisons.
TEST(Rational, IntegerEqualityTerminates) {
  const Rational half(1, 2);
  EXPECT_FALSE(half == 0);
  EXPECT_TRUE(half != 1);
  EXPECT_TRUE(Rational(4, 2) == 2);
  EXPECT_TRUE(std::int64_t{3} == Rational(9, 3));
}

TEST(Rational, Norms) {
  coarse::RationalVector v{Rational(1, 2), Rational(-3, 4), Rational(1, 4)};
  EXPECT_EQ(coarse::l1_norm(v), Rational(3, 2));
  EXPECT_EQ(coarse::sum(v), Rational(0));
}
