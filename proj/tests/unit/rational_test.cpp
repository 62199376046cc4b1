#include <gtest/gtest.h>

#include <random>

#include "mlcheck/error.hpp"
#include "mlcheck/rational.hpp"

using namespace mlcheck;

TEST(Rational, ParsesDecimalsFractionsAndSigns) {
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("-0.25"), Rational(-1, 4));
  EXPECT_EQ(parse_rational("+1.5"), Rational(3, 2));
  EXPECT_EQ(parse_rational("2/6"), Rational(1, 3));
  EXPECT_EQ(parse_rational("-7/2"), Rational(-7, 2));
  EXPECT_EQ(parse_rational(".5"), Rational(1, 2));
}

TEST(Rational, RejectsGarbage) {
  for (const char* bad : {"", "-", "1.2.3", "abc", "1/0", "1e5", "3/", " 1"}) {
    EXPECT_THROW(parse_rational(bad), Error) << bad;
  }
}

TEST(Rational, PrintsTerminatingDecimalsElseFraction) {
  EXPECT_EQ(to_string(Rational(1, 4)), "0.25");
  EXPECT_EQ(to_string(Rational(-3)), "-3");
  EXPECT_EQ(to_string(Rational(1, 3)), "1/3");
  EXPECT_EQ(to_string(Rational(-1, 80)), "-0.0125");
}

TEST(Rational, RoundHalfAwayFromZero) {
  EXPECT_EQ(round_decimal(Rational(5, 10000), 3), Rational(1, 1000));
  EXPECT_EQ(round_decimal(Rational(-5, 10000), 3), Rational(-1, 1000));
  EXPECT_EQ(round_decimal(Rational(4, 10000), 3), Rational(0));
  EXPECT_EQ(round_decimal(Rational(5, 2), 0), Rational(3));
  EXPECT_EQ(round_decimal(Rational(-5, 2), 0), Rational(-3));
}

TEST(Rational, PrintParseRoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(-100000, 100000);
  std::uniform_int_distribution<long> den(1, 5000);
  for (int k = 0; k < 2000; ++k) {
    Rational r(num(rng), den(rng));
    r.canonicalize();
    EXPECT_EQ(parse_rational(to_string(r)), r);
  }
}

TEST(Rational, FloorCeilAndIntegrality) {
  EXPECT_EQ(floor(Rational(-1, 2)), Rational(-1));
  EXPECT_EQ(ceil(Rational(-1, 2)), Rational(0));
  EXPECT_EQ(floor(Rational(7, 2)), Rational(3));
  EXPECT_TRUE(is_integer(Rational(4, 2)));
  EXPECT_FALSE(is_integer(Rational(1, 2)));
  EXPECT_EQ(to_int64(Rational(-12)), -12);
}

TEST(Rational, FromDoubleIsExact) {
  EXPECT_EQ(from_double(0.5), Rational(1, 2));
  EXPECT_DOUBLE_EQ(to_double(from_double(0.1)), 0.1);
}
