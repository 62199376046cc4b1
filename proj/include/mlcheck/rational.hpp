#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace mlcheck {

/// Exact rational number. All feature values, thresholds and quantized
/// weights are carried as rationals so encodings stay bit-exact.
using Rational = mpq_class;

/// Parses "12", "-3.25" or "-7/3". Throws mlcheck::Error on anything else.
Rational parse_rational(std::string_view text);

/// Exact textual form: a decimal when the value terminates, "p/q" otherwise.
std::string to_string(const Rational& value);

/// Number of fractional decimal digits needed to print `value` exactly, or
/// -1 when the expansion does not terminate.
int decimal_digits(const Rational& value);

/// Decimal text with exactly the digits needed; requires decimal_digits() >= 0.
std::string to_decimal(const Rational& value);

/// Rounds half away from zero to `digits` fractional decimal digits.
Rational round_decimal(const Rational& value, int digits);

Rational floor(const Rational& value);
Rational ceil(const Rational& value);
bool is_integer(const Rational& value);

/// Exact conversion of a finite double.
Rational from_double(double value);
double to_double(const Rational& value);

/// Requires is_integer(value) and that it fits.
std::int64_t to_int64(const Rational& value);

}  // namespace mlcheck
