#include "mlcheck/rational.hpp"

#include <cmath>
#include <stdexcept>

#include "mlcheck/error.hpp"

namespace mlcheck {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

mpz_class pow10(unsigned long exponent) {
  mpz_class result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
  return result;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw Error("invalid rational literal '" + std::string(text) + "'");
    }
    mpz_class d(std::string(den), 10);
    if (d == 0) throw Error("zero denominator in '" + std::string(text) + "'");
    result = Rational(mpz_class(std::string(num), 10), d);
  } else {
    auto dot = body.find('.');
    auto whole = body.substr(0, dot);
    auto frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty())) {
      throw Error("invalid rational literal '" + std::string(text) + "'");
    }
    std::string digits = std::string(whole) + std::string(frac);
    result = Rational(mpz_class(digits, 10), pow10(frac.size()));
  }
  result.canonicalize();
  return negative ? Rational(-result) : result;
}

int decimal_digits(const Rational& value) {
  mpz_class den = value.get_den();
  int twos = 0;
  int fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return -1;
  return std::max(twos, fives);
}

std::string to_decimal(const Rational& value) {
  int digits = decimal_digits(value);
  if (digits < 0) throw Error("value " + value.get_str() + " has no finite decimal expansion");
  mpz_class scaled = value.get_num() * pow10(digits) / value.get_den();
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string text = scaled.get_str();
  if (digits > 0) {
    if (text.size() <= static_cast<std::size_t>(digits)) {
      text.insert(0, static_cast<std::size_t>(digits) - text.size() + 1, '0');
    }
    text.insert(text.size() - digits, ".");
  }
  return negative ? "-" + text : text;
}

std::string to_string(const Rational& value) {
  if (decimal_digits(value) >= 0) return to_decimal(value);
  return value.get_str();
}

Rational floor(const Rational& value) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return Rational(q);
}

Rational ceil(const Rational& value) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return Rational(q);
}

bool is_integer(const Rational& value) {
  // tolerate values built without canonicalize()
  return mpz_divisible_p(value.get_num_mpz_t(), value.get_den_mpz_t()) != 0;
}

Rational round_decimal(const Rational& value, int digits) {
  Rational scale(pow10(static_cast<unsigned long>(digits)));
  Rational scaled = abs(value) * scale;
  Rational rounded = floor(scaled + Rational(1, 2));
  Rational result = rounded / scale;
  result.canonicalize();
  return value < 0 ? Rational(-result) : result;
}

Rational from_double(double value) {
  if (!std::isfinite(value)) throw Error("non-finite value cannot be made rational");
  Rational result(value);
  result.canonicalize();
  return result;
}

double to_double(const Rational& value) { return value.get_d(); }

std::int64_t to_int64(const Rational& value) {
  if (!is_integer(value)) throw Error("value " + to_string(value) + " is not an integer");
  Rational v = value;
  v.canonicalize();
  if (!v.get_num().fits_slong_p()) throw Error("integer " + to_string(v) + " out of range");
  return v.get_num().get_si();
}

}  // namespace mlcheck
