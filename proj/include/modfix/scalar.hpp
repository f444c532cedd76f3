#pragma once

// Numeric backends. Every algorithm in the library is a template over a
// scalar type `T`; two are supported:
//   Rational  exact arbitrary-precision fractions (bit-exact identities)
//   double    IEEE binary64 (fast, compared with a relative slack)

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

#include "modfix/error.hpp"

namespace modfix {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

enum class Backend { exact, floating };

/// Relative slack used by float-backend inequality checks.
inline constexpr double kRelativeSlack = 1e-9;

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr Backend backend = Backend::exact;
  static constexpr std::string_view name = "exact";
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr Backend backend = Backend::floating;
  static constexpr std::string_view name = "float";
};

template <class T>
concept Scalar = requires { ScalarTraits<T>::exact; };

template <Scalar T>
inline constexpr bool is_exact_v = ScalarTraits<T>::exact;

inline std::string_view backend_name(Backend b) {
  return b == Backend::exact ? "exact" : "float";
}

inline Backend parse_backend(std::string_view s) {
  if (s == "exact") return Backend::exact;
  if (s == "float") return Backend::floating;
  throw PreconditionError("unknown backend '" + std::string(s) +
                          "' (expected exact|float)");
}

namespace detail {

inline BigInt pow10(unsigned e) {
  BigInt r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

// Parses "[-+]digits[.digits][e[-+]digits]" exactly.
inline Rational parse_decimal(std::string_view s, std::string_view whole) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
    negative = s[i] == '-';
    ++i;
  }
  BigInt mantissa = 0;
  unsigned frac_digits = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw DomainError("malformed number '" + std::string(whole) + "'");
  long exponent = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
      exp_negative = s[i] == '-';
      ++i;
    }
    if (i == s.size()) throw DomainError("malformed exponent in '" + std::string(whole) + "'");
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9')
        throw DomainError("malformed exponent in '" + std::string(whole) + "'");
      exponent = exponent * 10 + (s[i] - '0');
      if (exponent > 4000) throw DomainError("exponent out of range in '" + std::string(whole) + "'");
    }
    if (exp_negative) exponent = -exponent;
  }
  if (i != s.size()) throw DomainError("malformed number '" + std::string(whole) + "'");
  long scale = exponent - static_cast<long>(frac_digits);
  Rational r = scale >= 0 ? Rational(mantissa * pow10(static_cast<unsigned>(scale)))
                          : Rational(mantissa, pow10(static_cast<unsigned>(-scale)));
  return negative ? Rational(-r) : r;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parses "p/q", an integer, or a decimal with optional exponent into an
/// exact rational.
inline Rational parse_rational(std::string_view text) {
  std::string_view s = detail::trim(text);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return detail::parse_decimal(s, text);
  Rational num = detail::parse_decimal(detail::trim(s.substr(0, slash)), text);
  Rational den = detail::parse_decimal(detail::trim(s.substr(slash + 1)), text);
  if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

template <Scalar T>
T from_rational(const Rational& r) {
  if constexpr (is_exact_v<T>) {
    return r;
  } else {
    return static_cast<double>(r);
  }
}

template <Scalar T>
T parse_scalar(std::string_view text) {
  if constexpr (is_exact_v<T>) {
    return parse_rational(text);
  } else {
    std::string_view s = detail::trim(text);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return static_cast<double>(parse_rational(s));
    double num = static_cast<double>(parse_rational(s.substr(0, slash)));
    double den = static_cast<double>(parse_rational(s.substr(slash + 1)));
    if (den == 0.0) throw DomainError("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
}

/// Rationals print as "p/q" (or "p" when integral); doubles print in the
/// shortest form that round-trips.
inline std::string to_string(const Rational& r) {
  const BigInt& num = boost::multiprecision::numerator(r);
  const BigInt& den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline std::string to_string(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }
inline double to_double(double v) { return v; }

template <Scalar T>
T abs_value(const T& v) {
  return v < T(0) ? T(-v) : v;
}

template <Scalar T>
T pow_int(T base, unsigned exponent) {
  T result(1);
  while (exponent > 0) {
    if (exponent & 1u) result *= base;
    exponent >>= 1;
    if (exponent > 0) base *= base;
  }
  return result;
}

template <Scalar T>
bool is_finite(const T& v) {
  if constexpr (is_exact_v<T>) {
    return true;
  } else {
    return std::isfinite(v);
  }
}

/// True when `lhs` exceeds `rhs` by more than the backend's comparison slack:
/// strictly on the exact backend, by more than `rel` relative on floats.
template <Scalar T>
bool exceeds(const T& lhs, const T& rhs, double rel = kRelativeSlack) {
  if constexpr (is_exact_v<T>) {
    return lhs > rhs;
  } else {
    double scale = std::max(std::fabs(lhs), std::fabs(rhs));
    return lhs - rhs > rel * scale;
  }
}

/// Equality under the same slack rule as `exceeds`.
template <Scalar T>
bool approx_equal(const T& lhs, const T& rhs, double rel = kRelativeSlack) {
  return !exceeds(lhs, rhs, rel) && !exceeds(rhs, lhs, rel);
}

}  // namespace modfix
