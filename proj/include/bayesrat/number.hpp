#pragma once

// Scalar backends. Every algorithm in the library is a template over the
// scalar type; `Rational` gives exact results, `double` compares within
// `kFloatTolerance`.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace bayesrat {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr double kFloatTolerance = 1e-9;

enum class NumberMode { rational, floating };

inline std::string_view to_string(NumberMode m) {
  return m == NumberMode::rational ? "rational" : "float";
}

template <typename T>
struct NumberTraits;

template <>
struct NumberTraits<Rational> {
  static constexpr NumberMode mode = NumberMode::rational;
  static constexpr bool exact = true;

  static bool equal(const Rational& a, const Rational& b) { return a == b; }
  static bool is_zero(const Rational& a) { return a == 0; }
  static bool is_positive(const Rational& a) { return a > 0; }
  static bool is_negative(const Rational& a) { return a < 0; }
  static Rational abs(const Rational& a) { return a < 0 ? Rational(-a) : a; }

  static Rational to_rational(const Rational& a) { return a; }
  static Rational from_rational(const Rational& a) { return a; }
  static double to_double(const Rational& a) {
    return static_cast<double>(a);
  }

  // Canonical "p/q"; integers print without a denominator.
  static std::string format(const Rational& a) {
    return a.str();
  }
};

template <>
struct NumberTraits<double> {
  static constexpr NumberMode mode = NumberMode::floating;
  static constexpr bool exact = false;

  static bool equal(double a, double b) {
    return std::fabs(a - b) <= kFloatTolerance;
  }
  static bool is_zero(double a) { return std::fabs(a) <= kFloatTolerance; }
  static bool is_positive(double a) { return a > kFloatTolerance; }
  static bool is_negative(double a) { return a < -kFloatTolerance; }
  static double abs(double a) { return std::fabs(a); }

  // Doubles are dyadic rationals, so this conversion is exact.
  static Rational to_rational(double a) { return Rational(a); }
  static double from_rational(const Rational& a) {
    return static_cast<double>(a);
  }
  static double to_double(double a) { return a; }

  static std::string format(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", a);
    return buf;
  }
};

template <typename T>
concept Scalar = requires { NumberTraits<T>::mode; };

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// cpp_int reads a leading 0 as an octal prefix.
inline BigInt decimal_digits(std::string_view s) {
  while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
  return BigInt{std::string(s)};
}

}  // namespace detail

/// Parses "p/q", an integer, or a plain decimal ("0.1875", "1e-3" is not
/// accepted) into an exact rational. Negative values are rejected here
/// rather than at validation time.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a non-negative number: \"" +
                                std::string(text) + "\"");
  };
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return fail();

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!detail::all_digits(num) || !detail::all_digits(den)) return fail();
    BigInt q = detail::decimal_digits(den);
    if (q == 0) return fail();
    return Rational(detail::decimal_digits(num), q);
  }

  auto dot = s.find('.');
  auto int_part = s.substr(0, dot);
  std::string_view frac_part =
      dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (int_part.empty() && frac_part.empty()) return fail();
  if (!int_part.empty() && !detail::all_digits(int_part)) return fail();
  if (dot != std::string_view::npos && !frac_part.empty() &&
      !detail::all_digits(frac_part))
    return fail();

  BigInt whole = int_part.empty() ? BigInt(0) : detail::decimal_digits(int_part);
  if (frac_part.empty()) return Rational(whole);
  BigInt scale = boost::multiprecision::pow(BigInt(10),
                                            static_cast<unsigned>(frac_part.size()));
  return Rational(whole * scale + detail::decimal_digits(frac_part), scale);
}

template <Scalar T>
T parse_number(std::string_view text) {
  if constexpr (std::is_same_v<T, Rational>) {
    return parse_rational(text);
  } else {
    return NumberTraits<T>::from_rational(parse_rational(text));
  }
}

template <Scalar T>
std::string format_number(const T& v) {
  return NumberTraits<T>::format(v);
}

}  // namespace bayesrat
