#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bsilp {

// Exact arithmetic for everything boundary-sensitive (constraint data,
// thresholds, cell bounds). Probabilities and risk values stay binary64.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;  // row-major

inline double to_double(const Rational& v) { return v.convert_to<double>(); }

// Largest integer <= v.
inline BigInt rational_floor(const Rational& v) {
  BigInt q = numerator(v) / denominator(v);
  if (v < 0 && q * denominator(v) != numerator(v)) --q;
  return q;
}

inline BigInt rational_ceil(const Rational& v) { return -rational_floor(-v); }

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (ch < '0' || ch > '9') return false;
  return true;
}

}  // namespace detail

// Accepts "42", "-7", "3/4", "-7/3" and plain decimal literals such as
// "0.125" or "-2.5". Decimals become exact fractions over a power of ten;
// no float round-trip is involved. Returns nullopt on anything else.
inline std::optional<Rational> try_parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    if (!detail::all_digits(num) || !detail::all_digits(den)) return std::nullopt;
    BigInt d{std::string(den)};
    if (d == 0) return std::nullopt;
    Rational r{BigInt{std::string(num)}, d};
    return negative ? -r : r;
  }
  std::string_view int_part = text;
  std::string_view frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
    if (!detail::all_digits(frac_part)) return std::nullopt;
  }
  if (!detail::all_digits(int_part)) return std::nullopt;
  BigInt scale = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
  BigInt mantissa = BigInt{std::string(int_part)} * scale;
  if (!frac_part.empty()) mantissa += BigInt{std::string(frac_part)};
  Rational r{mantissa, scale};
  return negative ? -r : r;
}

// "p" when integral, "p/q" otherwise.
inline std::string format_rational(const Rational& v) {
  std::string out = numerator(v).str();
  if (denominator(v) != 1) {
    out += '/';
    out += denominator(v).str();
  }
  return out;
}

// Shortest round-trip decimal text for a double ("inf"/"nan" spelled out).
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// count >= 2 equally spaced values from lo to hi, endpoints included, exact.
inline std::vector<Rational> linspace(const Rational& lo, const Rational& hi,
                                      std::size_t count) {
  std::vector<Rational> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  Rational span = hi - lo;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(lo + span * Rational(static_cast<long>(i),
                                       static_cast<long>(count - 1)));
  return out;
}

inline Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline RationalVector mat_vec(const RationalMatrix& m, const RationalVector& x) {
  RationalVector out;
  out.reserve(m.size());
  for (const auto& row : m) out.push_back(dot(row, x));
  return out;
}

inline double euclidean_norm(const RationalVector& v) {
  double acc = 0;
  for (const auto& c : v) {
    double d = to_double(c);
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace bsilp
