#pragma once
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "forksim/errors.hpp"

// Fixed-point arithmetic used throughout the simulator.
//
// Two scales:
//   wad — 10^-18, token amounts and prices ("attounits")
//   ray — 10^-27, rates, utilizations and accrual indices
//
// Conventions: multiplication rounds half-up at the result scale,
// division truncates toward zero.

namespace forksim {

using i128 = boost::multiprecision::int128_t;
using i256 = boost::multiprecision::int256_t;

using Timestamp = std::int64_t;

inline const i128 WAD = i128("1000000000000000000");
inline const i128 RAY = i128("1000000000000000000000000000");
inline const i128 WAD_TO_RAY = i128("1000000000");

inline constexpr std::int64_t kSecondsPerYear = 31536000;

// (a*b + den/2) / den for non-negative den; rounds half away from zero.
inline i128 mul_div_half_up(const i128& a, const i128& b, const i128& den) {
  i256 p = i256(a) * i256(b);
  i256 h = i256(den) / 2;
  i256 q = p >= 0 ? (p + h) / i256(den) : (p - h) / i256(den);
  return i128(q);
}

// a*b/den truncated toward zero.
inline i128 mul_div_trunc(const i128& a, const i128& b, const i128& den) {
  return i128(i256(a) * i256(b) / i256(den));
}

// a*b/den rounded up (non-negative operands).
inline i128 mul_div_ceil(const i128& a, const i128& b, const i128& den) {
  i256 p = i256(a) * i256(b);
  return i128((p + i256(den) - 1) / i256(den));
}

inline i128 ray_mul(const i128& a, const i128& b) { return mul_div_half_up(a, b, RAY); }
inline i128 ray_div(const i128& a, const i128& b) { return mul_div_trunc(a, RAY, b); }
inline i128 wad_mul(const i128& a, const i128& b) { return mul_div_half_up(a, b, WAD); }
inline i128 wad_div(const i128& a, const i128& b) { return mul_div_trunc(a, WAD, b); }

inline i128 wad_to_ray(const i128& w) { return w * WAD_TO_RAY; }
inline i128 ray_to_wad(const i128& r) {
  // half-up at wad scale
  i128 h = WAD_TO_RAY / 2;
  return r >= 0 ? (r + h) / WAD_TO_RAY : (r - h) / WAD_TO_RAY;
}

// base^n at ray scale, binary exponentiation with half-up rounding per step.
inline i128 ray_pow(i128 base, std::uint64_t n) {
  i128 acc = RAY;
  while (n > 0) {
    if (n & 1) acc = ray_mul(acc, base);
    base = ray_mul(base, base);
    n >>= 1;
  }
  return acc;
}

// Parses a non-exponent decimal string ("-12.0345") into an integer at
// 10^scale. Digits beyond the scale are rejected rather than rounded.
inline i128 parse_fixed(const std::string& s, int scale) {
  if (s.empty()) throw SimError(Err::MalformedRow, "empty decimal");
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  i128 v = 0;
  bool any = false;
  for (; i < s.size() && s[i] != '.'; ++i) {
    if (s[i] < '0' || s[i] > '9') throw SimError(Err::MalformedRow, "bad decimal: " + s);
    v = v * 10 + (s[i] - '0');
    any = true;
  }
  int frac = 0;
  if (i < s.size() && s[i] == '.') {
    for (++i; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw SimError(Err::MalformedRow, "bad decimal: " + s);
      if (frac == scale) {
        if (s[i] != '0') throw SimError(Err::MalformedRow, "too many fractional digits: " + s);
        continue;
      }
      v = v * 10 + (s[i] - '0');
      ++frac;
      any = true;
    }
  }
  if (!any) throw SimError(Err::MalformedRow, "bad decimal: " + s);
  for (; frac < scale; ++frac) v *= 10;
  return neg ? -v : v;
}

inline i128 parse_wad(const std::string& s) { return parse_fixed(s, 18); }
inline i128 parse_ray(const std::string& s) { return parse_fixed(s, 27); }

// Renders an integer at 10^scale as a decimal string, trailing zeros trimmed.
inline std::string format_fixed(i128 v, int scale) {
  bool neg = v < 0;
  if (neg) v = -v;
  i128 unit = 1;
  for (int k = 0; k < scale; ++k) unit *= 10;
  i128 whole = v / unit;
  i128 frac = v % unit;
  std::string out = (neg ? "-" : "") + whole.str();
  if (frac != 0) {
    std::string f = frac.str();
    f.insert(f.begin(), static_cast<std::size_t>(scale) - f.size(), '0');
    while (!f.empty() && f.back() == '0') f.pop_back();
    out += "." + f;
  }
  return out;
}

inline std::string format_wad(const i128& v) { return format_fixed(v, 18); }
inline std::string format_ray(const i128& v) { return format_fixed(v, 27); }

inline double to_double(const i128& v, const i128& scale) {
  return static_cast<double>(v) / static_cast<double>(scale);
}

}  // namespace forksim
