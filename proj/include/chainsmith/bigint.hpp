#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "chainsmith/error.hpp"

namespace chainsmith {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Native word used by the search engines. Desk-scale chains never need more.
using Word = unsigned __int128;

inline constexpr Word kWordMax = ~Word{0};

inline std::size_t bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return static_cast<std::size_t>(boost::multiprecision::msb(abs(v))) + 1;
}

inline BigInt pow2(std::size_t e) {
  BigInt r = 1;
  r <<= e;
  return r;
}

inline BigInt to_bigint(Word w) {
  BigInt r = static_cast<std::uint64_t>(w >> 64);
  r <<= 64;
  r |= static_cast<std::uint64_t>(w);
  return r;
}

inline bool fits_word(const BigInt& v) { return v >= 0 && bit_length(v) <= 128; }

inline Word to_word(const BigInt& v) {
  if (!fits_word(v)) throw std::out_of_range("value does not fit in 128 bits");
  const BigInt mask64 = (BigInt{1} << 64) - 1;
  auto lo = static_cast<std::uint64_t>(v & mask64);
  auto hi = static_cast<std::uint64_t>(v >> 64);
  return (Word{hi} << 64) | lo;
}

inline std::string to_string(Word w) {
  if (w == 0) return "0";
  std::string s;
  while (w != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(w % 10)));
    w /= 10;
  }
  return {s.rbegin(), s.rend()};
}

inline std::string to_string(const BigInt& v) { return v.str(); }

inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Parses a nonnegative or negative decimal integer; rejects anything else.
inline BigInt parse_bigint(std::string_view text) {
  std::size_t i = 0;
  bool neg = false;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
    neg = text[0] == '-';
    i = 1;
  }
  if (i >= text.size()) throw DomainError("empty integer literal");
  BigInt r = 0;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c < '0' || c > '9') {
      throw DomainError("invalid integer literal '" + std::string(text) + "'");
    }
    r = r * 10 + (c - '0');
  }
  return neg ? BigInt{-r} : r;
}

// Saturating helpers for the 128-bit engines.
inline Word sat_mul(Word a, Word b) {
  Word r;
  if (__builtin_mul_overflow(a, b, &r)) return kWordMax;
  return r;
}

inline Word sat_add(Word a, Word b) {
  Word r;
  if (__builtin_add_overflow(a, b, &r)) return kWordMax;
  return r;
}

/// base^(2^times), saturating at kWordMax.
inline Word sat_repeated_square(Word base, std::size_t times) {
  Word r = base;
  for (std::size_t i = 0; i < times && r != kWordMax; ++i) r = sat_mul(r, r);
  return r;
}

}  // namespace chainsmith
