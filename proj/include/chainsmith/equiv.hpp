#pragma once

// Equality testing for straight-line programs.
//
// Two programs computing A and B are compared modulo random primes p drawn
// from [2^61, 2^62). If A != B, a false "equal" needs p | (A - B). A nonzero
// difference of programs of lengths l, l' has fewer than
// 2^(l-1) + 2^(l'-1) + 1 bits, so at most D = floor(bits / 61) + 1 window
// primes divide it, and one round errs with probability at most D / W where
// W is a lower bound on the number of primes in the window.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>

#include "chainsmith/bigint.hpp"
#include "chainsmith/error.hpp"
#include "chainsmith/program.hpp"

namespace chainsmith {

// pi(2^62) - pi(2^61) >= 2^62/ln(2^62) * (1 + 1/ln(2^62))
//                       - 2^61/ln(2^61) * (1 + 1.2762/ln(2^61))
//                       = 53626708834327006.8...
// using Dusart's bounds (both valid for x >= 599). Rounded down.
inline constexpr std::uint64_t kWindowPrimeCountLowerBound = 53'000'000'000'000'000ULL;
inline constexpr std::uint64_t kWindowLow = std::uint64_t{1} << 61;
inline constexpr std::uint64_t kWindowHigh = std::uint64_t{1} << 62;  // exclusive
inline constexpr unsigned kWindowPrimeBits = 61;
inline constexpr unsigned kDefaultRounds = 20;
inline constexpr std::size_t kMaxPrimeDraws = 100000;

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

/// Deterministic Miller-Rabin for all 64-bit n.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::array<std::uint64_t, 12> small{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t p : small) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : small) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform prime from the window by rejection over odd candidates.
inline std::uint64_t sample_window_prime(std::mt19937_64& rng) {
  for (std::size_t i = 0; i < kMaxPrimeDraws; ++i) {
    std::uint64_t c = (rng() & (kWindowLow - 1)) | kWindowLow | 1;
    if (is_prime_u64(c)) return c;
  }
  throw DomainError("no prime found in the sampling window after bounded retries");
}

/// Independent generator for one round, derived from (seed, round).
inline std::mt19937_64 round_rng(std::uint64_t seed, std::size_t round) {
  std::uint64_t s = seed ^ (0xd1b54a32d192ed03ULL * (round + 1));
  return std::mt19937_64(splitmix64(s));
}

/// Upper bound on the number of window primes dividing a nonzero difference.
inline BigInt max_window_divisors(std::size_t len_p, std::size_t len_q) {
  auto half_pow = [](std::size_t l) { return l == 0 ? BigInt{0} : pow2(l - 1); };
  BigInt bits = half_pow(len_p) + half_pow(len_q) + 1;
  return bits / kWindowPrimeBits + 1;
}

/// (D / W)^rounds, capped at 1.
inline Rational error_bound(std::size_t len_p, std::size_t len_q, unsigned rounds) {
  if (rounds < 1) throw DomainError("rounds must be >= 1");
  Rational single(max_window_divisors(len_p, len_q), BigInt{kWindowPrimeCountLowerBound});
  if (single >= 1) return Rational{1};
  Rational r{1};
  for (unsigned i = 0; i < rounds; ++i) r *= single;
  return r;
}

inline Rational error_bound(const Program& p, const Program& q, unsigned rounds) {
  return error_bound(p.length(), q.length(), rounds);
}

enum class Verdict : std::uint8_t { Equal, NotEqual };

struct EqualityVerdict {
  Verdict verdict = Verdict::Equal;
  unsigned rounds_used = 0;
  Rational error_bound{0};
  // Present iff NotEqual.
  std::optional<std::uint64_t> witness_modulus;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> residues;
};

/// One-sided randomized test: NotEqual always comes with a prime on which the
/// residues differ; Equal comes with its error bound.
inline EqualityVerdict equal_probabilistic(const Program& p, const Program& q, unsigned rounds,
                                           std::uint64_t seed) {
  if (rounds < 1) throw DomainError("rounds must be >= 1");
  EqualityVerdict v;
  if (p == q) return v;  // identical steps: exact, zero error
  for (unsigned r = 0; r < rounds; ++r) {
    auto rng = round_rng(seed, r);
    std::uint64_t prime = sample_window_prime(rng);
    std::uint64_t rp = evaluate_mod(p, prime), rq = evaluate_mod(q, prime);
    v.rounds_used = r + 1;
    if (rp != rq) {
      v.verdict = Verdict::NotEqual;
      v.witness_modulus = prime;
      v.residues = std::make_pair(rp, rq);
      return v;
    }
  }
  v.error_bound = error_bound(p, q, rounds);
  return v;
}

/// Re-checks a NotEqual certificate.
inline bool certificate_holds(const Program& p, const Program& q, const EqualityVerdict& v) {
  if (v.verdict != Verdict::NotEqual || !v.witness_modulus || !v.residues) return false;
  std::uint64_t m = *v.witness_modulus;
  if (!is_prime_u64(m)) return false;
  std::uint64_t rp = evaluate_mod(p, m), rq = evaluate_mod(q, m);
  return rp != rq && rp == v.residues->first && rq == v.residues->second;
}

inline constexpr std::size_t kDefaultExactLengthCap = 64;
inline constexpr std::size_t kDefaultExactBitCap = std::size_t{1} << 26;

/// Exact comparison. Refuses programs longer than `length_cap` or whose
/// registers could exceed `bit_cap` bits; callers fall back to the
/// probabilistic test.
inline bool equal_exact(const Program& p, const Program& q, std::size_t length_cap = kDefaultExactLengthCap,
                        std::size_t bit_cap = kDefaultExactBitCap) {
  if (p.length() > length_cap || q.length() > length_cap) {
    throw DomainError("exact comparison capped at length " + std::to_string(length_cap));
  }
  if (bit_size_bound(p) > bit_cap || bit_size_bound(q) > bit_cap) {
    throw DomainError("exact comparison capped at " + std::to_string(bit_cap) + " bits");
  }
  return evaluate(p).value == evaluate(q).value;
}

}  // namespace chainsmith
