#pragma once

// Explicit chain constructions: 2^k-ary (Brauer) chains for any target,
// the squaring tower for 2^(2^n) - 1, and the Fermat-product AMC.

#include <cstddef>
#include <optional>
#include <vector>

#include "chainsmith/bigint.hpp"
#include "chainsmith/error.hpp"
#include "chainsmith/program.hpp"

namespace chainsmith {

/// Digit decomposition used by brauer_slp.
/// z = limbs[0] + 2^r * sum_{j=1..m} limbs[j] * (2^k)^(j-1), n + 1 = m*k + r.
struct BrauerPlan {
  std::size_t n = 0;  // bit length of z minus one
  std::size_t k = 1;
  std::size_t m = 0;
  std::size_t r = 0;
  std::vector<BigInt> limbs;  // u_0 .. u_m

  /// (2^k - 1) + 2m
  std::size_t length_bound() const { return ((std::size_t{1} << k) - 1) + 2 * m; }
};

inline constexpr std::size_t kMaxLimbWidth = 24;

/// Smallest k >= 1 with k >= log2(n) - log2(log2(n)), evaluated exactly.
///
/// For k >= 0, 2^k >= n / log2(n) is equivalent to n^(2^k) >= 2^n, which is
/// decided on big integers so no rounding can move the ceiling.
inline std::size_t choose_k(std::size_t n) {
  if (n < 1) throw DomainError("choose_k requires n >= 1");
  if (n <= 2) return 1;  // log2 log2 n <= 0: the formula degenerates
  const BigInt two_to_n = pow2(n);
  for (std::size_t k = 0;; ++k) {
    // n^(2^k) has about 2^k * log2(n) bits; stop squaring once it passes 2^n.
    BigInt lhs = n;
    bool reached = false;
    for (std::size_t i = 0; i < k; ++i) {
      lhs *= lhs;
      if (lhs >= two_to_n) {
        reached = true;
        break;
      }
    }
    if (reached || lhs >= two_to_n) return std::max<std::size_t>(k, 1);
  }
}

inline BrauerPlan make_brauer_plan(const BigInt& z, std::optional<std::size_t> k_override = {}) {
  if (z < 1) throw DomainError("brauer construction requires z >= 1");
  BrauerPlan plan;
  plan.n = bit_length(z) - 1;
  if (k_override) {
    if (*k_override < 1 || *k_override > kMaxLimbWidth) {
      throw DomainError("limb width k must be in [1, " + std::to_string(kMaxLimbWidth) + "]");
    }
    plan.k = *k_override;
  } else {
    plan.k = plan.n >= 1 ? choose_k(plan.n) : 1;
  }
  plan.m = (plan.n + 1) / plan.k;
  plan.r = (plan.n + 1) % plan.k;

  const BigInt low_mask = pow2(plan.r) - 1;
  const BigInt limb_mask = pow2(plan.k) - 1;
  plan.limbs.push_back(z & low_mask);
  BigInt rest = z >> plan.r;
  for (std::size_t j = 1; j <= plan.m; ++j) {
    plan.limbs.push_back(rest & limb_mask);
    rest >>= plan.k;
  }
  return plan;
}

/// 2^k-ary chain for z. The result is an AMC of length at most
/// (2^k - 1) + 2m. Zero limbs skip their addition and r = 0 skips the final
/// shift, so the bound holds with room to spare.
inline std::pair<Program, BrauerPlan> brauer_slp(const BigInt& z,
                                                 std::optional<std::size_t> k_override = {}) {
  BrauerPlan plan = make_brauer_plan(z, k_override);
  Program p;
  if (z == 1) return {p, plan};

  // The constant v in [1, top] lives in register v - 1.
  auto reg_of = [](const BigInt& v) { return static_cast<std::size_t>(v) - 1; };
  const std::size_t pow_k = std::size_t{1} << plan.k;

  // No Horner step needed: z itself is one of the small constants.
  bool single_limb = plan.m == 0 || (plan.m == 1 && plan.r == 0);
  if (single_limb) {
    std::size_t top = static_cast<std::size_t>(z);
    for (std::size_t v = 2; v <= top; ++v) p.append(Op::Add, v - 2, 0);
    return {p, plan};
  }

  for (std::size_t v = 2; v <= pow_k; ++v) p.append(Op::Add, v - 2, 0);
  const std::size_t reg_pow_k = pow_k - 1;

  std::size_t acc = reg_of(plan.limbs[plan.m]);
  for (std::size_t j = plan.m - 1; j >= 1; --j) {
    acc = p.append(Op::Mul, acc, reg_pow_k);
    if (plan.limbs[j] != 0) acc = p.append(Op::Add, acc, reg_of(plan.limbs[j]));
  }
  if (plan.r > 0) {
    acc = p.append(Op::Mul, acc, reg_of(pow2(plan.r)));
    if (plan.limbs[0] != 0) acc = p.append(Op::Add, acc, reg_of(plan.limbs[0]));
  }
  return {p, plan};
}

/// 1+1, then n squarings, then subtract 1: computes 2^(2^n) - 1 in n + 2 steps.
inline Program tower_slp(std::size_t n) {
  if (n < 1) throw DomainError("tower requires n >= 1");
  Program p;
  p.append(Op::Add, 0, 0);
  for (std::size_t i = 1; i <= n; ++i) p.append(Op::Mul, i, i);
  p.append(Op::Sub, n + 1, 0);
  return p;
}

/// AMC for 2^(2^n) - 1 via F_i - 2 = F_{i-1} * (F_{i-1} - 2), length 2n.
///
/// Layout: a_1 = 2, a_2 = 3 = F_0 = F_1 - 2; then per level i >= 2 one
/// addition F_{i-1} = (F_{i-1} - 2) + 2 and one multiplication
/// F_i - 2 = F_{i-1} * (F_{i-1} - 2).
inline Program fermat_amc(std::size_t n) {
  if (n < 1) throw DomainError("fermat-amc requires n >= 1");
  Program p;
  const std::size_t two = p.append(Op::Add, 0, 0);
  std::size_t minus_two = p.append(Op::Add, two, 0);  // F_1 - 2 = 3
  for (std::size_t i = 2; i <= n; ++i) {
    std::size_t fermat = p.append(Op::Add, minus_two, two);
    minus_two = p.append(Op::Mul, fermat, minus_two);
  }
  if (p.length() > 2 * n) throw VerificationError("fermat_amc exceeded length 2n");
  return p;
}

inline constexpr std::size_t kDefaultFermatBitBudget = std::size_t{1} << 20;

/// F_i = 2^(2^i) + 1.
inline BigInt fermat_number(std::size_t i, std::size_t max_bits = kDefaultFermatBitBudget) {
  if (i >= 63 || (std::size_t{1} << i) + 1 > max_bits) {
    throw DomainError("F_" + std::to_string(i) + " exceeds the bit budget of " +
                      std::to_string(max_bits));
  }
  return pow2(std::size_t{1} << i) + 1;
}

}  // namespace chainsmith
