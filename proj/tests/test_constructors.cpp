#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "chainsmith/constructors.hpp"

using namespace chainsmith;

namespace {

// Straight floating-point reading of ceil(log2 n - log2 log2 n), clamped to 1.
std::size_t choose_k_float(std::size_t n) {
  if (n <= 2) return 1;
  double x = std::log2(static_cast<double>(n)) - std::log2(std::log2(static_cast<double>(n)));
  long k = static_cast<long>(std::ceil(x));
  return k < 1 ? 1 : static_cast<std::size_t>(k);
}

BigInt random_bits(std::mt19937_64& rng, std::size_t bits) {
  BigInt z = 0;
  for (std::size_t i = 0; i < bits; i += 64) z = (z << 64) | BigInt(rng());
  z &= pow2(bits) - 1;
  return z | pow2(bits - 1);
}

}  // namespace

TEST(ChooseK, Examples) {
  EXPECT_EQ(choose_k(10), 2u);
  EXPECT_EQ(choose_k(2), 1u);
  EXPECT_EQ(choose_k(1), 1u);
  EXPECT_EQ(choose_k(1024), 7u);
  EXPECT_THROW(choose_k(0), DomainError);
}

TEST(ChooseK, MatchesFloatingPointAwayFromIntegers) {
  for (std::size_t n = 1; n <= 5000; ++n) {
    double x = n <= 2 ? 0 : std::log2(double(n)) - std::log2(std::log2(double(n)));
    if (std::abs(x - std::round(x)) < 1e-9) continue;  // exact ties only the big-int path can settle
    EXPECT_EQ(choose_k(n), choose_k_float(n)) << "n=" << n;
  }
}

TEST(ChooseK, ExactTies) {
  // log2(16) - log2(4) = 2 exactly; log2(256) - log2(8) = 5 exactly.
  EXPECT_EQ(choose_k(16), 2u);
  EXPECT_EQ(choose_k(256), 5u);
  EXPECT_EQ(choose_k(4), 1u);
}

TEST(Brauer, Example2025) {
  auto [p, plan] = brauer_slp(BigInt{2025});
  EXPECT_EQ(plan.n, 10u);
  EXPECT_EQ(plan.k, 2u);
  EXPECT_EQ(plan.m, 5u);
  EXPECT_EQ(plan.r, 1u);
  EXPECT_EQ(plan.length_bound(), 13u);
  EXPECT_LE(p.length(), 13u);
  EXPECT_EQ(evaluate(p).value, 2025);
  EXPECT_FALSE(p.has_subtraction());
}

TEST(Brauer, One) {
  auto [p, plan] = brauer_slp(BigInt{1});
  EXPECT_TRUE(p.empty());
}

TEST(Brauer, PowerOfTwo) {
  BigInt z = pow2(20);
  auto [p, plan] = brauer_slp(z);
  EXPECT_EQ(evaluate(p).value, 1048576);
  EXPECT_LE(p.length(), plan.length_bound());
}

TEST(Brauer, SmallTargetsAllK) {
  for (int z = 1; z <= 600; ++z) {
    for (std::size_t k = 1; k <= 5; ++k) {
      auto [p, plan] = brauer_slp(BigInt{z}, k);
      ASSERT_EQ(evaluate(p).value, z) << z << " k=" << k;
      ASSERT_FALSE(p.has_subtraction());
      if (z > 1) {
        ASSERT_LE(p.length(), plan.length_bound()) << z << " k=" << k;
      }
    }
  }
}

TEST(Brauer, PlanReassembles) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    BigInt z = random_bits(rng, 100);
    auto plan = make_brauer_plan(z);
    BigInt acc = 0;
    for (std::size_t j = plan.m; j >= 1; --j) acc = (acc << plan.k) + plan.limbs[j];
    acc = (acc << plan.r) + plan.limbs[0];
    ASSERT_EQ(acc, z);
    ASSERT_EQ(plan.m * plan.k + plan.r, plan.n + 1);
  }
}

TEST(Brauer, RejectsBadInput) {
  EXPECT_THROW(brauer_slp(BigInt{0}), DomainError);
  EXPECT_THROW(brauer_slp(BigInt{10}, 0), DomainError);
  EXPECT_THROW(brauer_slp(BigInt{10}, 25), DomainError);
}

TEST(Brauer, Random64And256BitTargets) {
  std::mt19937_64 rng(20250101);
  for (std::size_t bits : {64u, 256u}) {
    for (int i = 0; i < 1000; ++i) {
      BigInt z = random_bits(rng, bits);
      auto [p, plan] = brauer_slp(z);
      ASSERT_EQ(evaluate(p).value, z);
      ASSERT_LE(p.length(), plan.length_bound());
      ASSERT_FALSE(p.has_subtraction());
    }
  }
}

TEST(Tower, Examples) {
  EXPECT_EQ(format_chain(tower_slp(2)), "+ 0 0\n* 1 1\n* 2 2\n- 3 0");
  auto e = evaluate(tower_slp(3));
  std::vector<BigInt> want{1, 2, 4, 16, 256, 255};
  EXPECT_EQ(e.trace.values, want);
  Program t6 = tower_slp(6);
  EXPECT_EQ(t6.length(), 8u);
  EXPECT_EQ(evaluate(t6).value, pow2(64) - 1);
  EXPECT_THROW(tower_slp(0), DomainError);
}

TEST(Tower, LengthAndValueUpToSix) {
  for (std::size_t n = 1; n <= 6; ++n) {
    Program p = tower_slp(n);
    EXPECT_EQ(p.length(), n + 2);
    EXPECT_EQ(evaluate(p).value, pow2(std::size_t{1} << n) - 1);
  }
}

TEST(Fermat, Numbers) {
  EXPECT_EQ(fermat_number(0), 3);
  EXPECT_EQ(fermat_number(2), 17);
  EXPECT_EQ(fermat_number(4), 65537);
  EXPECT_THROW(fermat_number(30), DomainError);
  EXPECT_THROW(fermat_number(5, 16), DomainError);
}

TEST(Fermat, AmcExamples) {
  auto e1 = evaluate(fermat_amc(1));
  EXPECT_EQ(e1.trace.values, (std::vector<BigInt>{1, 2, 3}));
  Program p3 = fermat_amc(3);
  EXPECT_EQ(p3.length(), 6u);
  auto e3 = evaluate(p3);
  EXPECT_EQ(e3.value, 255);
  for (int v : {3, 5, 15, 17}) {
    EXPECT_NE(std::find(e3.trace.values.begin(), e3.trace.values.end(), BigInt{v}), e3.trace.values.end()) << v;
  }
  Program p4 = fermat_amc(4);
  EXPECT_LE(p4.length(), 8u);
  EXPECT_EQ(evaluate(p4).value, BigInt{3} * 5 * 17 * 257);
  EXPECT_THROW(fermat_amc(0), DomainError);
}

TEST(Fermat, ProductAndCoprimality) {
  for (std::size_t n = 1; n <= 5; ++n) {
    Program p = fermat_amc(n);
    EXPECT_FALSE(p.has_subtraction());
    EXPECT_LE(p.length(), 2 * n);
    BigInt prod = 1;
    for (std::size_t i = 0; i < n; ++i) prod *= fermat_number(i);
    EXPECT_EQ(evaluate(p).value, prod);
    EXPECT_EQ(prod, pow2(std::size_t{1} << n) - 1);
  }
  for (std::size_t i = 0; i <= 6; ++i) {
    for (std::size_t j = i + 1; j <= 6; ++j) {
      EXPECT_EQ(gcd(fermat_number(i), fermat_number(j)), 1) << i << "," << j;
    }
  }
}
