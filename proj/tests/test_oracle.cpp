#include <functional>

#include <gtest/gtest.h>

#include "chainsmith/search.hpp"
#include "oracle.hpp"

using namespace chainsmith;
using namespace oracle;

TEST(Oracle, SmallLevelsByHand) {
  const auto& o = slp_oracle();
  EXPECT_EQ(o.values_at[1], (std::set<std::int64_t>{0, 1, 2}));
  EXPECT_TRUE(o.values_at[2].count(-1));
  EXPECT_TRUE(o.values_at[2].count(4));
  EXPECT_FALSE(o.values_at[2].count(5));
}

TEST(Oracle, SlpValueSetsMatchEnumeration) {
  for (std::size_t l = 1; l <= 5; ++l) {
    auto want = positive_shortest<Word>(slp_oracle(), l);
    auto got = enumerate_values(l, Model::Slp).shortest;
    EXPECT_EQ(got, want) << "length " << l;
  }
}

TEST(Oracle, AmcValueSetsMatchEnumeration) {
  for (std::size_t l = 1; l <= 6; ++l) {
    auto want = positive_shortest<Word>(amc_oracle(), l);
    auto got = enumerate_values(l, Model::Amc).shortest;
    EXPECT_EQ(got, want) << "length " << l;
  }
}

TEST(Oracle, TauUpTo200) {
  std::map<std::size_t, int> histogram;
  for (std::int64_t z = 1; z <= 200; ++z) {
    auto r = tau(BigInt{z});
    ASSERT_EQ(evaluate(r.witness).value, z);
    ASSERT_EQ(r.witness.length(), r.length);
    auto want = oracle_length(slp_oracle(), z);
    ASSERT_TRUE(want.has_value()) << "z=" << z;
    EXPECT_EQ(r.length, *want) << "z=" << z;
    ++histogram[*want];
  }
  std::map<std::size_t, int> golden{{0, 1}, {1, 1}, {2, 2}, {3, 5}, {4, 16}, {5, 50}, {6, 100}, {7, 25}};
  EXPECT_EQ(histogram, golden);
}

TEST(Oracle, TauPlusUpTo200) {
  for (std::int64_t z = 1; z <= 200; ++z) {
    auto r = tau_plus(BigInt{z});
    ASSERT_EQ(evaluate(r.witness).value, z);
    ASSERT_FALSE(r.witness.has_subtraction());
    auto want = oracle_length(amc_oracle(), z);
    ASSERT_TRUE(want.has_value()) << "z=" << z;
    EXPECT_EQ(r.length, *want) << "z=" << z;
  }
}

TEST(Oracle, LowerBoundAdmissible) {
  // z <= 10^4 outside the oracle's reach needs at least 8 steps, well above
  // lower_bound(10^4) = 5.
  const auto& o = slp_oracle();
  ASSERT_EQ(lower_bound(BigInt{10000}), 5u);
  std::size_t checked = 0;
  for (std::int64_t z = 2; z <= 10000; ++z) {
    if (auto l = oracle_length(o, z)) {
      ASSERT_GE(*l, lower_bound(BigInt{z})) << z;
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000u);
}

namespace {

// Fewest additions over every AMC of exactly `len` steps computing z, by
// plain DFS over programs (no canonical form, no dedup).
std::optional<std::size_t> min_additions_bruteforce(std::int64_t z, std::size_t len) {
  std::vector<std::int64_t> regs{1};
  std::optional<std::size_t> best;
  std::function<void(std::size_t)> rec = [&](std::size_t adds) {
    const std::size_t n = regs.size();
    if (n == len) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (regs[i] + regs[j] == z && (!best || adds + 1 < *best)) best = adds + 1;
          if (regs[i] * regs[j] == z && (!best || adds < *best)) best = adds;
        }
      }
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        regs.push_back(regs[i] + regs[j]);
        rec(adds + 1);
        regs.back() = regs[i] * regs[j];
        rec(adds);
        regs.pop_back();
      }
    }
  };
  rec(0);
  return best;
}

}  // namespace

TEST(Oracle, AdditionFloorForFermatTargets) {
  // n = 2: length 4 is optimal for 15; n = 3: length 6 is optimal for 255.
  EXPECT_FALSE(min_additions_bruteforce(15, 3).has_value());
  EXPECT_EQ(min_additions_bruteforce(15, 4), 3u);
  EXPECT_FALSE(min_additions_bruteforce(255, 5).has_value());
  auto a255 = min_additions_bruteforce(255, 6);
  ASSERT_TRUE(a255.has_value());
  EXPECT_GE(*a255, 3u);
  EXPECT_EQ(*a255, 4u);
}
