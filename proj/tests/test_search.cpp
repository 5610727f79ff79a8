#include <gtest/gtest.h>

#include "chainsmith/constructors.hpp"
#include "chainsmith/search.hpp"

using namespace chainsmith;

namespace {

std::vector<BigInt> trace_of(const Program& p) { return evaluate(p).trace.values; }

void expect_sound(const SearchResult& r) {
  EXPECT_EQ(evaluate(r.witness).value, r.target);
  EXPECT_EQ(r.witness.length(), r.length);
  if (r.model == Model::Amc) {
    EXPECT_FALSE(r.witness.has_subtraction());
  }
}

}  // namespace

TEST(LowerBound, Examples) {
  EXPECT_EQ(lower_bound(BigInt{2}), 1u);
  EXPECT_EQ(lower_bound(BigInt{3}), 2u);
  EXPECT_EQ(lower_bound(BigInt{4}), 2u);
  EXPECT_EQ(lower_bound(BigInt{5}), 3u);
  EXPECT_EQ(lower_bound(BigInt{65536}), 5u);
  EXPECT_EQ(lower_bound(BigInt{65537}), 6u);
  EXPECT_EQ(lower_bound(BigInt{255}), 4u);
  EXPECT_THROW(lower_bound(BigInt{1}), DomainError);
}

TEST(LowerBound, NoProgramBeatsItsGrowth) {
  // A length-l program never exceeds 2^(2^(l-1)), so z > 2^(2^(l-1)) needs more.
  for (std::size_t l = 1; l <= 7; ++l) {
    BigInt top = pow2(std::size_t{1} << (l - 1));
    EXPECT_LE(lower_bound(top), l);
    EXPECT_GT(lower_bound(top + 1), l);
  }
}

TEST(Tau, Examples) {
  auto one = tau(BigInt{1});
  EXPECT_EQ(one.length, 0u);
  EXPECT_TRUE(one.witness.empty());
  EXPECT_TRUE(one.proven_optimal);

  auto r15 = tau(BigInt{15});
  EXPECT_EQ(r15.length, 4u);
  EXPECT_TRUE(r15.proven_optimal);
  expect_sound(r15);

  auto r255 = tau(BigInt{255});
  EXPECT_EQ(r255.length, 5u);
  EXPECT_TRUE(r255.proven_optimal);
  EXPECT_EQ(r255.refuted_below, 5u);
  expect_sound(r255);
}

TEST(TauPlus, Examples) {
  auto r15 = tau_plus(BigInt{15});
  EXPECT_EQ(r15.length, 4u);
  EXPECT_EQ(trace_of(r15.witness), (std::vector<BigInt>{1, 2, 3, 5, 15}));
  expect_sound(r15);

  auto r256 = tau_plus(BigInt{256});
  EXPECT_EQ(r256.length, 4u);
  EXPECT_EQ(trace_of(r256.witness), (std::vector<BigInt>{1, 2, 4, 16, 256}));

  auto r255 = tau_plus(BigInt{255});
  EXPECT_TRUE(r255.proven_optimal);
  EXPECT_EQ(r255.length, 6u);
  expect_sound(r255);
}

TEST(Search, Model) {
  SearchOptions o;
  o.model = Model::Amc;
  auto r = shortest_chain(BigInt{7}, o);
  EXPECT_EQ(r.model, Model::Amc);
  expect_sound(r);
  // 7 = 8 - 1 is one step shorter with subtraction
  EXPECT_EQ(tau(BigInt{7}).length, 4u);
  EXPECT_EQ(r.length, 4u);
  EXPECT_EQ(tau(BigInt{63}).length, 5u);
}

TEST(Search, LargeTargets) {
  auto r = tau(BigInt{65535});
  EXPECT_EQ(r.length, 6u);
  expect_sound(r);
  BigInt z = pow2(100) + 1;
  auto q = tau_plus(z);
  expect_sound(q);
  EXPECT_LE(q.length, 10u);
}

TEST(Search, RejectsBadTargets) {
  EXPECT_THROW(tau(BigInt{0}), DomainError);
  EXPECT_THROW(tau(pow2(130)), DomainError);
  SearchOptions o;
  o.max_length = 9;
  EXPECT_THROW(shortest_chain(BigInt{5}, o), DomainError);
}

TEST(Search, CapReachedFallsBackToBrauer) {
  SearchOptions o;
  o.model = Model::Slp;
  o.max_length = 3;
  auto r = shortest_chain(BigInt{255}, o);
  EXPECT_FALSE(r.proven_optimal);
  EXPECT_EQ(r.status, SearchStatus::CapReached);
  EXPECT_EQ(r.refuted_below, 4u);
  expect_sound(r);
}

TEST(Search, BudgetExhaustion) {
  SearchOptions o;
  o.model = Model::Slp;
  o.budget_nodes = 2048;
  auto r = shortest_chain(BigInt{1000003}, o);
  EXPECT_EQ(r.status, SearchStatus::BudgetExhausted);
  EXPECT_FALSE(r.proven_optimal);
  expect_sound(r);
}

TEST(Search, DeterministicAcrossWorkerCounts) {
  for (int z : {255, 997, 4095, 12345}) {
    for (Model m : {Model::Slp, Model::Amc}) {
      SearchOptions o;
      o.model = m;
      auto base = shortest_chain(BigInt{z}, o);
      for (unsigned w : {2u, 4u, 7u}) {
        o.workers = w;
        auto r = shortest_chain(BigInt{z}, o);
        EXPECT_EQ(r.witness, base.witness) << z << " workers=" << w;
        EXPECT_EQ(r.nodes_expanded, base.nodes_expanded);
        EXPECT_EQ(r.dedup_hits, base.dedup_hits);
      }
    }
  }
}

TEST(Search, DedupCapacityDoesNotChangeResults) {
  for (int z = 2; z <= 300; z += 7) {
    SearchOptions a, b;
    b.dedup_capacity = 4;
    auto ra = tau(BigInt{z}, a), rb = tau(BigInt{z}, b);
    EXPECT_EQ(ra.length, rb.length) << z;
    EXPECT_EQ(ra.witness, rb.witness) << z;
  }
}

TEST(Enumerate, Examples) {
  auto t = enumerate_values(2, Model::Slp);
  std::map<Word, std::size_t> want{{1, 0}, {2, 1}, {3, 2}, {4, 2}};
  EXPECT_EQ(t.shortest, want);
  EXPECT_EQ(t.new_per_length, (std::vector<std::size_t>{1, 1, 2}));

  auto a = enumerate_values(1, Model::Amc);
  EXPECT_EQ(a.shortest, (std::map<Word, std::size_t>{{1, 0}, {2, 1}}));
}

TEST(Enumerate, GoldenCounts) {
  auto s = enumerate_values(5, Model::Slp);
  EXPECT_EQ(s.new_per_length, (std::vector<std::size_t>{1, 1, 2, 5, 17, 76}));
  EXPECT_EQ(s.shortest.size(), 102u);
  EXPECT_FALSE(s.truncated);
  auto a = enumerate_values(6, Model::Amc);
  EXPECT_EQ(a.new_per_length, (std::vector<std::size_t>{1, 1, 2, 5, 16, 63, 331}));
  EXPECT_EQ(a.shortest.size(), 419u);
}

TEST(Enumerate, AgreesWithSearch) {
  auto s = enumerate_values(4, Model::Slp);
  for (auto [v, l] : s.shortest) {
    if (v == 1) continue;
    EXPECT_EQ(tau(to_bigint(v)).length, l) << to_string(v);
  }
  auto a = enumerate_values(5, Model::Amc);
  for (auto [v, l] : a.shortest) {
    if (v == 1) continue;
    EXPECT_EQ(tau_plus(to_bigint(v)).length, l) << to_string(v);
  }
}

TEST(Enumerate, CapsAndTruncation) {
  EXPECT_THROW(enumerate_values(6, Model::Slp), DomainError);
  EXPECT_THROW(enumerate_values(7, Model::Amc), DomainError);
  EnumerationLimits tiny;
  tiny.state_capacity = 3;
  auto t = enumerate_values(4, Model::Slp, tiny);
  EXPECT_TRUE(t.truncated);
}

TEST(Irredundant, GoldenCounts) {
  std::vector<std::size_t> want{1, 3, 15, 109, 1071, 13491, 209371};
  for (std::size_t len = 1; len <= want.size(); ++len) {
    std::size_t n = 0;
    for_each_irredundant_amc(len, {}, [&](const auto&, const auto&) { ++n; });
    EXPECT_EQ(n, want[len - 1]) << len;
  }
}

TEST(Irredundant, EveryVisitIsIrredundant) {
  for (std::size_t len = 1; len <= 5; ++len) {
    for_each_irredundant_amc(len, {}, [&](const std::vector<Step>& steps, const std::vector<Word>& vals) {
      Program p{steps};
      auto c = classify(p);
      ASSERT_EQ(c.irredundant, true) << format_chain(p);
      ASSERT_EQ(to_bigint(vals.back()), evaluate(p).value);
    });
  }
}

TEST(Irredundant, FiltersAndLimits) {
  std::size_t n = 0;
  IrredundantFilter f;
  f.target = 15;
  for_each_irredundant_amc(4, f, [&](const std::vector<Step>& steps, const auto&) {
    ++n;
    EXPECT_EQ(evaluate(Program{steps}).value, 15);
  });
  EXPECT_EQ(n, 1u);
  EXPECT_THROW(for_each_irredundant_amc(9, {}, [](const auto&, const auto&) {}), DomainError);
  IrredundantFilter budget;
  budget.node_budget = 10;
  EXPECT_THROW(for_each_irredundant_amc(6, budget, [](const auto&, const auto&) {}), BudgetExhausted);
}
