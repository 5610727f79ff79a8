#pragma once

// Structural checks on addition-multiplication chains: alpha-factor
// decomposition, extremal values by operation counts, addition-count tables,
// the counting census and the SLP/AMC gap on 2^(2^n) - 1.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "chainsmith/bigint.hpp"
#include "chainsmith/constructors.hpp"
#include "chainsmith/error.hpp"
#include "chainsmith/program.hpp"
#include "chainsmith/search.hpp"

namespace chainsmith {

// ---------------------------------------------------------------------------
// Alpha decomposition
//
// Between the k-th and (k+1)-th addition every register of an AMC equals
// prod_{i<=k} alpha_i^e_i. At an addition b + c the common part
// prod alpha_i^min(b_i, c_i) is pulled out and the cofactor sum becomes the
// next alpha.

struct AlphaDecomposition {
  std::vector<BigInt> alphas;
  std::vector<std::size_t> addition_positions;         // registers defined by additions
  std::vector<std::vector<std::size_t>> exponents;     // per register, one entry per alpha
  std::optional<std::size_t> c_exponent;               // alpha_2 = 2^c + 1

  const std::vector<std::size_t>& final_exponents() const { return exponents.back(); }
};

namespace detail {

inline BigInt alpha_product(const std::vector<BigInt>& alphas, const std::vector<std::size_t>& e) {
  BigInt r = 1;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] != 0) r *= boost::multiprecision::pow(alphas[i], static_cast<unsigned>(e[i]));
  }
  return r;
}

}  // namespace detail

inline AlphaDecomposition alpha_decompose(const Program& p) {
  if (p.has_subtraction()) throw DomainError("alpha decomposition needs an AMC (no subtraction)");
  const auto trace = evaluate(p).trace.values;

  AlphaDecomposition d;
  std::vector<std::vector<std::size_t>> exps{{}};
  for (std::size_t r = 1; r <= p.length(); ++r) {
    const Step& s = p[r - 1];
    auto b = exps[s.lhs], c = exps[s.rhs];
    const std::size_t k = d.alphas.size();
    b.resize(k, 0);
    c.resize(k, 0);
    std::vector<std::size_t> e(k, 0);
    if (s.op == Op::Mul) {
      for (std::size_t i = 0; i < k; ++i) e[i] = b[i] + c[i];
    } else {
      std::vector<std::size_t> f(k), f2(k);
      for (std::size_t i = 0; i < k; ++i) {
        e[i] = std::min(b[i], c[i]);
        f[i] = b[i] - e[i];
        f2[i] = c[i] - e[i];
      }
      d.alphas.push_back(detail::alpha_product(d.alphas, f) + detail::alpha_product(d.alphas, f2));
      d.addition_positions.push_back(r);
      e.push_back(1);
    }
    exps.push_back(std::move(e));
  }

  const std::size_t k = d.alphas.size();
  for (std::size_t r = 0; r < exps.size(); ++r) {
    exps[r].resize(k, 0);
    if (detail::alpha_product(d.alphas, exps[r]) != trace[r]) {
      throw VerificationError("alpha decomposition mismatch at register " + std::to_string(r));
    }
  }
  d.exponents = std::move(exps);

  if (k >= 1 && d.alphas[0] != 2) throw VerificationError("first alpha is not 2");
  if (k >= 2) {
    BigInt t = d.alphas[1] - 1;
    std::size_t c = bit_length(t) - 1;
    if (t <= 0 || t != pow2(c)) throw VerificationError("second alpha is not 2^c + 1");
    d.c_exponent = c;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Operand / operation manipulations on chains

/// Copy of `p` with operand `which` (0 = lhs, 1 = rhs) of step `index`
/// (0-based) incremented. The step must stay valid.
inline Program increment_operand(const Program& p, std::size_t index, int which) {
  std::vector<Step> s(p.steps().begin(), p.steps().end());
  (which == 0 ? s.at(index).lhs : s.at(index).rhs) += 1;
  return Program(std::move(s));
}

/// Copy of `p` with the operation types of steps `index` and `index + 1` swapped.
inline Program swap_operations(const Program& p, std::size_t index) {
  std::vector<Step> s(p.steps().begin(), p.steps().end());
  std::swap(s.at(index).op, s.at(index + 1).op);
  return Program(std::move(s));
}

/// Every step reads the previous register twice.
inline Program maximum_indices_chain(const std::vector<Op>& ops) {
  Program p;
  for (std::size_t i = 0; i < ops.size(); ++i) p.append(ops[i], i, i);
  return p;
}

// ---------------------------------------------------------------------------
// Extremal survey

inline constexpr std::size_t kDefaultExtremalCap = 6;

struct ExtremalCandidate {
  std::string exponent;        // formula for the exponent of 2
  bool applicable = false;     // the manipulation yields an irredundant chain
  std::optional<BigInt> value;
};

struct ExtremalReport {
  std::size_t additions = 0;
  std::size_t multiplications = 0;
  std::size_t programs = 0;
  std::optional<BigInt> max_value;
  std::optional<Program> max_witness;
  std::optional<BigInt> second_value;
  std::optional<Program> second_witness;
  BigInt predicted_max;  // 2^(a * 2^m)
  bool max_matches = false;
  // log2 of the enumerated second-largest value
  std::optional<double> second_exponent;
  // Re-derived from the three one-step manipulations of the maximal chain:
  // (a - 2 + log2 3) * 2^m, 3a * 2^(m-2), (2a - 1) * 2^(m-1).
  std::vector<ExtremalCandidate> candidates;
  std::optional<BigInt> rederived_second;
  bool second_matches_rederived = false;
  // The first term as printed, log3 * (a - 2) * 2^m, i.e. 3^((a-2) * 2^m).
  ExtremalCandidate printed_first_term;
  std::optional<BigInt> printed_second;
  bool second_matches_printed = false;
};

inline ExtremalReport extremal_survey(std::size_t a, std::size_t m, std::size_t cap = kDefaultExtremalCap) {
  if (a < 1) throw DomainError("extremal survey needs at least one addition");
  if (a + m > cap) {
    throw DomainError("a + m = " + std::to_string(a + m) + " exceeds cap " + std::to_string(cap));
  }
  ExtremalReport rep;
  rep.additions = a;
  rep.multiplications = m;
  rep.predicted_max = pow2(a << m);

  std::optional<Word> best, second;
  std::vector<Step> best_steps, second_steps;
  IrredundantFilter filter;
  filter.additions = a;
  filter.multiplications = m;
  for_each_irredundant_amc(a + m, filter, [&](const std::vector<Step>& steps, const std::vector<Word>& vals) {
    ++rep.programs;
    Word v = vals.back();
    if (!best || v > *best) {
      if (best) {
        second = best;
        second_steps = best_steps;
      }
      best = v;
      best_steps = steps;
    } else if (v != *best && (!second || v > *second)) {
      second = v;
      second_steps = steps;
    }
  });

  if (best) {
    rep.max_witness = Program(best_steps);
    rep.max_value = evaluate(*rep.max_witness).value;
  }
  if (second) {
    rep.second_witness = Program(second_steps);
    rep.second_value = evaluate(*rep.second_witness).value;
    rep.second_exponent = std::log2(static_cast<double>(*rep.second_value));
  }
  rep.max_matches = rep.max_value && *rep.max_value == rep.predicted_max;

  const std::size_t two_m = std::size_t{1} << m;
  ExtremalCandidate c1{"(a-2+log2(3))*2^m", a >= 2, std::nullopt};
  if (c1.applicable) {
    c1.value = pow2((a - 2) * two_m) * boost::multiprecision::pow(BigInt{3}, static_cast<unsigned>(two_m));
  }
  ExtremalCandidate c2{"3a*2^(m-2)", m >= 2, std::nullopt};
  if (c2.applicable) c2.value = pow2(3 * a * (two_m / 4));
  ExtremalCandidate c3{"(2a-1)*2^(m-1)", a >= 2 && m >= 1, std::nullopt};
  if (c3.applicable) c3.value = pow2((2 * a - 1) * (two_m / 2));
  rep.candidates = {c1, c2, c3};

  rep.printed_first_term = {"log3*(a-2)*2^m", a >= 2, std::nullopt};
  if (a >= 2) {
    rep.printed_first_term.value =
        boost::multiprecision::pow(BigInt{3}, static_cast<unsigned>((a - 2) * two_m));
  }

  auto take_max = [](std::optional<BigInt>& acc, const ExtremalCandidate& c) {
    if (c.applicable && c.value && (!acc || *c.value > *acc)) acc = c.value;
  };
  for (const auto& c : rep.candidates) take_max(rep.rederived_second, c);
  take_max(rep.printed_second, rep.printed_first_term);
  take_max(rep.printed_second, c2);
  take_max(rep.printed_second, c3);

  rep.second_matches_rederived = rep.second_value == rep.rederived_second;
  rep.second_matches_printed = rep.second_value == rep.printed_second;
  return rep;
}

// ---------------------------------------------------------------------------
// Addition counts

struct AdditionCountRow {
  std::size_t length = 0;
  std::size_t min_additions = 0;
  std::size_t witnesses = 0;  // irredundant AMCs of this length computing z
  Program witness;            // first witness with min_additions
};

struct AdditionCountReport {
  BigInt target;
  std::size_t max_len = 0;
  std::vector<AdditionCountRow> rows;
  bool partial = false;  // a node budget cut the table short
};

/// For each length up to max_len at which some irredundant AMC computes z,
/// the fewest additions among those chains.
inline AdditionCountReport addition_count_report(const BigInt& z, std::size_t max_len,
                                                 std::uint64_t node_budget = 0) {
  if (z < 1) throw DomainError("target must be >= 1");
  if (max_len > kMaxIrredundantLength) {
    throw DomainError("addition report is capped at length " + std::to_string(kMaxIrredundantLength));
  }
  if (!fits_word(z) || z == BigInt{to_bigint(kWordMax)}) throw DomainError("target exceeds 128 bits");
  AdditionCountReport rep;
  rep.target = z;
  rep.max_len = max_len;
  IrredundantFilter filter;
  filter.target = to_word(z);
  filter.node_budget = node_budget;
  for (std::size_t len = 1; len <= max_len; ++len) {
    AdditionCountRow row;
    row.length = len;
    std::optional<std::size_t> best;
    try {
      for_each_irredundant_amc(len, filter, [&](const std::vector<Step>& steps, const std::vector<Word>&) {
        ++row.witnesses;
        std::size_t adds = std::count_if(steps.begin(), steps.end(), [](const Step& s) { return s.op == Op::Add; });
        if (!best || adds < *best) {
          best = adds;
          row.witness = Program(steps);
        }
      });
    } catch (const BudgetExhausted&) {
      rep.partial = true;
      break;
    }
    if (best) {
      row.min_additions = *best;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Census

struct CensusReport {
  std::size_t n_bits = 0;
  std::size_t max_len = 0;
  BigInt computable_count;
  BigInt total;  // 2^n
  Rational fraction;
  std::vector<std::size_t> in_range_per_length;  // window values first reached at l
  std::vector<std::size_t> new_per_length;       // all values first reached at l
  std::vector<std::size_t> cumulative_per_length;
  std::vector<BigInt> lemma_bound;               // l^(3l) = 2^(3 l log2 l)
  bool bound_holds = true;
  bool lower_bound_only = false;
};

/// l^(3l), i.e. 2^(3 l log2 l), exactly.
inline BigInt counting_bound(std::size_t l) {
  return boost::multiprecision::pow(BigInt{l}, static_cast<unsigned>(3 * l));
}

inline CensusReport census(std::size_t n_bits, std::size_t max_len, const EnumerationLimits& limits = {}) {
  if (n_bits > 120) throw DomainError("census window exceeds 120 bits");
  ValueTable table = enumerate_values(max_len, Model::Slp, limits);
  CensusReport rep;
  rep.n_bits = n_bits;
  rep.max_len = max_len;
  rep.total = pow2(n_bits);
  rep.lower_bound_only = table.truncated;
  rep.in_range_per_length.assign(max_len + 1, 0);
  const Word lo = Word{1} << n_bits, hi = Word{1} << (n_bits + 1);
  std::size_t in_range = 0;
  for (const auto& [v, l] : table.shortest) {
    if (v >= lo && v < hi) {
      ++in_range;
      ++rep.in_range_per_length[l];
    }
  }
  rep.computable_count = in_range;
  rep.fraction = Rational(rep.computable_count, rep.total);
  rep.new_per_length = table.new_per_length;
  std::size_t cum = 0;
  for (std::size_t l = 0; l <= max_len; ++l) {
    cum += table.new_per_length[l];
    rep.cumulative_per_length.push_back(cum);
    rep.lemma_bound.push_back(counting_bound(l));
    if (l >= 2 && BigInt{cum} > rep.lemma_bound.back()) rep.bound_holds = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Gap report for 2^(2^n) - 1

inline constexpr std::size_t kDefaultGapMaxN = 3;
inline constexpr std::size_t kDeepGapMaxN = 4;

struct GapOptions {
  bool deep = false;
  double time_limit_seconds = 0;
  unsigned workers = 1;
};

struct GapReport {
  std::size_t n = 0;
  BigInt target;
  SearchResult tau;
  SearchResult tau_plus;
  std::size_t tower_length = 0;   // n + 2
  std::size_t fermat_length = 0;  // <= 2n
  long long gap = 0;              // tau_plus - tau
  std::optional<std::size_t> min_additions_among_optimal_amcs;
  std::size_t optimal_amc_count = 0;
  bool tau_plus_at_least_n_plus_3 = false;  // reported, never asserted
};

inline GapReport gap_report(std::size_t n, const GapOptions& opts = {}) {
  const std::size_t limit = opts.deep ? kDeepGapMaxN : kDefaultGapMaxN;
  if (n < 1 || n > limit) {
    throw DomainError("gap report supports 1 <= n <= " + std::to_string(limit) +
                      (opts.deep ? "" : " (use --deep for n = 4)"));
  }
  GapReport rep;
  rep.n = n;
  rep.target = pow2(std::size_t{1} << n) - 1;

  Program tower = tower_slp(n);
  Program fermat = fermat_amc(n);
  if (evaluate(tower).value != rep.target || tower.length() != n + 2) {
    throw VerificationError("tower construction does not compute the target in n + 2 steps");
  }
  if (evaluate(fermat).value != rep.target || fermat.length() > 2 * n || fermat.has_subtraction()) {
    throw VerificationError("Fermat AMC does not compute the target within 2n steps");
  }
  rep.tower_length = tower.length();
  rep.fermat_length = fermat.length();

  SearchOptions so;
  so.time_limit_seconds = opts.time_limit_seconds;
  so.workers = opts.workers;
  rep.tau = tau(rep.target, so);
  rep.tau_plus = tau_plus(rep.target, so);
  if (rep.tau.status == SearchStatus::BudgetExhausted || rep.tau_plus.status == SearchStatus::BudgetExhausted) {
    throw BudgetExhausted("gap search ran out of budget");
  }
  if (rep.tau.length > n + 2) throw VerificationError("tau exceeds the tower bound n + 2");
  if (rep.tau_plus.length > 2 * n) throw VerificationError("tau+ exceeds the Fermat bound 2n");

  rep.gap = static_cast<long long>(rep.tau_plus.length) - static_cast<long long>(rep.tau.length);
  rep.tau_plus_at_least_n_plus_3 = rep.tau_plus.length >= n + 3;

  if (rep.tau_plus.proven_optimal && rep.tau_plus.length <= kMaxIrredundantLength) {
    auto adds = addition_count_report(rep.target, rep.tau_plus.length);
    for (const auto& row : adds.rows) {
      if (row.length == rep.tau_plus.length) {
        rep.min_additions_among_optimal_amcs = row.min_additions;
        rep.optimal_amc_count = row.witnesses;
      }
    }
  }
  return rep;
}

}  // namespace chainsmith
