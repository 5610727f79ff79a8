#pragma once

// Exact shortest-chain search (tau for SLPs, tau+ for AMCs) and exhaustive
// value enumeration by length.
//
// Search runs iterative deepening from lower_bound(z). At each depth the
// space of canonical programs is explored depth-first:
//   * registers hold strictly positive, pairwise distinct values (SLP), or
//     strictly increasing values (AMC);
//   * commutative steps have lhs >= rhs; a subtraction always takes the
//     larger register minus the smaller;
//   * every register except a_0 must end up as an operand, so a partial
//     program with u unused registers and s steps left needs u <= s + 1;
//   * with maximum M and s steps left the chain cannot exceed M^(2^s);
//   * failed states (sorted (value, used) pairs plus remaining depth) are
//     cached in a bounded set that is cleared when full.
// Steps are tried Add, Sub, Mul, operand pairs by decreasing (lhs, rhs). The
// first witness found is therefore the least one in that order, and it is
// the same for any worker count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <unordered_set>
#include <vector>

#include "chainsmith/bigint.hpp"
#include "chainsmith/constructors.hpp"
#include "chainsmith/error.hpp"
#include "chainsmith/program.hpp"

namespace chainsmith {

inline constexpr std::size_t kMaxSlpSearchLength = 8;
inline constexpr std::size_t kMaxAmcSearchLength = 16;
inline constexpr std::size_t kMaxSearchTargetBits = 126;

/// ceil(log2 log2 z) + 1: no program of length l exceeds 2^(2^(l-1)).
inline std::size_t lower_bound(const BigInt& z) {
  if (z < 2) throw DomainError("lower_bound requires z >= 2");
  // t = ceil(log2 z), then the smallest L with t <= 2^(L-1).
  std::size_t t = bit_length(BigInt{z - 1});
  std::size_t L = 1;
  while ((std::size_t{1} << (L - 1)) < t) ++L;
  return L;
}

struct SearchOptions {
  Model model = Model::Slp;
  std::size_t max_length = 0;  // 0 selects the model's hard cap
  std::size_t dedup_capacity = std::size_t{1} << 20;
  std::uint64_t budget_nodes = 0;  // 0 = unlimited
  double time_limit_seconds = 0;   // 0 = unlimited
  unsigned workers = 1;
};

enum class SearchStatus : std::uint8_t { Optimal, CapReached, BudgetExhausted };

inline std::string_view status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::Optimal: return "optimal";
    case SearchStatus::CapReached: return "cap-reached";
    case SearchStatus::BudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

struct SearchResult {
  BigInt target;
  Model model = Model::Slp;
  std::size_t length = 0;
  Program witness;
  bool proven_optimal = false;
  SearchStatus status = SearchStatus::Optimal;
  // Every length below this one was exhaustively refuted.
  std::size_t refuted_below = 0;
  std::uint64_t nodes_expanded = 0;
  std::uint64_t dedup_hits = 0;
};

namespace detail {

// One canonical candidate step and the value it produces.
struct Candidate {
  Op op;
  std::size_t lhs;
  std::size_t rhs;
  Word value;
};

/// Visits candidate steps over `vals` in canonical order until `f` returns
/// true. Subtraction yields |a - b| with the larger register on the left;
/// zero results and duplicates are left to the caller.
template <typename F>
bool for_each_candidate(const std::vector<Word>& vals, Model model, F&& f) {
  const std::size_t n = vals.size();
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j-- > 0;) {
      if (f(Candidate{Op::Add, i, j, sat_add(vals[i], vals[j])})) return true;
    }
  }
  if (model == Model::Slp) {
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i; j-- > 0;) {
        if (vals[i] == vals[j]) continue;
        bool i_big = vals[i] > vals[j];
        std::size_t hi = i_big ? i : j, lo = i_big ? j : i;
        if (f(Candidate{Op::Sub, hi, lo, vals[hi] - vals[lo]})) return true;
      }
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j-- > 0;) {
      if (f(Candidate{Op::Mul, i, j, sat_mul(vals[i], vals[j])})) return true;
    }
  }
  return false;
}

class BoundedStateSet {
 public:
  explicit BoundedStateSet(std::size_t capacity) : capacity_(capacity) {}

  bool contains(const std::string& key) const { return set_.count(key) != 0; }

  void insert(std::string key) {
    if (capacity_ == 0) return;
    if (set_.size() >= capacity_) set_.clear();
    set_.insert(std::move(key));
  }

 private:
  std::size_t capacity_;
  std::unordered_set<std::string> set_;
};

inline void append_word(std::string& key, Word w) {
  char buf[sizeof(Word)];
  std::memcpy(buf, &w, sizeof(Word));
  key.append(buf, sizeof(Word));
}

// Shared across the workers of one depth.
struct SearchControl {
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<bool> out_of_budget{false};
  std::atomic<std::size_t> best_task{static_cast<std::size_t>(-1)};
  std::uint64_t budget_nodes = 0;
  std::chrono::steady_clock::time_point deadline{};
  bool has_deadline = false;
};

struct Aborted {};

/// Depth-limited canonical DFS for one target and one depth.
class DepthSearch {
 public:
  DepthSearch(Model model, Word target, std::size_t depth, std::size_t dedup_capacity,
              SearchControl* control, std::size_t task_index)
      : model_(model),
        target_(target),
        depth_(depth),
        failed_(dedup_capacity),
        control_(control),
        task_index_(task_index) {
    vals_.push_back(1);
    used_.push_back(1);  // a_0 needs no use
  }

  /// Replays a prefix (already checked by the caller).
  void load_prefix(const std::vector<Step>& prefix) {
    for (const Step& s : prefix) push(s.op, s.lhs, s.rhs, apply_word(s.op, s.lhs, s.rhs));
  }

  bool run() { return remaining() == 0 ? vals_.back() == target_ : dfs(remaining()); }

  const std::vector<Step>& steps() const { return steps_; }
  std::uint64_t nodes() const { return nodes_; }
  std::uint64_t dedup_hits() const { return hits_; }

  /// Whether placing `c` as a non-final step keeps the state viable with
  /// `after` steps still to go.
  bool viable(const Candidate& c, std::size_t after) const {
    const Word v = c.value;
    if (v == 0 || v == kWordMax || v == target_) return false;
    if (model_ == Model::Amc) {
      if (v <= vals_.back() || v > target_) return false;
    } else if (std::find(vals_.begin(), vals_.end(), v) != vals_.end()) {
      return false;
    }
    std::size_t unused = unused_;
    if (!used_[c.lhs]) --unused;
    if (c.rhs != c.lhs && !used_[c.rhs]) --unused;
    ++unused;
    if (unused > after + 1) return false;
    Word m = std::max(max_, v);
    return sat_repeated_square(m, after) >= target_;
  }

  /// Final step: must hit the target and consume every unused register.
  bool closes(const Candidate& c) const {
    if (c.value != target_) return false;
    std::size_t covered = 0;
    if (!used_[c.lhs]) ++covered;
    if (c.rhs != c.lhs && !used_[c.rhs]) ++covered;
    return covered == unused_;
  }

  void push(Op op, std::size_t lhs, std::size_t rhs, Word v) {
    undo_.push_back({used_[lhs], used_[rhs], max_, unused_});
    if (!used_[lhs]) {
      used_[lhs] = 1;
      --unused_;
    }
    if (!used_[rhs]) {
      used_[rhs] = 1;
      --unused_;
    }
    steps_.push_back({op, lhs, rhs});
    vals_.push_back(v);
    used_.push_back(0);
    ++unused_;
    max_ = std::max(max_, v);
  }

  void pop() {
    const Step s = steps_.back();
    const Undo u = undo_.back();
    undo_.pop_back();
    steps_.pop_back();
    vals_.pop_back();
    used_.pop_back();
    used_[s.rhs] = u.rhs_used;
    used_[s.lhs] = u.lhs_used;
    max_ = u.max;
    unused_ = u.unused;
  }

  std::size_t remaining() const { return depth_ - steps_.size(); }

  const std::vector<Word>& values() const { return vals_; }

  std::string key(std::size_t remaining) const {
    std::vector<std::pair<Word, std::uint8_t>> regs;
    regs.reserve(vals_.size());
    for (std::size_t i = 0; i < vals_.size(); ++i) regs.emplace_back(vals_[i], i == 0 ? 1 : used_[i]);
    if (model_ == Model::Slp) std::sort(regs.begin(), regs.end());
    std::string k;
    k.reserve(regs.size() * (sizeof(Word) + 1) + 1);
    for (auto& [v, u] : regs) {
      append_word(k, v);
      k.push_back(static_cast<char>(u));
    }
    k.push_back(static_cast<char>(remaining));
    return k;
  }

 private:
  struct Undo {
    std::uint8_t lhs_used;
    std::uint8_t rhs_used;
    Word max;
    std::size_t unused;
  };

  Word apply_word(Op op, std::size_t lhs, std::size_t rhs) const {
    switch (op) {
      case Op::Add: return sat_add(vals_[lhs], vals_[rhs]);
      case Op::Sub: return vals_[lhs] - vals_[rhs];
      case Op::Mul: return sat_mul(vals_[lhs], vals_[rhs]);
    }
    return 0;
  }

  void tick() {
    ++nodes_;
    if ((nodes_ & 0x3ff) != 0 || control_ == nullptr) return;
    std::uint64_t total = control_->nodes.fetch_add(0x400) + 0x400;
    if (control_->budget_nodes != 0 && total >= control_->budget_nodes) {
      control_->out_of_budget = true;
    }
    if (control_->has_deadline && std::chrono::steady_clock::now() >= control_->deadline) {
      control_->out_of_budget = true;
    }
    if (control_->out_of_budget || control_->best_task.load() < task_index_) throw Aborted{};
  }

  bool dfs(std::size_t remaining) {
    tick();
    if (remaining == 1) {
      std::optional<Candidate> hit;
      for_each_candidate(vals_, model_, [&](const Candidate& c) {
        if (closes(c)) {
          hit = c;
          return true;
        }
        return false;
      });
      if (!hit) return false;
      push(hit->op, hit->lhs, hit->rhs, hit->value);
      return true;
    }
    std::string k = key(remaining);
    if (failed_.contains(k)) {
      ++hits_;
      return false;
    }
    bool found = for_each_candidate(vals_, model_, [&](const Candidate& c) {
      if (!viable(c, remaining - 1)) return false;
      push(c.op, c.lhs, c.rhs, c.value);
      if (dfs(remaining - 1)) return true;
      pop();
      return false;
    });
    if (!found) failed_.insert(std::move(k));
    return found;
  }

  Model model_;
  Word target_;
  std::size_t depth_;
  std::vector<Word> vals_;
  std::vector<std::uint8_t> used_;
  std::vector<Step> steps_;
  std::vector<Undo> undo_;
  std::size_t unused_ = 0;
  Word max_ = 1;
  BoundedStateSet failed_;
  SearchControl* control_;
  std::size_t task_index_;
  std::uint64_t nodes_ = 0;
  std::uint64_t hits_ = 0;
};

inline constexpr std::size_t kPrefixDepth = 3;

/// Canonical prefixes of `len` steps, in search order, with later prefixes
/// that reach an already-listed state dropped.
inline std::vector<std::vector<Step>> enumerate_prefixes(Model model, Word target, std::size_t depth,
                                                         std::size_t len) {
  std::vector<std::vector<Step>> out;
  std::unordered_set<std::string> seen;
  DepthSearch walker(model, target, depth, 0, nullptr, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t placed) {
    if (placed == len) {
      if (seen.insert(walker.key(walker.remaining())).second) out.push_back(walker.steps());
      return;
    }
    std::size_t after = depth - placed - 1;
    for_each_candidate(walker.values(), model, [&](const Candidate& c) {
      if (!walker.viable(c, after)) return false;
      walker.push(c.op, c.lhs, c.rhs, c.value);
      rec(placed + 1);
      walker.pop();
      return false;
    });
  };
  rec(0);
  return out;
}

struct DepthOutcome {
  std::optional<Program> witness;
  std::uint64_t nodes = 0;
  std::uint64_t hits = 0;
  bool aborted = false;
};

inline DepthOutcome search_depth(Model model, Word target, std::size_t depth, const SearchOptions& opts,
                                 SearchControl& control) {
  const std::size_t prefix_len = depth > 1 ? std::min(kPrefixDepth, depth - 1) : 0;
  auto prefixes = enumerate_prefixes(model, target, depth, prefix_len);

  struct TaskResult {
    bool done = false;
    bool found = false;
    std::vector<Step> steps;
    std::uint64_t nodes = 0;
    std::uint64_t hits = 0;
  };
  std::vector<TaskResult> results(prefixes.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= prefixes.size()) return;
      if (control.best_task.load() < i || control.out_of_budget) continue;
      DepthSearch s(model, target, depth, opts.dedup_capacity, &control, i);
      s.load_prefix(prefixes[i]);
      try {
        bool found = s.run();
        results[i] = {true, found, s.steps(), s.nodes(), s.dedup_hits()};
        if (found) {
          std::size_t cur = control.best_task.load();
          while (i < cur && !control.best_task.compare_exchange_weak(cur, i)) {
          }
        }
      } catch (const Aborted&) {
        results[i].nodes = s.nodes();
        results[i].hits = s.dedup_hits();
      }
    }
  };

  unsigned n_workers = std::max(1u, opts.workers);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  DepthOutcome out;
  std::size_t winner = control.best_task.load();
  std::size_t last = std::min(winner, prefixes.empty() ? 0 : prefixes.size() - 1);
  for (std::size_t i = 0; i <= last && i < results.size(); ++i) {
    out.nodes += results[i].nodes;
    out.hits += results[i].hits;
    if (!results[i].done) out.aborted = true;
  }
  if (winner < results.size()) {
    out.witness = Program(results[winner].steps);
    out.aborted = false;
  }
  return out;
}

}  // namespace detail

inline std::size_t default_max_length(Model m) {
  return m == Model::Slp ? kMaxSlpSearchLength : kMaxAmcSearchLength;
}

/// Exact shortest chain for z under opts.model.
inline SearchResult shortest_chain(const BigInt& z, const SearchOptions& opts) {
  if (z < 1) throw DomainError("search target must be >= 1");
  if (bit_length(z) > kMaxSearchTargetBits) {
    throw DomainError("search target exceeds " + std::to_string(kMaxSearchTargetBits) + " bits");
  }
  const std::size_t hard_cap = default_max_length(opts.model);
  const std::size_t cap = opts.max_length == 0 ? hard_cap : opts.max_length;
  if (cap > hard_cap) {
    throw DomainError("max length " + std::to_string(cap) + " exceeds the " +
                      std::string(model_name(opts.model)) + " search cap of " + std::to_string(hard_cap));
  }

  SearchResult res;
  res.target = z;
  res.model = opts.model;
  if (z == 1) {
    res.proven_optimal = true;
    return res;
  }

  const Word target = to_word(z);
  detail::SearchControl control;
  control.budget_nodes = opts.budget_nodes;
  if (opts.time_limit_seconds > 0) {
    control.has_deadline = true;
    control.deadline = std::chrono::steady_clock::now() +
                       std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(opts.time_limit_seconds));
  }

  std::size_t depth = lower_bound(z);
  res.refuted_below = depth;
  for (; depth <= cap; ++depth) {
    control.best_task = static_cast<std::size_t>(-1);
    auto outcome = detail::search_depth(opts.model, target, depth, opts, control);
    res.nodes_expanded += outcome.nodes;
    res.dedup_hits += outcome.hits;
    if (outcome.witness) {
      res.witness = *outcome.witness;
      res.length = depth;
      res.proven_optimal = true;
      res.status = SearchStatus::Optimal;
      return res;
    }
    if (outcome.aborted || control.out_of_budget) {
      res.status = SearchStatus::BudgetExhausted;
      break;
    }
    res.refuted_below = depth + 1;
  }
  if (depth > cap) res.status = SearchStatus::CapReached;

  // Fall back to the constructive upper bound.
  res.witness = prune_dead(brauer_slp(z).first);
  res.length = res.witness.length();
  res.proven_optimal = false;
  return res;
}

inline SearchResult tau(const BigInt& z, SearchOptions opts = {}) {
  opts.model = Model::Slp;
  return shortest_chain(z, opts);
}

inline SearchResult tau_plus(const BigInt& z, SearchOptions opts = {}) {
  opts.model = Model::Amc;
  return shortest_chain(z, opts);
}

// ---------------------------------------------------------------------------
// Value enumeration

inline constexpr std::size_t kDefaultSlpEnumerationCap = 5;
inline constexpr std::size_t kDefaultAmcEnumerationCap = 6;
// Beyond this the 128-bit register words could saturate.
inline constexpr std::size_t kHardEnumerationCap = 7;

struct ValueTable {
  Model model = Model::Slp;
  std::size_t max_length = 0;
  std::map<Word, std::size_t> shortest;       // value -> shortest length
  std::vector<std::size_t> new_per_length;    // index l: values first reached at l
  std::vector<std::size_t> states_per_length; // canonical states kept per level
  bool truncated = false;
};

struct EnumerationLimits {
  std::size_t slp_cap = kDefaultSlpEnumerationCap;
  std::size_t amc_cap = kDefaultAmcEnumerationCap;
  std::size_t state_capacity = std::size_t{1} << 24;
};

/// All positive values computable by canonical programs of length <= len,
/// with their shortest length. Level-by-level over sorted register sets.
inline ValueTable enumerate_values(std::size_t len, Model model, const EnumerationLimits& limits = {}) {
  const std::size_t cap = std::min(model == Model::Slp ? limits.slp_cap : limits.amc_cap, kHardEnumerationCap);
  if (len > cap) {
    throw DomainError("enumeration length " + std::to_string(len) + " exceeds cap " + std::to_string(cap));
  }
  ValueTable t;
  t.model = model;
  t.max_length = len;
  t.shortest[1] = 0;
  t.new_per_length.assign(len + 1, 0);
  t.states_per_length.assign(len + 1, 0);
  t.new_per_length[0] = 1;
  t.states_per_length[0] = 1;

  std::vector<std::vector<Word>> level{{1}};
  for (std::size_t l = 1; l <= len; ++l) {
    std::vector<std::vector<Word>> next;
    std::unordered_set<std::string> seen;
    const bool keep = l < len;
    for (const auto& state : level) {
      detail::for_each_candidate(state, model, [&](const detail::Candidate& c) {
        Word v = c.value;
        if (v == 0 || v == kWordMax) return false;
        if (model == Model::Amc ? v <= state.back()
                                : std::binary_search(state.begin(), state.end(), v)) {
          return false;
        }
        auto [it, fresh] = t.shortest.emplace(v, l);
        if (fresh) ++t.new_per_length[l];
        if (!keep) return false;
        std::vector<Word> s = state;
        s.insert(std::upper_bound(s.begin(), s.end(), v), v);
        std::string key;
        for (Word w : s) detail::append_word(key, w);
        if (seen.count(key)) return false;
        if (seen.size() >= limits.state_capacity) {
          t.truncated = true;
          return false;
        }
        seen.insert(std::move(key));
        next.push_back(std::move(s));
        return false;
      });
    }
    if (keep) t.states_per_length[l] = next.size();
    level = std::move(next);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Irredundant AMC enumeration

inline constexpr std::size_t kMaxIrredundantLength = 8;

struct IrredundantFilter {
  std::optional<std::size_t> additions;
  std::optional<std::size_t> multiplications;
  std::optional<Word> target;  // final register must equal this
  std::uint64_t node_budget = 0;  // 0 = unlimited; BudgetExhausted beyond it
};

/// Calls `visit(steps, values)` for every irredundant AMC of exactly `len`
/// steps (strictly increasing registers, every non-final register used,
/// commutative operands with lhs >= rhs). Values saturate at 2^128 - 1,
/// which only a length-8 final register can reach.
template <typename Visit>
void for_each_irredundant_amc(std::size_t len, const IrredundantFilter& filter, Visit&& visit) {
  if (len > kMaxIrredundantLength) {
    throw DomainError("irredundant enumeration is capped at length " +
                      std::to_string(kMaxIrredundantLength));
  }
  if (filter.additions && filter.multiplications && *filter.additions + *filter.multiplications != len) {
    return;
  }
  std::vector<Word> vals{1};
  std::vector<std::uint8_t> used{1};
  std::vector<Step> steps;
  std::size_t unused = 0, adds = 0, mults = 0;
  std::uint64_t nodes = 0;

  std::function<void()> rec = [&]() {
    if (filter.node_budget != 0 && ++nodes > filter.node_budget) {
      throw BudgetExhausted("irredundant enumeration exceeded its node budget");
    }
    const std::size_t placed = steps.size();
    if (placed == len) {
      if (unused == 1) visit(std::as_const(steps), std::as_const(vals));
      return;
    }
    const std::size_t after = len - placed - 1;
    detail::for_each_candidate(vals, Model::Amc, [&](const detail::Candidate& c) {
      if (c.value <= vals.back()) return false;
      if (c.op == Op::Add ? (filter.additions && adds >= *filter.additions)
                          : (filter.multiplications && mults >= *filter.multiplications)) {
        return false;
      }
      if (filter.target) {
        if (after == 0 ? c.value != *filter.target : c.value >= *filter.target) return false;
        if (sat_repeated_square(c.value, after) < *filter.target) return false;
      }
      std::size_t u = unused;
      if (!used[c.lhs]) --u;
      if (c.rhs != c.lhs && !used[c.rhs]) --u;
      ++u;
      if (after == 0 ? u != 1 : u > after + 1) return false;

      std::uint8_t lu = used[c.lhs], ru = used[c.rhs];
      std::size_t saved = unused;
      used[c.lhs] = used[c.rhs] = 1;
      unused = u;
      (c.op == Op::Add ? adds : mults)++;
      steps.push_back({c.op, c.lhs, c.rhs});
      vals.push_back(c.value);
      used.push_back(0);
      rec();
      used.pop_back();
      vals.pop_back();
      steps.pop_back();
      (c.op == Op::Add ? adds : mults)--;
      unused = saved;
      used[c.rhs] = ru;
      used[c.lhs] = lu;
      return false;
    });
  };
  rec();
}

}  // namespace chainsmith
