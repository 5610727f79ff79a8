#pragma once

// Straight-line programs over the integers.
//
// A program is a list of steps; step i (1-based) defines register i as
// `reg[lhs] op reg[rhs]` with lhs, rhs < i. Register 0 always holds 1 and is
// never written. The value of the program is the value of its last register.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chainsmith/bigint.hpp"
#include "chainsmith/error.hpp"

namespace chainsmith {

enum class Op : std::uint8_t { Add, Sub, Mul };

inline char op_symbol(Op op) {
  switch (op) {
    case Op::Add: return '+';
    case Op::Sub: return '-';
    case Op::Mul: return '*';
  }
  return '?';
}

inline bool is_commutative(Op op) { return op != Op::Sub; }

/// SLP allows subtraction; AMC (addition-multiplication chain) does not.
enum class Model : std::uint8_t { Slp, Amc };

inline std::string_view model_name(Model m) { return m == Model::Slp ? "slp" : "amc"; }

inline Model parse_model(std::string_view s) {
  if (s == "slp") return Model::Slp;
  if (s == "amc") return Model::Amc;
  throw DomainError("unknown model '" + std::string(s) + "' (expected slp or amc)");
}

struct Step {
  Op op = Op::Add;
  std::size_t lhs = 0;
  std::size_t rhs = 0;

  friend bool operator==(const Step&, const Step&) = default;
};

class Program {
 public:
  Program() = default;

  explicit Program(std::vector<Step> steps) : steps_(std::move(steps)) {
    for (std::size_t i = 0; i < steps_.size(); ++i) check_step(steps_[i], i + 1);
  }

  /// Appends a step and returns the index of the register it defines.
  std::size_t append(Op op, std::size_t lhs, std::size_t rhs) {
    Step s{op, lhs, rhs};
    check_step(s, steps_.size() + 1);
    steps_.push_back(s);
    return steps_.size();
  }

  std::span<const Step> steps() const noexcept { return steps_; }
  std::size_t length() const noexcept { return steps_.size(); }
  bool empty() const noexcept { return steps_.empty(); }
  const Step& operator[](std::size_t i) const { return steps_[i]; }

  bool has_subtraction() const {
    return std::any_of(steps_.begin(), steps_.end(), [](const Step& s) { return s.op == Op::Sub; });
  }

  friend bool operator==(const Program&, const Program&) = default;

 private:
  static void check_step(const Step& s, std::size_t reg) {
    if (s.lhs >= reg || s.rhs >= reg) {
      std::size_t bad = s.lhs >= reg ? s.lhs : s.rhs;
      throw DomainError("index " + std::to_string(bad) + " out of range at step " +
                        std::to_string(reg));
    }
  }

  std::vector<Step> steps_;
};

// ---------------------------------------------------------------------------
// Text format

namespace detail {

inline std::optional<std::size_t> parse_index(std::string_view tok) {
  if (tok.empty() || tok.size() > 18) return std::nullopt;
  std::size_t v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

/// Parses chain text. Blank lines and `#` comments are ignored; every other
/// line must read `<op> <j> <k>`. Errors carry the 1-based source line.
inline Program parse_chain(std::string_view text) {
  std::vector<Step> steps;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 3) {
      throw ParseError(line_no, "expected '<op> <j> <k>', got " + std::to_string(toks.size()) +
                                    " token(s)");
    }
    Op op;
    if (toks[0] == "+") {
      op = Op::Add;
    } else if (toks[0] == "-") {
      op = Op::Sub;
    } else if (toks[0] == "*") {
      op = Op::Mul;
    } else {
      throw ParseError(line_no, "malformed op token '" + std::string(toks[0]) + "'");
    }
    auto j = detail::parse_index(toks[1]);
    auto k = detail::parse_index(toks[2]);
    if (!j || !k) {
      throw ParseError(line_no, "non-integer register index '" +
                                    std::string(!j ? toks[1] : toks[2]) + "'");
    }
    std::size_t reg = steps.size() + 1;
    if (*j >= reg || *k >= reg) {
      throw ParseError(line_no, "index " + std::to_string(*j >= reg ? *j : *k) +
                                    " out of range at step " + std::to_string(reg));
    }
    steps.push_back({op, *j, *k});
    if (eol == text.size()) break;
  }
  return Program(std::move(steps));
}

/// Canonical text: one step per line joined by '\n', no trailing newline.
inline std::string format_chain(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.length(); ++i) {
    if (i) out.push_back('\n');
    const Step& s = p[i];
    out.push_back(op_symbol(s.op));
    out.push_back(' ');
    out += std::to_string(s.lhs);
    out.push_back(' ');
    out += std::to_string(s.rhs);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalTrace {
  std::vector<BigInt> values;  // a_0 .. a_l
};

struct Evaluation {
  BigInt value;
  EvalTrace trace;
};

inline BigInt apply(Op op, const BigInt& a, const BigInt& b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
  }
  return 0;
}

inline Evaluation evaluate(const Program& p) {
  Evaluation e;
  e.trace.values.reserve(p.length() + 1);
  e.trace.values.emplace_back(1);
  for (const Step& s : p.steps()) {
    e.trace.values.push_back(apply(s.op, e.trace.values[s.lhs], e.trace.values[s.rhs]));
  }
  e.value = e.trace.values.back();
  return e;
}

/// Upper bound on the bit length of every register, computed without
/// evaluating. Saturates at SIZE_MAX.
inline std::size_t bit_size_bound(const Program& p) {
  std::vector<std::size_t> bits{1};
  std::size_t worst = 1;
  constexpr std::size_t kMax = static_cast<std::size_t>(-1);
  for (const Step& s : p.steps()) {
    std::size_t a = bits[s.lhs], b = bits[s.rhs];
    std::size_t r;
    if (s.op == Op::Mul) {
      r = (a > kMax - b) ? kMax : a + b;
    } else {
      r = std::max(a, b);
      r = r == kMax ? kMax : r + 1;
    }
    bits.push_back(r);
    worst = std::max(worst, r);
  }
  return worst;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<Word>(a) * b % m);
}

/// c(P) mod m with every intermediate reduced; never materializes c(P).
inline std::uint64_t evaluate_mod(const Program& p, std::uint64_t m) {
  if (m < 2) throw DomainError("modulus must be >= 2");
  std::vector<std::uint64_t> r;
  r.reserve(p.length() + 1);
  r.push_back(1 % m);
  for (const Step& s : p.steps()) {
    std::uint64_t a = r[s.lhs], b = r[s.rhs];
    switch (s.op) {
      case Op::Add: r.push_back(static_cast<std::uint64_t>((static_cast<Word>(a) + b) % m)); break;
      case Op::Sub: r.push_back(a >= b ? a - b : m - (b - a)); break;
      case Op::Mul: r.push_back(mul_mod(a, b, m)); break;
    }
  }
  return r.back();
}

// ---------------------------------------------------------------------------
// Classification

struct Classification {
  Model model = Model::Amc;
  std::size_t additions = 0;
  std::size_t subtractions = 0;
  std::size_t multiplications = 0;
  // Irredundancy is only defined for AMCs.
  std::optional<bool> irredundant;
};

/// Registers 0..l-1 each appear as an operand of some later step.
inline bool all_registers_used(const Program& p) {
  if (p.empty()) return true;
  std::vector<bool> used(p.length() + 1, false);
  for (const Step& s : p.steps()) used[s.lhs] = used[s.rhs] = true;
  return std::all_of(used.begin(), used.end() - 1, [](bool u) { return u; });
}

inline Classification classify(const Program& p) {
  Classification c;
  for (const Step& s : p.steps()) {
    switch (s.op) {
      case Op::Add: ++c.additions; break;
      case Op::Sub: ++c.subtractions; break;
      case Op::Mul: ++c.multiplications; break;
    }
  }
  c.model = c.subtractions == 0 ? Model::Amc : Model::Slp;
  if (c.model == Model::Amc) {
    auto tr = evaluate(p).trace.values;
    bool increasing = std::adjacent_find(tr.begin(), tr.end(), [](const BigInt& a, const BigInt& b) {
                        return !(a < b);
                      }) == tr.end();
    c.irredundant = increasing && all_registers_used(p);
  }
  return c;
}

/// Drops registers the result does not depend on and renumbers the rest.
/// The computed value is unchanged.
inline Program prune_dead(const Program& p) {
  if (p.empty()) return p;
  std::size_t n = p.length();
  std::vector<bool> live(n + 1, false);
  live[n] = true;
  for (std::size_t r = n; r >= 1; --r) {
    if (!live[r]) continue;
    const Step& s = p[r - 1];
    live[s.lhs] = live[s.rhs] = true;
  }
  std::vector<std::size_t> remap(n + 1, 0);
  std::vector<Step> out;
  for (std::size_t r = 1; r <= n; ++r) {
    if (!live[r]) continue;
    const Step& s = p[r - 1];
    out.push_back({s.op, remap[s.lhs], remap[s.rhs]});
    remap[r] = out.size();
  }
  return Program(std::move(out));
}

}  // namespace chainsmith
