// chainsmith: command line front end for the chain workbench.
//
// Exit codes: 0 success, 1 domain error (bad input, parse or validation
// failure), 2 search budget or length cap exhausted, 3 internal
// verification failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "chainsmith/analysis.hpp"
#include "chainsmith/constructors.hpp"
#include "chainsmith/equiv.hpp"
#include "chainsmith/exit_codes.hpp"
#include "chainsmith/json_io.hpp"
#include "chainsmith/memo.hpp"
#include "chainsmith/program.hpp"
#include "chainsmith/search.hpp"

namespace cs = chainsmith;
using cs::kExitBudget;
using cs::kExitDomain;
using cs::kExitOk;
using cs::kExitVerification;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cs::DomainError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cs::Program load_chain(const std::string& file, const std::string& inline_text) {
  if (!file.empty() && !inline_text.empty()) throw cs::DomainError("give either --chain-file or --chain");
  if (!inline_text.empty()) {
    std::string text = inline_text;
    for (char& c : text) {
      if (c == ';') c = '\n';
    }
    return cs::parse_chain(text);
  }
  if (file.empty()) throw cs::DomainError("a chain is required (--chain-file or --chain)");
  try {
    return cs::parse_chain(read_file(file));
  } catch (const cs::ParseError& e) {
    throw cs::ParseError(e.line(), std::string(file) + ": " +
                                       std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
  }
}

void emit(bool json, const cs::Json& j, const std::string& text) {
  if (json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  }
}

std::string join_trace(const std::vector<cs::BigInt>& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ", ";
    s += t[i].str();
  }
  return s;
}

std::string indent_chain(const cs::Program& p) {
  if (p.empty()) return "  (empty)\n";
  std::string out;
  std::istringstream in(cs::format_chain(p));
  std::string line;
  while (std::getline(in, line)) out += "  " + line + "\n";
  return out;
}

struct Globals {
  bool json = false;
  unsigned workers = 1;
};

// ---------------------------------------------------------------------------

int cmd_eval(const Globals& g, const std::string& file, const std::string& inline_text,
             std::optional<std::uint64_t> mod) {
  cs::Program p = load_chain(file, inline_text);
  if (mod) {
    std::uint64_t r = cs::evaluate_mod(p, *mod);
    cs::Json j;
    j["length"] = p.length();
    j["modulus"] = std::to_string(*mod);
    j["residue"] = std::to_string(r);
    emit(g.json, j, "residue " + std::to_string(r) + " (mod " + std::to_string(*mod) + ")");
    return kExitOk;
  }
  auto e = cs::evaluate(p);
  auto c = cs::classify(p);
  cs::Json j = cs::to_json(e, p);
  j["classification"] = cs::to_json(c);
  std::ostringstream t;
  t << "value  " << e.value << "\n"
    << "length " << p.length() << "\n"
    << "trace  " << join_trace(e.trace.values) << "\n"
    << "model  " << cs::model_name(c.model) << " (" << c.additions << " add, " << c.subtractions << " sub, "
    << c.multiplications << " mul)";
  if (c.irredundant) t << ", " << (*c.irredundant ? "irredundant" : "redundant");
  emit(g.json, j, t.str());
  return kExitOk;
}

int print_construction(const Globals& g, const std::string& kind, const cs::Program& p,
                       const std::optional<cs::BrauerPlan>& plan) {
  auto e = cs::evaluate(p);
  cs::Json j;
  j["construction"] = kind;
  j["value"] = e.value.str();
  j["length"] = p.length();
  j["chain"] = cs::format_chain(p);
  if (plan) j["plan"] = cs::to_json(*plan);
  if (g.json) {
    emit(true, j, "");
  } else {
    std::cout << cs::format_chain(p);
    if (!p.empty()) std::cout << '\n';
    std::ostringstream meta;
    meta << "# " << kind << ": value " << e.value << ", length " << p.length();
    if (plan) {
      meta << ", plan n=" << plan->n << " k=" << plan->k << " m=" << plan->m << " r=" << plan->r
           << " bound=" << plan->length_bound();
    }
    std::cout << meta.str() << '\n';
  }
  return kExitOk;
}

int cmd_search(const Globals& g, const std::string& value, const std::string& model,
               std::size_t max_len, const std::string& memo_path, bool no_memo, std::uint64_t budget,
               std::size_t dedup_capacity) {
  cs::BigInt z = cs::parse_bigint(value);
  cs::Model m = cs::parse_model(model);

  std::optional<cs::MemoDatabase> db;
  if (!no_memo) db = cs::memo_load(memo_path);

  cs::SearchResult r;
  bool from_memo = false;
  if (db) {
    if (auto rec = db->find(z, m); rec && rec->optimal && (max_len == 0 || rec->length <= max_len)) {
      r.target = rec->value;
      r.model = rec->model;
      r.length = rec->length;
      r.witness = rec->witness;
      r.proven_optimal = true;
      r.status = cs::SearchStatus::Optimal;
      r.refuted_below = rec->length;
      r.nodes_expanded = rec->nodes_expanded.value_or(0);
      r.dedup_hits = rec->dedup_hits.value_or(0);
      from_memo = true;
    }
  }
  if (!from_memo) {
    cs::SearchOptions opts;
    opts.model = m;
    opts.max_length = max_len;
    opts.budget_nodes = budget;
    opts.dedup_capacity = dedup_capacity;
    opts.workers = g.workers;
    r = cs::shortest_chain(z, opts);
    if (db && r.proven_optimal) cs::memo_store(memo_path, {cs::to_memo_record(r)});
  }
  if (from_memo) std::cerr << "memo hit: " << memo_path << '\n';

  std::ostringstream t;
  t << (m == cs::Model::Slp ? "tau" : "tau+") << "(" << r.target << ") "
    << (r.proven_optimal ? "= " : "<= ") << r.length << "  [" << cs::status_name(r.status) << "]\n"
    << "trace " << join_trace(cs::evaluate(r.witness).trace.values) << "\n"
    << indent_chain(r.witness) << "nodes " << r.nodes_expanded << ", dedup hits " << r.dedup_hits;
  if (!r.proven_optimal) t << "\nlengths below " << r.refuted_below << " refuted";
  emit(g.json, cs::to_json(r), t.str());
  return r.status == cs::SearchStatus::Optimal ? kExitOk : kExitBudget;
}

int cmd_equal(const Globals& g, const std::string& left, const std::string& right, unsigned rounds,
              std::uint64_t seed, bool exact) {
  cs::Program p = load_chain(left, "");
  cs::Program q = load_chain(right, "");
  if (exact) {
    bool eq = cs::equal_exact(p, q);
    cs::Json j;
    j["mode"] = "exact";
    j["equal"] = eq;
    emit(g.json, j, eq ? "equal (exact)" : "not equal (exact)");
    return kExitOk;
  }
  auto v = cs::equal_probabilistic(p, q, rounds, seed);
  if (v.verdict == cs::Verdict::NotEqual && !cs::certificate_holds(p, q, v)) {
    throw cs::VerificationError("inequality certificate does not reproduce");
  }
  cs::Json j = cs::to_json(v);
  j["mode"] = "probabilistic";
  j["seed"] = std::to_string(seed);
  j["rounds"] = rounds;
  std::ostringstream t;
  if (v.verdict == cs::Verdict::Equal) {
    t << "equal, error bound " << cs::to_string(v.error_bound) << " (~"
      << cs::approx(v.error_bound.convert_to<double>()) << ") after " << rounds << " round(s)";
  } else {
    t << "not equal: residues " << v.residues->first << " vs " << v.residues->second << " mod prime "
      << *v.witness_modulus << " (round " << v.rounds_used << ")";
  }
  emit(g.json, j, t.str());
  return kExitOk;
}

int cmd_census(const Globals& g, std::size_t bits, std::size_t max_len) {
  auto r = cs::census(bits, max_len);
  std::ostringstream t;
  t << "values in [2^" << bits << ", 2^" << bits + 1 << ") computable by SLPs of length <= " << max_len << ": "
    << r.computable_count << " / " << r.total << " = " << cs::approx(r.fraction.convert_to<double>())
    << (r.lower_bound_only ? " (lower bound: enumeration truncated)" : "") << "\n"
    << "len  new  cumulative  in-window  bound l^(3l)\n";
  for (std::size_t l = 0; l <= max_len; ++l) {
    t << l << "  " << r.new_per_length[l] << "  " << r.cumulative_per_length[l] << "  " << r.in_range_per_length[l]
      << "  " << r.lemma_bound[l] << "\n";
  }
  t << "counting bound " << (r.bound_holds ? "holds" : "VIOLATED");
  emit(g.json, cs::to_json(r), t.str());
  return r.bound_holds ? kExitOk : kExitVerification;
}

int cmd_extremal(const Globals& g, std::size_t a, std::size_t m) {
  auto r = cs::extremal_survey(a, m);
  std::ostringstream t;
  t << "irredundant AMCs with " << a << " additions and " << m << " multiplications: " << r.programs << "\n"
    << "max    " << (r.max_value ? r.max_value->str() : "-") << "  (predicted " << r.predicted_max << ", "
    << (r.max_matches ? "match" : "MISMATCH") << ")\n"
    << "second " << (r.second_value ? r.second_value->str() : "-") << "\n";
  for (const auto& c : r.candidates) {
    t << "  candidate 2^(" << c.exponent << ") = " << (c.value ? c.value->str() : "n/a") << "\n";
  }
  t << "  printed 2^(" << r.printed_first_term.exponent
    << ") = " << (r.printed_first_term.value ? r.printed_first_term.value->str() : "n/a") << "\n"
    << "second vs re-derived: " << (r.second_matches_rederived ? "match" : "differs")
    << "; vs printed: " << (r.second_matches_printed ? "match" : "differs");
  emit(g.json, cs::to_json(r), t.str());
  return kExitOk;
}

int cmd_alpha(const Globals& g, const std::string& file, const std::string& inline_text) {
  cs::Program p = load_chain(file, inline_text);
  auto d = cs::alpha_decompose(p);
  std::ostringstream t;
  t << "alphas";
  for (const auto& a : d.alphas) t << ' ' << a;
  t << "\nfinal exponents";
  for (auto e : d.final_exponents()) t << ' ' << e;
  if (d.c_exponent) t << "\nalpha_2 = 2^" << *d.c_exponent << " + 1";
  emit(g.json, cs::to_json(d), t.str());
  return kExitOk;
}

int cmd_additions(const Globals& g, const std::string& value, std::size_t max_len) {
  auto r = cs::addition_count_report(cs::parse_bigint(value), max_len);
  std::ostringstream t;
  t << "irredundant AMCs computing " << r.target << " (length <= " << max_len << ")\n";
  if (r.rows.empty()) t << "  none\n";
  for (const auto& row : r.rows) {
    t << "  length " << row.length << ": min additions " << row.min_additions << " over " << row.witnesses
      << " chain(s); e.g. " << join_trace(cs::evaluate(row.witness).trace.values) << "\n";
  }
  emit(g.json, cs::to_json(r), t.str());
  return r.partial ? kExitBudget : kExitOk;
}

int cmd_gap(const Globals& g, std::size_t n, bool deep, double time_limit) {
  cs::GapOptions opts;
  opts.deep = deep;
  opts.time_limit_seconds = time_limit;
  opts.workers = g.workers;
  auto r = cs::gap_report(n, opts);
  std::ostringstream t;
  t << "target 2^(2^" << n << ") - 1 = " << r.target << "\n"
    << "tau   = " << r.tau.length << "  (tower bound n+2 = " << r.tower_length << ")\n"
    << "tau+  = " << r.tau_plus.length << "  (Fermat bound 2n = " << 2 * n << ")\n"
    << "gap   = " << r.gap << "\n";
  if (r.min_additions_among_optimal_amcs) {
    t << "fewest additions among " << r.optimal_amc_count << " optimal AMC(s): " << *r.min_additions_among_optimal_amcs
      << "\n";
  }
  t << "tau+ >= n+3: " << (r.tau_plus_at_least_n_plus_3 ? "yes" : "no");
  emit(g.json, cs::to_json(r), t.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chainsmith: straight-line programs and addition-multiplication chains over the integers"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Emit JSON");
  app.add_option("--workers", g.workers, "Search worker threads")->check(CLI::Range(1u, 256u));

  // eval
  std::string chain_file, chain_inline;
  std::optional<std::uint64_t> mod;
  auto* eval = app.add_subcommand("eval", "Evaluate a chain");
  eval->add_option("--chain-file", chain_file, "Chain text file");
  eval->add_option("--chain", chain_inline, "Inline chain; ';' separates steps");
  eval->add_option("--mod", mod, "Evaluate modulo M (M >= 2)");

  // construct
  auto* construct = app.add_subcommand("construct", "Build a chain from a known construction");
  construct->require_subcommand(1);
  std::string brauer_value;
  std::optional<std::size_t> brauer_k;
  bool brauer_prune = false;
  auto* brauer = construct->add_subcommand("brauer", "2^k-ary chain for any value");
  brauer->add_option("--value", brauer_value, "Target value")->required();
  brauer->add_option("--k", brauer_k, "Limb width override");
  brauer->add_flag("--prune", brauer_prune, "Drop registers the result does not use");
  std::size_t tower_n = 0, fermat_n = 0;
  auto* tower = construct->add_subcommand("tower", "SLP for 2^(2^n) - 1 in n + 2 steps");
  tower->add_option("--n", tower_n, "n")->required();
  auto* fermat = construct->add_subcommand("fermat-amc", "AMC for 2^(2^n) - 1 in 2n steps");
  fermat->add_option("--n", fermat_n, "n")->required();

  // search
  std::string search_value, search_model = "slp", memo_path = "./chainsmith-memo.jsonl";
  std::size_t max_len = 0, dedup_capacity = std::size_t{1} << 20;
  std::uint64_t budget = 0;
  bool no_memo = false;
  auto* search = app.add_subcommand("search", "Exact shortest SLP or AMC for a value");
  search->add_option("--value", search_value, "Target value")->required();
  search->add_option("--model", search_model, "slp or amc")->required();
  search->add_option("--max-len", max_len, "Length cap");
  search->add_option("--memo", memo_path, "Memo database (JSON Lines)");
  search->add_flag("--no-memo", no_memo, "Neither read nor write the memo database");
  search->add_option("--budget-nodes", budget, "Node budget (0 = unlimited)");
  search->add_option("--dedup-capacity", dedup_capacity, "Failed-state cache size per task");

  // equal
  std::string left, right;
  unsigned rounds = cs::kDefaultRounds;
  std::uint64_t seed = 0;
  bool exact = false;
  auto* equal = app.add_subcommand("equal", "Test whether two chains compute the same integer");
  equal->add_option("--left", left, "First chain file")->required();
  equal->add_option("--right", right, "Second chain file")->required();
  equal->add_option("--rounds", rounds, "Random prime rounds")->check(CLI::Range(1u, 100000u));
  equal->add_option("--seed", seed, "Seed");
  equal->add_flag("--exact", exact, "Compare exact values instead");

  // census
  std::size_t census_bits = 0, census_len = 0;
  auto* census = app.add_subcommand("census", "Fraction of n-bit values with short SLPs");
  census->add_option("--bits", census_bits, "Window [2^N, 2^(N+1))")->required();
  census->add_option("--max-len", census_len, "Program length bound")->required();

  // extremal
  std::size_t ext_a = 0, ext_m = 0;
  auto* extremal = app.add_subcommand("extremal", "Largest values by addition / multiplication counts");
  extremal->add_option("--additions", ext_a, "Additions")->required();
  extremal->add_option("--mults", ext_m, "Multiplications")->required();

  // alpha
  std::string alpha_file, alpha_inline;
  auto* alpha = app.add_subcommand("alpha", "Alpha-factor decomposition of an AMC");
  alpha->add_option("--chain-file", alpha_file, "Chain text file");
  alpha->add_option("--chain", alpha_inline, "Inline chain; ';' separates steps");

  // additions
  std::string add_value;
  std::size_t add_len = 0;
  auto* additions = app.add_subcommand("additions", "Fewest additions per AMC length");
  additions->add_option("--value", add_value, "Target value")->required();
  additions->add_option("--max-len", add_len, "Length bound")->required();

  // gap
  std::size_t gap_n = 0;
  bool deep = false;
  double time_limit = 0;
  auto* gap = app.add_subcommand("gap", "tau vs tau+ for 2^(2^n) - 1");
  gap->add_option("--n", gap_n, "n")->required();
  gap->add_flag("--deep", deep, "Allow n = 4");
  gap->add_option("--time-limit", time_limit, "Seconds per search (0 = unlimited)");

  for (auto* sub : app.get_subcommands({})) {
    sub->add_flag("--json", g.json, "Emit JSON");
    for (auto* inner : sub->get_subcommands({})) inner->add_flag("--json", g.json, "Emit JSON");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitDomain;
  }

  return cs::run_guarded(
      [&]() -> int {
        if (eval->parsed()) return cmd_eval(g, chain_file, chain_inline, mod);
        if (brauer->parsed()) {
          auto [p, plan] = cs::brauer_slp(cs::parse_bigint(brauer_value), brauer_k);
          if (brauer_prune) p = cs::prune_dead(p);
          if (evaluate(p).value != cs::parse_bigint(brauer_value) || (plan.n >= 1 && p.length() > plan.length_bound())) {
            throw cs::VerificationError("brauer chain misses its value or length bound");
          }
          return print_construction(g, "brauer", p, plan);
        }
        if (tower->parsed()) return print_construction(g, "tower", cs::tower_slp(tower_n), std::nullopt);
        if (fermat->parsed()) return print_construction(g, "fermat-amc", cs::fermat_amc(fermat_n), std::nullopt);
        if (search->parsed()) {
          return cmd_search(g, search_value, search_model, max_len, memo_path, no_memo, budget, dedup_capacity);
        }
        if (equal->parsed()) return cmd_equal(g, left, right, rounds, seed, exact);
        if (census->parsed()) return cmd_census(g, census_bits, census_len);
        if (extremal->parsed()) return cmd_extremal(g, ext_a, ext_m);
        if (alpha->parsed()) return cmd_alpha(g, alpha_file, alpha_inline);
        if (additions->parsed()) return cmd_additions(g, add_value, add_len);
        if (gap->parsed()) return cmd_gap(g, gap_n, deep, time_limit);
        return kExitDomain;
      },
      std::cerr);
}
