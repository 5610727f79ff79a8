#pragma once

// JSON forms of every report. Field order is fixed (ordered_json) and any
// integer that can outgrow 64 bits is written as a decimal string.

#include <cstdio>
#include <string>

#include <json.hpp>

#include "chainsmith/analysis.hpp"
#include "chainsmith/constructors.hpp"
#include "chainsmith/equiv.hpp"
#include "chainsmith/program.hpp"
#include "chainsmith/search.hpp"

namespace chainsmith {

using Json = nlohmann::ordered_json;

inline Json big_array(const std::vector<BigInt>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(x.str());
  return a;
}

template <typename T>
Json opt_big(const std::optional<T>& v) {
  return v ? Json(to_string(*v)) : Json(nullptr);
}

/// Fixed-precision decimal rendering, so output does not depend on the
/// platform's shortest-round-trip float formatting.
inline std::string approx(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline Json to_json(const Program& p) {
  Json j;
  j["length"] = p.length();
  j["chain"] = format_chain(p);
  return j;
}

inline Json to_json(const Evaluation& e, const Program& p) {
  Json j;
  j["value"] = e.value.str();
  j["length"] = p.length();
  j["trace"] = big_array(e.trace.values);
  return j;
}

inline Json to_json(const Classification& c) {
  Json j;
  j["model"] = c.model == Model::Amc ? "amc" : "slp";
  j["additions"] = c.additions;
  j["subtractions"] = c.subtractions;
  j["multiplications"] = c.multiplications;
  j["irredundant"] = c.irredundant ? Json(*c.irredundant) : Json("not-applicable");
  return j;
}

inline Json to_json(const BrauerPlan& p) {
  Json j;
  j["n"] = p.n;
  j["k"] = p.k;
  j["m"] = p.m;
  j["r"] = p.r;
  j["limbs"] = big_array(p.limbs);
  j["length_bound"] = p.length_bound();
  return j;
}

inline Json to_json(const SearchResult& r) {
  Json j;
  j["target"] = r.target.str();
  j["model"] = std::string(model_name(r.model));
  j["length"] = r.length;
  j["proven_optimal"] = r.proven_optimal;
  j["status"] = std::string(status_name(r.status));
  j["refuted_below"] = r.refuted_below;
  j["witness"] = format_chain(r.witness);
  j["trace"] = big_array(evaluate(r.witness).trace.values);
  j["nodes_expanded"] = r.nodes_expanded;
  j["dedup_hits"] = r.dedup_hits;
  return j;
}

inline Json to_json(const EqualityVerdict& v) {
  Json j;
  j["verdict"] = v.verdict == Verdict::Equal ? "equal" : "not-equal";
  j["rounds_used"] = v.rounds_used;
  j["error_bound"] = to_string(v.error_bound);
  j["error_bound_approx"] = approx(v.error_bound.convert_to<double>());
  j["witness_modulus"] = v.witness_modulus ? Json(std::to_string(*v.witness_modulus)) : Json(nullptr);
  if (v.residues) {
    j["residues"] = Json::array({std::to_string(v.residues->first), std::to_string(v.residues->second)});
  } else {
    j["residues"] = nullptr;
  }
  return j;
}

inline Json to_json(const AlphaDecomposition& d) {
  Json j;
  j["alphas"] = big_array(d.alphas);
  j["addition_positions"] = d.addition_positions;
  j["exponents"] = d.exponents;
  j["final_exponents"] = d.exponents.empty() ? Json::array() : Json(d.final_exponents());
  j["c_exponent"] = d.c_exponent ? Json(*d.c_exponent) : Json(nullptr);
  return j;
}

inline Json to_json(const ExtremalCandidate& c) {
  Json j;
  j["exponent"] = c.exponent;
  j["applicable"] = c.applicable;
  j["value"] = opt_big(c.value);
  return j;
}

inline Json to_json(const ExtremalReport& r) {
  Json j;
  j["additions"] = r.additions;
  j["multiplications"] = r.multiplications;
  j["programs"] = r.programs;
  j["max_value"] = opt_big(r.max_value);
  j["max_witness"] = r.max_witness ? Json(format_chain(*r.max_witness)) : Json(nullptr);
  j["predicted_max"] = r.predicted_max.str();
  j["max_matches"] = r.max_matches;
  j["second_value"] = opt_big(r.second_value);
  j["second_witness"] = r.second_witness ? Json(format_chain(*r.second_witness)) : Json(nullptr);
  j["second_exponent"] = r.second_exponent ? Json(approx(*r.second_exponent)) : Json(nullptr);
  Json cands = Json::array();
  for (const auto& c : r.candidates) cands.push_back(to_json(c));
  j["rederived_candidates"] = cands;
  j["rederived_second"] = opt_big(r.rederived_second);
  j["second_matches_rederived"] = r.second_matches_rederived;
  j["printed_first_term"] = to_json(r.printed_first_term);
  j["printed_second"] = opt_big(r.printed_second);
  j["second_matches_printed"] = r.second_matches_printed;
  return j;
}

inline Json to_json(const AdditionCountReport& r) {
  Json j;
  j["target"] = r.target.str();
  j["max_len"] = r.max_len;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json x;
    x["length"] = row.length;
    x["min_additions"] = row.min_additions;
    x["witnesses"] = row.witnesses;
    x["witness"] = format_chain(row.witness);
    x["trace"] = big_array(evaluate(row.witness).trace.values);
    rows.push_back(x);
  }
  j["rows"] = rows;
  j["partial"] = r.partial;
  return j;
}

inline Json to_json(const CensusReport& r) {
  Json j;
  j["n_bits"] = r.n_bits;
  j["max_len"] = r.max_len;
  j["computable_count"] = r.computable_count.str();
  j["total"] = r.total.str();
  j["fraction"] = to_string(r.fraction);
  j["fraction_approx"] = approx(r.fraction.convert_to<double>());
  j["in_range_per_length"] = r.in_range_per_length;
  j["new_per_length"] = r.new_per_length;
  j["cumulative_per_length"] = r.cumulative_per_length;
  j["lemma_bound"] = big_array(r.lemma_bound);
  j["bound_holds"] = r.bound_holds;
  j["lower_bound_only"] = r.lower_bound_only;
  return j;
}

inline Json to_json(const GapReport& r) {
  Json j;
  j["n"] = r.n;
  j["target"] = r.target.str();
  j["tau"] = r.tau.length;
  j["tau_proven_optimal"] = r.tau.proven_optimal;
  j["tau_witness"] = format_chain(r.tau.witness);
  j["tau_plus"] = r.tau_plus.length;
  j["tau_plus_proven_optimal"] = r.tau_plus.proven_optimal;
  j["tau_plus_witness"] = format_chain(r.tau_plus.witness);
  j["gap"] = r.gap;
  j["tower_length"] = r.tower_length;
  j["fermat_length"] = r.fermat_length;
  j["min_additions_among_optimal_amcs"] =
      r.min_additions_among_optimal_amcs ? Json(*r.min_additions_among_optimal_amcs) : Json(nullptr);
  j["optimal_amc_count"] = r.optimal_amc_count;
  j["tau_plus_at_least_n_plus_3"] = r.tau_plus_at_least_n_plus_3;
  return j;
}

inline Json to_json(const ValueTable& t) {
  Json j;
  j["model"] = std::string(model_name(t.model));
  j["max_length"] = t.max_length;
  j["distinct_values"] = t.shortest.size();
  j["new_per_length"] = t.new_per_length;
  j["states_per_length"] = t.states_per_length;
  j["truncated"] = t.truncated;
  return j;
}

}  // namespace chainsmith
