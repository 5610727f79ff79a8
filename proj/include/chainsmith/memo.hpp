#pragma once

// Persistent tau / tau+ table: a JSON Lines file whose first line is
// {"format": "chainsmith-memo", "version": 1} followed by one record per
// (value, model).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chainsmith/bigint.hpp"
#include "chainsmith/error.hpp"
#include "chainsmith/program.hpp"
#include "chainsmith/search.hpp"

namespace chainsmith {

struct MemoRecord {
  BigInt value;
  Model model = Model::Slp;
  std::size_t length = 0;
  Program witness;
  bool optimal = false;
  // Search statistics, kept so a memo hit reproduces the original report.
  std::optional<std::uint64_t> nodes_expanded;
  std::optional<std::uint64_t> dedup_hits;

  friend bool operator==(const MemoRecord&, const MemoRecord&) = default;
};

inline MemoRecord to_memo_record(const SearchResult& r) {
  return {r.target, r.model, r.length, r.witness, r.proven_optimal, r.nodes_expanded, r.dedup_hits};
}

/// Checks the record against its own witness; throws DomainError on mismatch.
inline void validate(const MemoRecord& rec) {
  if (rec.witness.length() != rec.length) {
    throw DomainError("witness has length " + std::to_string(rec.witness.length()) + ", record says " +
                      std::to_string(rec.length));
  }
  if (rec.model == Model::Amc && rec.witness.has_subtraction()) {
    throw DomainError("amc witness contains a subtraction");
  }
  BigInt got = evaluate(rec.witness).value;
  if (got != rec.value) {
    throw DomainError("witness evaluates to " + got.str() + ", record says " + rec.value.str());
  }
}

inline nlohmann::ordered_json memo_header() {
  nlohmann::ordered_json h;
  h["format"] = "chainsmith-memo";
  h["version"] = 1;
  return h;
}

inline nlohmann::ordered_json to_json(const MemoRecord& r) {
  nlohmann::ordered_json j;
  j["value"] = r.value.str();
  j["model"] = std::string(model_name(r.model));
  j["length"] = r.length;
  j["witness"] = format_chain(r.witness);
  j["optimal"] = r.optimal;
  if (r.nodes_expanded) j["nodes_expanded"] = *r.nodes_expanded;
  if (r.dedup_hits) j["dedup_hits"] = *r.dedup_hits;
  return j;
}

inline MemoRecord memo_record_from_json(const nlohmann::json& j) {
  MemoRecord r;
  r.value = parse_bigint(j.at("value").get<std::string>());
  r.model = parse_model(j.at("model").get<std::string>());
  r.length = j.at("length").get<std::size_t>();
  r.witness = parse_chain(j.at("witness").get<std::string>());
  r.optimal = j.at("optimal").get<bool>();
  if (j.contains("nodes_expanded")) r.nodes_expanded = j["nodes_expanded"].get<std::uint64_t>();
  if (j.contains("dedup_hits")) r.dedup_hits = j["dedup_hits"].get<std::uint64_t>();
  return r;
}

class MemoDatabase {
 public:
  using Key = std::pair<Model, BigInt>;

  struct LoadReport {
    std::size_t loaded = 0;
    std::vector<std::string> skipped;  // "line N: reason", only with repair
  };

  /// Loads and validates a memo file. A missing file is an empty database.
  /// Corrupt lines are fatal unless `repair` is set, in which case they are
  /// skipped and listed in the report.
  static MemoDatabase load(const std::filesystem::path& path, bool repair = false,
                           LoadReport* report = nullptr) {
    MemoDatabase db;
    std::ifstream in(path);
    if (!in) return db;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    LoadReport local;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        if (!header_seen) {
          if (j.value("format", "") != "chainsmith-memo" || j.value("version", 0) != 1) {
            throw DomainError("missing or unsupported memo header");
          }
          header_seen = true;
          continue;
        }
        MemoRecord rec = memo_record_from_json(j);
        validate(rec);
        db.records_[{rec.model, rec.value}] = std::move(rec);
        ++local.loaded;
      } catch (const std::exception& e) {
        std::string msg = "line " + std::to_string(line_no) + ": " + e.what();
        if (!repair || !header_seen) throw ParseError(line_no, std::string("corrupt memo record: ") + e.what());
        local.skipped.push_back(msg);
      }
    }
    if (report) *report = std::move(local);
    return db;
  }

  std::optional<MemoRecord> find(const BigInt& value, Model model) const {
    auto it = records_.find({model, value});
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  /// Inserts or improves a record. Replacement happens only for a strictly
  /// shorter witness or an upgrade to proven-optimal at the same length.
  /// Returns whether the database changed.
  bool offer(const MemoRecord& rec) {
    validate(rec);
    Key k{rec.model, rec.value};
    auto it = records_.find(k);
    if (it == records_.end()) {
      records_.emplace(std::move(k), rec);
      return true;
    }
    const MemoRecord& old = it->second;
    bool shorter = rec.length < old.length;
    bool upgrade = rec.length == old.length && rec.optimal && !old.optimal;
    if (!shorter && !upgrade) return false;
    it->second = rec;
    return true;
  }

  /// Writes the whole database (header first, records ordered by model then
  /// value) through a temporary file and an atomic rename.
  void save(const std::filesystem::path& path) const {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw DomainError("cannot write memo file " + tmp.string());
      out << memo_header().dump() << '\n';
      for (const auto& [k, rec] : records_) out << to_json(rec).dump() << '\n';
      if (!out) throw DomainError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }

  std::size_t size() const { return records_.size(); }

  const std::map<Key, MemoRecord, std::less<>>& records() const { return records_; }

 private:
  std::map<Key, MemoRecord, std::less<>> records_;
};

/// Loads `path`, offers each record, saves if anything changed. Returns the
/// number of records accepted.
inline std::size_t memo_store(const std::filesystem::path& path, const std::vector<MemoRecord>& records) {
  MemoDatabase db = MemoDatabase::load(path);
  std::size_t accepted = 0;
  for (const auto& r : records) accepted += db.offer(r) ? 1 : 0;
  if (accepted > 0 || !std::filesystem::exists(path)) db.save(path);
  return accepted;
}

inline MemoDatabase memo_load(const std::filesystem::path& path, bool repair = false) {
  return MemoDatabase::load(path, repair);
}

}  // namespace chainsmith
