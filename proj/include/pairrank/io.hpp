#pragma once
// JSONL / JSON file formats. Absent optional fields are omitted, never
// written as null. Writers are deterministic: object keys are sorted and
// doubles use shortest round-trip formatting.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pairrank/errors.hpp"
#include "pairrank/types.hpp"

namespace pairrank {

using json = nlohmann::json;

// Stamped into every file a command writes.
struct RunMeta {
  std::string config_hash;
  std::uint64_t master_seed = 0;
};

// One line of decisions.jsonl; area and human_decision are echoed from the
// corpus for analysis.
struct DecisionRow {
  std::string id;
  std::string tier;
  std::size_t rank = 0;  // 0 = best
  std::optional<std::string> area;
  std::optional<std::string> human_decision;

  bool operator==(const DecisionRow&) const = default;
};

namespace detail {

inline std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open for reading: " + path.string());
  return in;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  return out;
}

template <typename T>
void get_optional(const json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    out = it->get<T>();
  } else {
    out.reset();
  }
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

inline void write_meta_line(std::ofstream& out, const RunMeta* meta) {
  if (!meta) return;
  json j;
  j["_meta"] = {{"config_hash", meta->config_hash},
                {"master_seed", meta->master_seed}};
  out << j.dump() << '\n';
}

inline bool is_meta_line(const json& j) { return j.contains("_meta"); }

// Calls fn(json) for every non-meta line.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in = open_for_read(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": bad JSON: " + e.what());
    }
    if (is_meta_line(j)) continue;
    try {
      fn(j);
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": " + e.what());
    }
  }
}

}  // namespace detail

inline json to_json(const PaperRecord& p) {
  json j;
  j["id"] = p.id;
  j["title"] = p.title;
  j["abstract"] = p.abstract;
  j["captions"] = p.captions;
  j["main_text"] = p.main_text;
  detail::put_optional(j, "area", p.area);
  detail::put_optional(j, "institution", p.institution);
  detail::put_optional(j, "human_decision", p.human_decision);
  detail::put_optional(j, "human_rating", p.human_rating);
  detail::put_optional(j, "citations", p.citations);
  detail::put_optional(j, "embedding", p.embedding);
  return j;
}

inline PaperRecord paper_from_json(const json& j) {
  PaperRecord p;
  p.id = j.at("id").get<std::string>();
  p.title = j.value("title", std::string{});
  p.abstract = j.value("abstract", std::string{});
  p.captions = j.value("captions", std::string{});
  p.main_text = j.value("main_text", std::string{});
  detail::get_optional(j, "area", p.area);
  detail::get_optional(j, "institution", p.institution);
  detail::get_optional(j, "human_decision", p.human_decision);
  detail::get_optional(j, "human_rating", p.human_rating);
  detail::get_optional(j, "citations", p.citations);
  detail::get_optional(j, "embedding", p.embedding);
  return p;
}

inline void write_papers(const std::filesystem::path& path,
                         const std::vector<PaperRecord>& papers,
                         const RunMeta* meta = nullptr) {
  std::ofstream out = detail::open_for_write(path);
  detail::write_meta_line(out, meta);
  for (const PaperRecord& p : papers) out << to_json(p).dump() << '\n';
}

inline std::vector<PaperRecord> read_papers(
    const std::filesystem::path& path) {
  std::vector<PaperRecord> out;
  detail::for_each_jsonl(path,
                         [&](const json& j) { out.push_back(paper_from_json(j)); });
  return out;
}

inline json to_json(const PairAssignment& a) {
  json j;
  j["assignment_id"] = a.assignment_id;
  j["first"] = a.first;
  j["second"] = a.second;
  j["seed"] = a.seed;
  return j;
}

inline PairAssignment assignment_from_json(const json& j) {
  PairAssignment a;
  a.assignment_id = j.at("assignment_id").get<std::string>();
  a.first = j.at("first").get<std::string>();
  a.second = j.at("second").get<std::string>();
  a.seed = j.at("seed").get<std::uint64_t>();
  return a;
}

inline void write_assignments(const std::filesystem::path& path,
                              const std::vector<PairAssignment>& assignments,
                              const RunMeta* meta = nullptr) {
  std::ofstream out = detail::open_for_write(path);
  detail::write_meta_line(out, meta);
  for (const PairAssignment& a : assignments) out << to_json(a).dump() << '\n';
}

inline std::vector<PairAssignment> read_assignments(
    const std::filesystem::path& path) {
  std::vector<PairAssignment> out;
  detail::for_each_jsonl(
      path, [&](const json& j) { out.push_back(assignment_from_json(j)); });
  return out;
}

inline json to_json(const ComparisonRecord& r) {
  json j;
  j["assignment_id"] = r.assignment_id;
  j["winner"] = r.winner;
  j["loser"] = r.loser;
  j["judge_id"] = r.judge_id;
  j["status"] = to_string(r.status);
  detail::put_optional(j, "raw_response", r.raw_response);
  return j;
}

inline ComparisonRecord comparison_from_json(const json& j) {
  ComparisonRecord r;
  r.assignment_id = j.at("assignment_id").get<std::string>();
  r.winner = j.at("winner").get<std::string>();
  r.loser = j.at("loser").get<std::string>();
  r.judge_id = j.at("judge_id").get<std::string>();
  const std::string status = j.at("status").get<std::string>();
  if (status == "valid") {
    r.status = JudgmentStatus::valid;
  } else if (status == "invalid") {
    r.status = JudgmentStatus::invalid;
  } else {
    throw ValidationError("unknown comparison status: " + status);
  }
  detail::get_optional(j, "raw_response", r.raw_response);
  return r;
}

inline void write_comparisons(const std::filesystem::path& path,
                              const std::vector<ComparisonRecord>& records,
                              const RunMeta* meta = nullptr) {
  std::ofstream out = detail::open_for_write(path);
  detail::write_meta_line(out, meta);
  for (const ComparisonRecord& r : records) out << to_json(r).dump() << '\n';
}

inline std::vector<ComparisonRecord> read_comparisons(
    const std::filesystem::path& path) {
  std::vector<ComparisonRecord> out;
  detail::for_each_jsonl(
      path, [&](const json& j) { out.push_back(comparison_from_json(j)); });
  return out;
}

inline json to_json(const DecisionRow& d) {
  json j;
  j["id"] = d.id;
  j["tier"] = d.tier;
  j["rank"] = d.rank;
  detail::put_optional(j, "area", d.area);
  detail::put_optional(j, "human_decision", d.human_decision);
  return j;
}

inline DecisionRow decision_row_from_json(const json& j) {
  DecisionRow d;
  d.id = j.at("id").get<std::string>();
  d.tier = j.at("tier").get<std::string>();
  d.rank = j.at("rank").get<std::size_t>();
  detail::get_optional(j, "area", d.area);
  detail::get_optional(j, "human_decision", d.human_decision);
  return d;
}

inline void write_decisions(const std::filesystem::path& path,
                            const std::vector<DecisionRow>& rows,
                            const RunMeta* meta = nullptr) {
  std::ofstream out = detail::open_for_write(path);
  detail::write_meta_line(out, meta);
  for (const DecisionRow& d : rows) out << to_json(d).dump() << '\n';
}

inline std::vector<DecisionRow> read_decisions(
    const std::filesystem::path& path) {
  std::vector<DecisionRow> out;
  detail::for_each_jsonl(
      path, [&](const json& j) { out.push_back(decision_row_from_json(j)); });
  return out;
}

inline json to_json(const BtScores& s) {
  json j;
  j["beta"] = s.beta;
  j["diagnostics"] = {{"log_likelihood", s.log_likelihood},
                      {"iterations", s.iterations},
                      {"converged", s.converged},
                      {"regularization", s.regularization},
                      {"zero_comparison_ids", s.zero_comparison_ids}};
  return j;
}

inline BtScores scores_from_json(const json& j) {
  BtScores s;
  s.beta = j.at("beta").get<std::map<std::string, double>>();
  const json& d = j.at("diagnostics");
  s.log_likelihood = d.at("log_likelihood").get<double>();
  s.iterations = d.at("iterations").get<long>();
  s.converged = d.at("converged").get<bool>();
  s.regularization = d.at("regularization").get<double>();
  s.zero_comparison_ids =
      d.at("zero_comparison_ids").get<std::vector<std::string>>();
  return s;
}

inline void write_scores(const std::filesystem::path& path, const BtScores& s,
                         const RunMeta* meta = nullptr) {
  json j = to_json(s);
  if (meta) {
    j["meta"] = {{"config_hash", meta->config_hash},
                 {"master_seed", meta->master_seed}};
  }
  std::ofstream out = detail::open_for_write(path);
  out << j.dump(2) << '\n';
}

inline BtScores read_scores(const std::filesystem::path& path) {
  std::ifstream in = detail::open_for_read(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": bad JSON: " + e.what());
  }
  return scores_from_json(j);
}

}  // namespace pairrank
