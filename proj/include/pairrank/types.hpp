#pragma once
// Shared domain types and corpus validation. All types are plain immutable
// values once constructed; no algorithms live here.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace pairrank {

// One submission. Optional fields are absent rather than defaulted;
// operations that need them fail loudly instead of imputing.
struct PaperRecord {
  std::string id;
  std::string title;
  std::string abstract;
  std::string captions;   // figure/table captions, may be empty
  std::string main_text;  // may be truncated before judge presentation
  std::optional<std::string> area;
  std::optional<std::string> institution;
  std::optional<std::string> human_decision;
  std::optional<double> human_rating;
  std::optional<std::int64_t> citations;
  std::optional<std::vector<double>> embedding;

  bool operator==(const PaperRecord&) const = default;
};

// One scheduled unordered pair. (first, second) is the presentation order
// shown to the judge; seed drives every random choice made for this
// assignment.
struct PairAssignment {
  std::string assignment_id;
  std::string first;
  std::string second;
  std::uint64_t seed = 0;

  bool operator==(const PairAssignment&) const = default;
};

enum class JudgmentStatus { valid, invalid };

inline const char* to_string(JudgmentStatus s) {
  return s == JudgmentStatus::valid ? "valid" : "invalid";
}

// One judged pair. Invalid records are kept for audit but excluded from
// all fitting and counting.
struct ComparisonRecord {
  std::string assignment_id;
  std::string winner;
  std::string loser;
  std::string judge_id;
  JudgmentStatus status = JudgmentStatus::valid;
  std::optional<std::string> raw_response;

  bool operator==(const ComparisonRecord&) const = default;
};

// Fitted quality scores with fit diagnostics. beta is mean-zero over the
// whole corpus; papers with zero valid comparisons sit at 0 and are listed
// in zero_comparison_ids.
struct BtScores {
  std::map<std::string, double> beta;
  double log_likelihood = 0.0;
  long iterations = 0;
  bool converged = false;
  double regularization = 0.0;
  std::vector<std::string> zero_comparison_ids;

  bool operator==(const BtScores&) const = default;
};

// Per-paper tier assignment plus the tier-size ledger used to derive it.
struct DecisionOutcome {
  std::vector<std::pair<std::string, std::size_t>> tiers;  // best to worst
  std::map<std::string, std::string> assignment;
  bool area_controlled = false;

  bool operator==(const DecisionOutcome&) const = default;
};

enum class ViolationKind {
  empty_id,
  duplicate_id,
  negative_citations,
  embedding_dim_mismatch,
};

struct CorpusViolation {
  ViolationKind kind;
  std::string paper_id;
  std::string message;
};

// Report-only check of corpus invariants; empty result iff the corpus is
// valid.
inline std::vector<CorpusViolation> validate_corpus(
    const std::vector<PaperRecord>& papers) {
  std::vector<CorpusViolation> out;
  std::unordered_set<std::string> seen;
  std::optional<std::size_t> embedding_dim;
  for (const PaperRecord& p : papers) {
    if (p.id.empty()) {
      out.push_back({ViolationKind::empty_id, p.id, "paper with empty id"});
    } else if (!seen.insert(p.id).second) {
      out.push_back(
          {ViolationKind::duplicate_id, p.id, "duplicate paper id: " + p.id});
    }
    if (p.citations && *p.citations < 0) {
      out.push_back({ViolationKind::negative_citations, p.id,
                     "negative citations for paper: " + p.id});
    }
    if (p.embedding) {
      if (!embedding_dim) {
        embedding_dim = p.embedding->size();
      } else if (p.embedding->size() != *embedding_dim) {
        out.push_back({ViolationKind::embedding_dim_mismatch, p.id,
                       "embedding dimension mismatch for paper " + p.id +
                           ": expected " + std::to_string(*embedding_dim) +
                           ", got " + std::to_string(p.embedding->size())});
      }
    }
  }
  return out;
}

inline std::unordered_map<std::string, const PaperRecord*> index_by_id(
    const std::vector<PaperRecord>& papers) {
  std::unordered_map<std::string, const PaperRecord*> out;
  out.reserve(papers.size());
  for (const PaperRecord& p : papers) out.emplace(p.id, &p);
  return out;
}

}  // namespace pairrank
