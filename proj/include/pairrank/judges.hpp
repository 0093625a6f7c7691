#pragma once
// Simulated judges: a latent-quality pairwise judge drawing from the
// logistic family, and an absolute-rating judge for the rating-system
// baseline. Both are deterministic functions of their seeds.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "pairrank/errors.hpp"
#include "pairrank/rng.hpp"
#include "pairrank/types.hpp"

namespace pairrank {

struct SyntheticJudgeConfig {
  std::unordered_map<std::string, double> quality;  // latent true quality
  double noise_scale = 1.0;                         // logistic temperature
  std::unordered_map<std::string, double> area_bias;
  std::unordered_map<std::string, double> institution_bias;
};

struct RatingJudgeConfig {
  std::unordered_map<std::string, double> quality;
  double rating_noise = 0.0;
  int scale_min = 1;
  int scale_max = 10;
  double compression = 1.0;  // in (0, 1]; small values squash the scale
};

// Pairwise judge over latent qualities. Winner is drawn once per
// assignment from P(first) = logistic((q~_first - q~_second) / noise_scale)
// where q~ adds any configured area/institution bias.
class SyntheticJudge {
 public:
  SyntheticJudge(SyntheticJudgeConfig config,
                 const std::vector<PaperRecord>& papers)
      : config_(std::move(config)) {
    if (config_.noise_scale <= 0) {
      throw ValidationError("noise_scale must be > 0");
    }
    for (const PaperRecord& p : papers) {
      auto it = config_.quality.find(p.id);
      if (it == config_.quality.end()) continue;
      double q = it->second;
      if (p.area) {
        if (auto b = config_.area_bias.find(*p.area);
            b != config_.area_bias.end()) {
          q += b->second;
        }
      }
      if (p.institution) {
        if (auto b = config_.institution_bias.find(*p.institution);
            b != config_.institution_bias.end()) {
          q += b->second;
        }
      }
      effective_quality_.emplace(p.id, q);
    }
  }

  ComparisonRecord judge(const PairAssignment& a) const {
    const double qf = effective_quality_of(a.first);
    const double qs = effective_quality_of(a.second);
    const double p_first =
        1.0 / (1.0 + std::exp(-(qf - qs) / config_.noise_scale));
    SplitMix64 rng(a.seed);
    const bool first_wins = rng.uniform01() < p_first;
    ComparisonRecord r;
    r.assignment_id = a.assignment_id;
    r.winner = first_wins ? a.first : a.second;
    r.loser = first_wins ? a.second : a.first;
    r.judge_id = "synthetic";
    r.status = JudgmentStatus::valid;
    return r;
  }

  double effective_quality_of(const std::string& paper_id) const {
    auto it = effective_quality_.find(paper_id);
    if (it == effective_quality_.end()) {
      throw ValidationError("no quality entry for paper: " + paper_id);
    }
    return it->second;
  }

 private:
  SyntheticJudgeConfig config_;
  std::unordered_map<std::string, double> effective_quality_;
};

inline ComparisonRecord judge_pair_synthetic(const PairAssignment& assignment,
                                             const SyntheticJudgeConfig& config,
                                             const std::vector<PaperRecord>& papers) {
  return SyntheticJudge(config, papers).judge(assignment);
}

// Integer rating on [scale_min, scale_max]:
// clamp(round_half_up(midscale + compression * quality + noise), lo, hi).
inline int rate_paper_synthetic(const std::string& paper_id,
                                const RatingJudgeConfig& config,
                                std::uint64_t seed) {
  if (config.scale_min >= config.scale_max) {
    throw ValidationError("rating scale_min must be < scale_max");
  }
  auto it = config.quality.find(paper_id);
  if (it == config.quality.end()) {
    throw ValidationError("no quality entry for paper: " + paper_id);
  }
  SplitMix64 rng(seed);
  const double midscale = (config.scale_min + config.scale_max) / 2.0;
  const double noise = config.rating_noise * rng.gaussian();
  const double x = midscale + config.compression * it->second + noise;
  const double rounded = std::floor(x + 0.5);
  const double clamped =
      std::min(static_cast<double>(config.scale_max),
               std::max(static_cast<double>(config.scale_min), rounded));
  return static_cast<int>(clamped);
}

// Invoked as each record completes; may run concurrently from worker
// threads. Lets callers persist partial state before a transport abort.
using RecordSink =
    std::function<void(std::size_t index, const ComparisonRecord&)>;

// Runs a judge over all assignments, up to concurrency_limit at a time.
// Output order always matches assignment order. Invalid judgments are
// recorded, never fatal; transport errors abort after all workers drain.
template <typename Judge>
std::vector<ComparisonRecord> run_judging(
    const std::vector<PairAssignment>& assignments, const Judge& judge,
    unsigned concurrency_limit = 1, const RecordSink& on_record = nullptr) {
  std::vector<ComparisonRecord> out(assignments.size());
  if (assignments.empty()) return out;
  if (concurrency_limit < 1) concurrency_limit = 1;
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(concurrency_limit, assignments.size()));

  if (workers == 1) {
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      out[i] = judge.judge(assignments[i]);
      if (on_record) on_record(i, out[i]);
    }
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= assignments.size()) return;
          out[i] = judge.judge(assignments[i]);
          if (on_record) on_record(i, out[i]);
        }
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(assignments.size());  // stop other workers promptly
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline std::size_t count_invalid(const std::vector<ComparisonRecord>& records) {
  std::size_t n = 0;
  for (const ComparisonRecord& r : records) {
    if (r.status == JudgmentStatus::invalid) ++n;
  }
  return n;
}

}  // namespace pairrank
