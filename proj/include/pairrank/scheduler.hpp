#pragma once
// Uniform sampling of unordered paper pairs, with replacement, plus
// reproducible per-assignment seeding and orientation randomization.
// Output is a pure function of (config, corpus order).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "pairrank/errors.hpp"
#include "pairrank/rng.hpp"
#include "pairrank/types.hpp"

namespace pairrank {

struct ScheduleConfig {
  std::uint64_t master_seed = 0;
  std::uint64_t budget = 0;       // M: number of assignments to draw
  std::size_t corpus_size = 0;    // N: must match the corpus handed in
};

namespace detail {

// Streams carved out of the master seed; pair choice and judge outcome
// draws must never share a stream.
enum SeedStream : std::uint64_t {
  kStreamPairChoice = 1,
  kStreamJudge = 2,
};

// Decodes pair index k in [0, N(N-1)/2) to (i, j) with i < j, rows ordered
// (0,1), (0,2), ..., (0,N-1), (1,2), ...
inline std::pair<std::size_t, std::size_t> decode_pair(std::uint64_t k,
                                                       std::size_t n) {
  const double nn = static_cast<double>(n);
  auto row_base = [n](std::size_t i) {
    // number of pairs in rows [0, i)
    return static_cast<std::uint64_t>(i) * (2 * n - i - 1) / 2;
  };
  double disc = (2.0 * nn - 1.0) * (2.0 * nn - 1.0) - 8.0 * static_cast<double>(k);
  std::size_t i = static_cast<std::size_t>(
      (2.0 * nn - 1.0 - std::sqrt(disc < 0 ? 0.0 : disc)) / 2.0);
  if (i >= n - 1) i = n - 2;
  // fix up floating-point boundary errors
  while (i > 0 && row_base(i) > k) --i;
  while (row_base(i + 1) <= k) ++i;
  const std::size_t j = i + 1 + static_cast<std::size_t>(k - row_base(i));
  return {i, j};
}

}  // namespace detail

// Draws M assignments, each an independent uniform draw over the
// N(N-1)/2 unordered pairs (duplicates allowed), with a fair coin for
// presentation orientation.
inline std::vector<PairAssignment> sample_assignments(
    const ScheduleConfig& config, const std::vector<PaperRecord>& papers) {
  const std::size_t n = papers.size();
  if (n < 2) {
    throw ValidationError(
        "cannot sample pairs: corpus has fewer than 2 papers (" +
        std::to_string(n) + ")");
  }
  if (config.corpus_size != n) {
    throw ValidationError("ScheduleConfig.corpus_size (" +
                          std::to_string(config.corpus_size) +
                          ") does not match corpus size (" +
                          std::to_string(n) + ")");
  }
  const std::uint64_t total_pairs =
      static_cast<std::uint64_t>(n) * (n - 1) / 2;
  std::vector<PairAssignment> out;
  out.reserve(config.budget);
  char id_buf[24];
  for (std::uint64_t k = 0; k < config.budget; ++k) {
    SplitMix64 rng(
        derive_seed(config.master_seed, k, detail::kStreamPairChoice));
    const std::uint64_t pair_idx = rng.uniform_below(total_pairs);
    auto [i, j] = detail::decode_pair(pair_idx, n);
    if (rng.coin()) std::swap(i, j);
    PairAssignment a;
    std::snprintf(id_buf, sizeof(id_buf), "a%08llu",
                  static_cast<unsigned long long>(k));
    a.assignment_id = id_buf;
    a.first = papers[i].id;
    a.second = papers[j].id;
    a.seed = derive_seed(config.master_seed, k, detail::kStreamJudge);
    out.push_back(std::move(a));
  }
  return out;
}

// Sampling budget sufficient for ranking recovery with high probability:
// ceil(12 * n * ln n).
inline std::uint64_t recommended_budget(std::uint64_t n) {
  if (n < 2) {
    throw ValidationError("recommended_budget requires n >= 2, got " +
                          std::to_string(n));
  }
  const long double value =
      12.0L * static_cast<long double>(n) * std::log(static_cast<long double>(n));
  return static_cast<std::uint64_t>(std::ceil(value));
}

}  // namespace pairrank
