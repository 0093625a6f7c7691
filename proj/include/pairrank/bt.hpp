#pragma once
// Bradley-Terry maximum likelihood with L2 regularization.
//
// The optimizer is a minorization-maximization scheme: at the current
// estimate the log-sum-exp term of each comparison is minorized by its
// tangent line, which makes the surrogate separable per paper. Each MM
// round then solves, per paper i,
//
//     wins_i - exp(b) * C_i - lambda * b = 0,
//
// where C_i = sum over i's comparisons of n / (gamma_i + gamma_j) at the
// previous estimate. With lambda = 0 this is exactly the classic Zermelo
// update gamma_i = wins_i / C_i; with lambda > 0 the root is found by
// safeguarded Newton.
//
// Plain MM contracts slowly on dense comparison graphs, so every third
// step extrapolates along the last two MM steps (SQUAREM steplength) and
// keeps the extrapolated point only if it does not lower the objective.
// MM theory plus that safeguard give monotone ascent of the regularized
// objective, which the tests assert.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "pairrank/errors.hpp"
#include "pairrank/types.hpp"

namespace pairrank {

struct FitConfig {
  double regularization = 0.01;  // L2 weight lambda, >= 0
  double tolerance = 1e-10;      // on regularized log-likelihood change
  long max_iterations = 10000;
};

// Scores are clamped to this range; exp() stays finite and ratios stay
// representable for any comparison volume.
constexpr double kBetaClamp = 350.0;

/// P(i beats j) = logistic(beta_i - beta_j), stable for |diff| up to ~700.
inline double bt_probability(double beta_i, double beta_j) {
  if (!std::isfinite(beta_i) || !std::isfinite(beta_j)) {
    throw ValidationError("bt_probability requires finite scores");
  }
  const double d = beta_i - beta_j;
  if (d >= 0) {
    return 1.0 / (1.0 + std::exp(-d));
  }
  const double e = std::exp(d);
  return e / (1.0 + e);
}

namespace detail {

// log(sigmoid(d)) in a form stable for large |d|.
inline double log_sigmoid(double d) {
  if (d > 0) return -std::log1p(std::exp(-d));
  return d - std::log1p(std::exp(d));
}

struct PairAgg {
  std::uint32_t a = 0;  // index of lower-indexed paper
  std::uint32_t b = 0;
  double a_wins = 0;
  double b_wins = 0;
};

// Solves wins - exp(b) * c - lambda * b = 0 (strictly decreasing in b).
inline double solve_mm_coordinate(double wins, double c, double lambda,
                                  double initial) {
  if (c <= 0) return lambda > 0 ? 0.0 : initial;
  if (lambda == 0.0) {
    if (wins <= 0) return -kBetaClamp;
    return std::clamp(std::log(wins / c), -kBetaClamp, kBetaClamp);
  }
  double lo = -kBetaClamp;
  double hi = kBetaClamp;
  double b = std::clamp(initial, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double eb = std::exp(b);
    const double g = wins - eb * c - lambda * b;
    if (g > 0) {
      lo = b;
    } else {
      hi = b;
    }
    const double slope = -eb * c - lambda;
    double next = b - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - b) <= 1e-14 * std::max(1.0, std::abs(b))) {
      return next;
    }
    b = next;
  }
  return b;
}

}  // namespace detail

/// Regularized log-likelihood: sum of log P(winner beats loser) over valid
/// records minus (lambda/2) * sum of beta^2 over all entries.
inline double log_likelihood(const std::map<std::string, double>& beta,
                             const std::vector<ComparisonRecord>& comparisons,
                             double regularization) {
  double ll = 0.0;
  for (const ComparisonRecord& r : comparisons) {
    if (r.status == JudgmentStatus::invalid) continue;
    auto w = beta.find(r.winner);
    auto l = beta.find(r.loser);
    if (w == beta.end()) {
      throw ValidationError("no score entry for paper: " + r.winner);
    }
    if (l == beta.end()) {
      throw ValidationError("no score entry for paper: " + r.loser);
    }
    ll += detail::log_sigmoid(w->second - l->second);
  }
  double penalty = 0.0;
  for (const auto& [id, b] : beta) penalty += b * b;
  return ll - 0.5 * regularization * penalty;
}

using FitObserver = std::function<void(long iteration, double objective)>;

// Fits scores for every corpus paper from the valid comparisons. Papers
// with no valid comparison get beta = 0 and are flagged. The result is
// re-centered so that the mean over the whole corpus is zero.
inline BtScores fit(const std::vector<ComparisonRecord>& comparisons,
                    const std::vector<std::string>& corpus_ids,
                    const FitConfig& config = {},
                    const FitObserver& observer = nullptr) {
  if (corpus_ids.empty()) {
    throw ValidationError("fit requires a non-empty corpus");
  }
  if (config.tolerance <= 0) throw ValidationError("tolerance must be > 0");
  if (config.max_iterations < 1) {
    throw ValidationError("max_iterations must be >= 1");
  }
  if (config.regularization < 0) {
    throw ValidationError("regularization must be >= 0");
  }
  const std::size_t n = corpus_ids.size();
  std::unordered_map<std::string, std::uint32_t> index;
  index.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index.emplace(corpus_ids[i], static_cast<std::uint32_t>(i)).second) {
      throw ValidationError("duplicate corpus id: " + corpus_ids[i]);
    }
  }

  // Aggregate valid records into per-pair win counts (multiplicity kept).
  std::unordered_map<std::uint64_t, detail::PairAgg> pair_map;
  std::vector<double> wins(n, 0.0);
  std::vector<double> games(n, 0.0);
  for (const ComparisonRecord& r : comparisons) {
    if (r.status == JudgmentStatus::invalid) continue;
    auto wi = index.find(r.winner);
    auto li = index.find(r.loser);
    if (wi == index.end()) {
      throw ValidationError("comparison references unknown paper: " + r.winner);
    }
    if (li == index.end()) {
      throw ValidationError("comparison references unknown paper: " + r.loser);
    }
    if (wi->second == li->second) {
      throw ValidationError("comparison with winner == loser: " + r.winner);
    }
    const std::uint32_t w = wi->second;
    const std::uint32_t l = li->second;
    const std::uint32_t a = std::min(w, l);
    const std::uint32_t b = std::max(w, l);
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    detail::PairAgg& agg = pair_map[key];
    agg.a = a;
    agg.b = b;
    (w == a ? agg.a_wins : agg.b_wins) += 1.0;
    wins[w] += 1.0;
    games[w] += 1.0;
    games[l] += 1.0;
  }
  std::vector<detail::PairAgg> pairs;
  pairs.reserve(pair_map.size());
  for (const auto& [key, agg] : pair_map) pairs.push_back(agg);
  std::sort(pairs.begin(), pairs.end(),
            [](const detail::PairAgg& x, const detail::PairAgg& y) {
              return x.a != y.a ? x.a < y.a : x.b < y.b;
            });

  const double lambda = config.regularization;

  // Unregularized fits on graphs with an all-win or all-loss paper have no
  // finite maximizer; run the full iteration budget and report
  // converged = false instead of stopping on a vanishing objective change.
  bool unbounded = false;
  if (lambda == 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (games[i] > 0 && (wins[i] == 0.0 || wins[i] == games[i])) {
        unbounded = true;
        break;
      }
    }
  }

  std::vector<double> beta(n, 0.0);
  std::vector<double> gamma(n, 1.0);
  std::vector<double> coeff(n, 0.0);

  auto objective = [&]() {
    double ll = 0.0;
    for (const detail::PairAgg& p : pairs) {
      const double d = beta[p.a] - beta[p.b];
      if (p.a_wins > 0) ll += p.a_wins * detail::log_sigmoid(d);
      if (p.b_wins > 0) ll += p.b_wins * detail::log_sigmoid(-d);
    }
    double penalty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (games[i] > 0) penalty += beta[i] * beta[i];
    }
    return ll - 0.5 * lambda * penalty;
  };

  auto mm_step = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      gamma[i] = std::exp(beta[i]);
      coeff[i] = 0.0;
    }
    for (const detail::PairAgg& p : pairs) {
      const double total = p.a_wins + p.b_wins;
      const double inv = total / (gamma[p.a] + gamma[p.b]);
      coeff[p.a] += inv;
      coeff[p.b] += inv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (games[i] <= 0) continue;  // stays at 0, flagged below
      beta[i] = detail::solve_mm_coordinate(wins[i], coeff[i], lambda, beta[i]);
    }
  };

  double cycle_prev = objective();
  long iterations = 0;
  bool converged = false;
  std::vector<double> x0(n);
  std::vector<double> x1(n);
  while (iterations < config.max_iterations) {
    x0 = beta;
    mm_step();
    ++iterations;
    double current = objective();
    if (observer) observer(iterations, current);
    if (iterations < config.max_iterations) {
      x1 = beta;
      mm_step();
      ++iterations;
      current = objective();
      if (observer) observer(iterations, current);

      // SQUAREM extrapolation along the last two steps; kept only when it
      // does not lower the objective, so ascent stays monotone.
      if (iterations < config.max_iterations) {
        double rr = 0.0;
        double vv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double r = x1[i] - x0[i];
          const double v = beta[i] - 2.0 * x1[i] + x0[i];
          rr += r * r;
          vv += v * v;
        }
        if (vv > 1e-280 && rr > 0.0) {
          const std::vector<double> x2 = beta;
          const double alpha = -std::sqrt(rr / vv);
          for (std::size_t i = 0; i < n; ++i) {
            if (games[i] <= 0) continue;
            const double r = x1[i] - x0[i];
            const double v = x2[i] - 2.0 * x1[i] + x0[i];
            beta[i] = std::clamp(x0[i] - 2.0 * alpha * r + alpha * alpha * v,
                                 -kBetaClamp, kBetaClamp);
          }
          mm_step();  // stabilize the extrapolated point
          ++iterations;
          const double accelerated = objective();
          if (accelerated >= current) {
            current = accelerated;
          } else {
            beta = x2;  // reject the extrapolation
          }
          if (observer) observer(iterations, current);
        }
      }
    }
    if (!unbounded && std::abs(current - cycle_prev) < config.tolerance) {
      converged = true;
      break;
    }
    cycle_prev = current;
  }

  // Center compared papers to mean zero; untouched papers already sit at 0,
  // so the corpus-wide mean is zero as well.
  std::size_t compared = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (games[i] > 0) {
      sum += beta[i];
      ++compared;
    }
  }
  if (compared > 0) {
    const double mean = sum / static_cast<double>(compared);
    for (std::size_t i = 0; i < n; ++i) {
      if (games[i] > 0) beta[i] -= mean;
    }
  }

  BtScores scores;
  scores.iterations = iterations;
  scores.converged = converged;
  scores.regularization = lambda;
  for (std::size_t i = 0; i < n; ++i) {
    scores.beta[corpus_ids[i]] = beta[i];
    if (games[i] <= 0) scores.zero_comparison_ids.push_back(corpus_ids[i]);
  }
  std::sort(scores.zero_comparison_ids.begin(),
            scores.zero_comparison_ids.end());
  scores.log_likelihood = objective();
  return scores;
}

// Descending by score; exact ties broken by ascending paper id.
inline std::vector<std::string> rank(const BtScores& scores) {
  std::vector<std::pair<std::string, double>> items(scores.beta.begin(),
                                                    scores.beta.end());
  std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  std::vector<std::string> out;
  out.reserve(items.size());
  for (auto& [id, b] : items) out.push_back(std::move(id));
  return out;
}

}  // namespace pairrank
