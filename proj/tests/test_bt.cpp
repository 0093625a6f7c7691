#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "pairrank/bt.hpp"
#include "pairrank/judges.hpp"
#include "pairrank/metrics.hpp"
#include "pairrank/scheduler.hpp"

using namespace pairrank;

namespace {

ComparisonRecord rec(const std::string& w, const std::string& l,
                     JudgmentStatus status = JudgmentStatus::valid) {
  ComparisonRecord r;
  r.assignment_id = "t";
  r.winner = w;
  r.loser = l;
  r.judge_id = "test";
  r.status = status;
  return r;
}

std::vector<ComparisonRecord> repeat(
    std::initializer_list<std::pair<std::pair<const char*, const char*>, int>>
        spec) {
  std::vector<ComparisonRecord> out;
  for (const auto& [pair, count] : spec) {
    for (int i = 0; i < count; ++i) out.push_back(rec(pair.first, pair.second));
  }
  return out;
}

// Independent oracle: cyclic coordinate ascent by ternary search on the
// regularized objective, which it evaluates from scratch. The objective is
// strictly concave for lambda > 0, so coordinate-wise maximization reaches
// the global maximizer. Deliberately shares no code with fit().
std::map<std::string, double> oracle_fit(
    const std::vector<ComparisonRecord>& comparisons,
    const std::vector<std::string>& ids, double lambda) {
  auto objective = [&](const std::map<std::string, double>& beta) {
    double f = 0.0;
    for (const auto& r : comparisons) {
      if (r.status == JudgmentStatus::invalid) continue;
      const double d = beta.at(r.winner) - beta.at(r.loser);
      f += -std::log(1.0 + std::exp(-d));
    }
    for (const auto& [id, b] : beta) f -= 0.5 * lambda * b * b;
    return f;
  };
  std::map<std::string, double> beta;
  for (const auto& id : ids) beta[id] = 0.0;
  for (int sweep = 0; sweep < 300; ++sweep) {
    double moved = 0.0;
    for (const auto& id : ids) {
      const double before = beta[id];
      double lo = -20.0;
      double hi = 20.0;
      for (int it = 0; it < 100; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        beta[id] = m1;
        const double f1 = objective(beta);
        beta[id] = m2;
        const double f2 = objective(beta);
        if (f1 < f2) {
          lo = m1;
        } else {
          hi = m2;
        }
      }
      beta[id] = 0.5 * (lo + hi);
      moved = std::max(moved, std::abs(beta[id] - before));
    }
    // the likelihood is translation-invariant and the penalty is minimized
    // at mean zero, so re-centering is an exact ascent step; it removes the
    // slow translation mode from the coordinate sweep and doubles as the
    // fitter's normalization
    double mean = 0.0;
    for (const auto& [id, b] : beta) mean += b;
    mean /= static_cast<double>(beta.size());
    for (auto& [id, b] : beta) b -= mean;
    if (moved < 1e-11) break;
  }
  return beta;
}

}  // namespace

TEST_CASE("bt_probability") {
  CHECK(bt_probability(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bt_probability(std::log(3.0), 0) ==
        doctest::Approx(0.75).epsilon(1e-12));
  // high-precision logistic oracle: sigma(3) = 0.9525741268224332...
  CHECK(bt_probability(2, -1) ==
        doctest::Approx(0.9525741268224332).epsilon(1e-14));
  CHECK(bt_probability(700, 0) > 0.0);
  CHECK(bt_probability(-700, 0) > 0.0);
  CHECK(bt_probability(-700, 0) < 1e-300);
  CHECK_THROWS_AS(bt_probability(std::nan(""), 0), ValidationError);
  CHECK_THROWS_AS(bt_probability(0, INFINITY), ValidationError);
}

TEST_CASE("bt_probability translation invariance") {
  for (double c : {-3.0, 0.5, 10.0, 123.0}) {
    for (double bi : {-2.0, 0.0, 1.7}) {
      for (double bj : {-1.0, 0.3}) {
        CHECK(std::abs(bt_probability(bi + c, bj + c) -
                       bt_probability(bi, bj)) < 1e-12);
      }
    }
  }
}

TEST_CASE("log_likelihood examples") {
  std::map<std::string, double> beta{{"A", 0.0}, {"B", 0.0}};
  SUBCASE("single symmetric record") {
    auto comps = repeat({{{"A", "B"}, 1}});
    CHECK(log_likelihood(beta, comps, 0.0) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-12));
  }
  SUBCASE("empty set") { CHECK(log_likelihood(beta, {}, 0.0) == 0.0); }
  SUBCASE("additivity over two symmetric records") {
    auto comps = repeat({{{"A", "B"}, 1}, {{"B", "A"}, 1}});
    CHECK(log_likelihood(beta, comps, 0.0) ==
          doctest::Approx(2 * std::log(0.5)).epsilon(1e-12));
  }
  SUBCASE("missing entry is an error") {
    auto comps = repeat({{{"A", "C"}, 1}});
    CHECK_THROWS_AS(log_likelihood(beta, comps, 0.0), ValidationError);
  }
  SUBCASE("regularization term") {
    std::map<std::string, double> b2{{"A", 1.0}, {"B", -1.0}};
    CHECK(log_likelihood(b2, {}, 0.0) == 0.0);
    CHECK(log_likelihood(b2, {}, 0.5) == doctest::Approx(-0.5).epsilon(1e-12));
  }
}

TEST_CASE("fit on symmetric data gives zero scores") {
  auto comps = repeat({{{"A", "B"}, 1}, {{"B", "A"}, 1}});
  auto scores = fit(comps, {"A", "B"}, FitConfig{.regularization = 0.0});
  CHECK(std::abs(scores.beta.at("A")) < 1e-6);
  CHECK(std::abs(scores.beta.at("B")) < 1e-6);
  CHECK(scores.converged);
  CHECK(scores.zero_comparison_ids.empty());
}

TEST_CASE("fit matches the brute-force oracle on reference instances") {
  FitConfig cfg;  // lambda = 0.01
  SUBCASE("A>Bx2 B>Cx2 A>Cx2") {
    auto comps = repeat({{{"A", "B"}, 2}, {{"B", "C"}, 2}, {{"A", "C"}, 2}});
    auto scores = fit(comps, {"A", "B", "C"}, cfg);
    auto oracle = oracle_fit(comps, {"A", "B", "C"}, cfg.regularization);
    for (const auto* id : {"A", "B", "C"}) {
      CHECK(std::abs(scores.beta.at(id) - oracle.at(id)) < 1e-3);
    }
    CHECK(scores.beta.at("A") > scores.beta.at("B"));
    CHECK(scores.beta.at("B") > scores.beta.at("C"));
    // stationarity cross-check at the documented 1e-3 tolerance: the exact
    // optimum is (t, 0, -t) with t = 3.9300388269794
    CHECK(std::abs(scores.beta.at("A") - 3.9300388269794) < 1e-3);
    CHECK(std::abs(scores.beta.at("B")) < 1e-3);
    CHECK(rank(scores) == std::vector<std::string>{"A", "B", "C"});
  }
  SUBCASE("A>Bx3 A>Cx3 B>Cx1 C>Bx1") {
    auto comps = repeat(
        {{{"A", "B"}, 3}, {{"A", "C"}, 3}, {{"B", "C"}, 1}, {{"C", "B"}, 1}});
    auto scores = fit(comps, {"A", "B", "C"}, cfg);
    auto oracle = oracle_fit(comps, {"A", "B", "C"}, cfg.regularization);
    for (const auto* id : {"A", "B", "C"}) {
      CHECK(std::abs(scores.beta.at(id) - oracle.at(id)) < 1e-3);
    }
    CHECK(scores.beta.at("B") ==
          doctest::Approx(scores.beta.at("C")).epsilon(1e-9));
    CHECK(scores.beta.at("A") > scores.beta.at("B"));
    // stationarity cross-check: (3.4376057419103, -1.7188028709552 x2).
    // The B-C direction is nearly flat (curvature ~ lambda), so the
    // objective-change stop resolves parameters only to ~sqrt(tol/lambda).
    CHECK(std::abs(scores.beta.at("A") - 3.4376057419103) < 1e-3);
  }
}

TEST_CASE("fit centers to mean zero and covers the whole corpus") {
  auto comps = repeat({{{"A", "B"}, 5}, {{"B", "C"}, 2}});
  auto scores = fit(comps, {"A", "B", "C", "D"});
  double mean = 0.0;
  for (const auto& [id, b] : scores.beta) mean += b;
  mean /= 4.0;
  CHECK(std::abs(mean) < 1e-9);
  CHECK(scores.beta.size() == 4);
  CHECK(scores.beta.at("D") == 0.0);
  CHECK(scores.zero_comparison_ids == std::vector<std::string>{"D"});
}

TEST_CASE("invalid records never alter the fit") {
  auto comps = repeat({{{"A", "B"}, 4}, {{"B", "C"}, 3}, {{"C", "A"}, 2}});
  auto scores = fit(comps, {"A", "B", "C"});
  auto polluted = comps;
  polluted.push_back(rec("C", "A", JudgmentStatus::invalid));
  polluted.push_back(rec("B", "A", JudgmentStatus::invalid));
  auto scores2 = fit(polluted, {"A", "B", "C"});
  CHECK(scores == scores2);
}

TEST_CASE("fit error contracts") {
  CHECK_THROWS_AS(fit({}, {}), ValidationError);
  CHECK_THROWS_AS(fit(repeat({{{"A", "X"}, 1}}), {"A", "B"}), ValidationError);
  CHECK_THROWS_AS(fit({}, {"A", "A"}), ValidationError);
  auto scores = fit({}, {"A", "B"});
  CHECK(scores.beta.at("A") == 0.0);
  CHECK(scores.zero_comparison_ids.size() == 2);
}

TEST_CASE("lambda=0 with an all-win paper terminates unconverged") {
  auto comps = repeat({{{"A", "B"}, 3}});
  FitConfig cfg;
  cfg.regularization = 0.0;
  cfg.max_iterations = 50;
  auto scores = fit(comps, {"A", "B"}, cfg);
  CHECK_FALSE(scores.converged);
  CHECK(scores.iterations == 50);
  CHECK(scores.beta.at("A") > scores.beta.at("B"));
  CHECK(std::isfinite(scores.beta.at("A")));
  CHECK(std::isfinite(scores.log_likelihood));
}

TEST_CASE("monotone ascent of the regularized objective") {
  auto comps = repeat({{{"A", "B"}, 7},
                       {{"B", "C"}, 4},
                       {{"C", "A"}, 1},
                       {{"C", "D"}, 2},
                       {{"D", "A"}, 1}});
  double prev = -INFINITY;
  bool monotone = true;
  fit(comps, {"A", "B", "C", "D"}, FitConfig{},
      [&](long, double objective) {
        if (objective < prev - 1e-12) monotone = false;
        prev = objective;
      });
  CHECK(monotone);
}

TEST_CASE("label-flip antisymmetry") {
  auto comps = repeat(
      {{{"A", "B"}, 5}, {{"B", "C"}, 3}, {{"A", "C"}, 1}, {{"C", "A"}, 2}});
  FitConfig cfg;
  auto scores = fit(comps, {"A", "B", "C"}, cfg);
  auto flipped = comps;
  for (auto& r : flipped) std::swap(r.winner, r.loser);
  auto scores_f = fit(flipped, {"A", "B", "C"}, cfg);
  // The stop rule bounds the objective change, so each fit resolves
  // parameters to sqrt(2 tol / lambda); allow both fits' slack.
  const double slack =
      2 * std::sqrt(2 * cfg.tolerance / cfg.regularization);
  for (const auto* id : {"A", "B", "C"}) {
    CHECK(std::abs(scores.beta.at(id) + scores_f.beta.at(id)) < slack);
  }
}

TEST_CASE("permutation equivariance") {
  auto comps = repeat({{{"A", "B"}, 5}, {{"B", "C"}, 3}, {{"A", "C"}, 2}});
  auto scores = fit(comps, {"A", "B", "C"});
  auto renamed = comps;
  auto swap_name = [](std::string& s) {
    if (s == "A") s = "Z";
  };
  for (auto& r : renamed) {
    swap_name(r.winner);
    swap_name(r.loser);
  }
  auto scores_r = fit(renamed, {"Z", "B", "C"});
  CHECK(scores.beta.at("A") ==
        doctest::Approx(scores_r.beta.at("Z")).epsilon(1e-12));
  CHECK(scores.beta.at("B") ==
        doctest::Approx(scores_r.beta.at("B")).epsilon(1e-12));
  CHECK(scores.beta.at("C") ==
        doctest::Approx(scores_r.beta.at("C")).epsilon(1e-12));
}

TEST_CASE("oracle equivalence on randomized small instances") {
  // >= 50 instances with N <= 4 and <= 12 comparisons
  SplitMix64 rng(20240831);
  int instances = 0;
  while (instances < 60) {
    const std::size_t n = 2 + rng.uniform_below(3);  // 2..4 papers
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back(std::string(1, static_cast<char>('A' + i)));
    }
    const std::size_t m = 1 + rng.uniform_below(12);
    std::vector<ComparisonRecord> comps;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t w = rng.uniform_below(n);
      const std::size_t l = rng.uniform_below(n);
      if (w == l) continue;
      comps.push_back(rec(ids[w], ids[l]));
    }
    if (comps.empty()) continue;
    ++instances;
    FitConfig cfg;
    auto scores = fit(comps, ids, cfg);
    auto oracle = oracle_fit(comps, ids, cfg.regularization);
    for (const auto& id : ids) {
      CHECK(std::abs(scores.beta.at(id) - oracle.at(id)) < 1e-3);
    }
  }
}

TEST_CASE("rank ordering and tiebreak") {
  BtScores s;
  s.beta = {{"a", 1.0}, {"b", -1.0}};
  CHECK(rank(s) == std::vector<std::string>{"a", "b"});
  s.beta = {{"b", 0.0}, {"a", 0.0}};
  CHECK(rank(s) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("consistency under the well-specified simulator") {
  // N=50, unit-spread qualities, noise_scale 1, M=200k -> Spearman >= 0.95
  testutil::CorpusOptions opt;
  opt.n = 50;
  opt.seed = 7;
  auto papers = testutil::make_corpus(opt);
  SyntheticJudgeConfig jc;
  jc.noise_scale = 1.0;
  for (const auto& p : papers) jc.quality[p.id] = *p.human_rating;
  SyntheticJudge judge(jc, papers);
  ScheduleConfig sc{.master_seed = 11, .budget = 200000, .corpus_size = 50};
  auto assignments = sample_assignments(sc, papers);
  auto records = run_judging(assignments, judge, 4);
  std::vector<std::string> ids;
  for (const auto& p : papers) ids.push_back(p.id);
  auto scores = fit(records, ids);
  std::map<std::string, double> beta(scores.beta.begin(), scores.beta.end());
  std::map<std::string, double> theta;
  for (const auto& p : papers) theta[p.id] = *p.human_rating;
  CHECK(spearman(beta, theta) >= 0.95);
}
