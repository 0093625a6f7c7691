#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "pairrank/scheduler.hpp"

using namespace pairrank;

namespace {

std::vector<PaperRecord> tiny_corpus(std::size_t n) {
  testutil::CorpusOptions opt;
  opt.n = n;
  return testutil::make_corpus(opt);
}

}  // namespace

TEST_CASE("pair decode is a bijection over all unordered pairs") {
  for (std::size_t n : {2u, 3u, 7u, 20u, 53u}) {
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::uint64_t k = 0; k < total; ++k) {
      auto [i, j] = pairrank::detail::decode_pair(k, n);
      CHECK(i < j);
      CHECK(j < n);
      CHECK(seen.insert({i, j}).second);
    }
    CHECK(seen.size() == total);
  }
}

TEST_CASE("sample_assignments basics") {
  SUBCASE("N=2 produces the single unordered pair") {
    auto papers = tiny_corpus(2);
    ScheduleConfig cfg{.master_seed = 7, .budget = 5, .corpus_size = 2};
    auto assignments = sample_assignments(cfg, papers);
    REQUIRE(assignments.size() == 5);
    for (const auto& a : assignments) {
      std::set<std::string> pair{a.first, a.second};
      CHECK(pair == std::set<std::string>{"p0000", "p0001"});
      CHECK(a.first != a.second);
    }
  }
  SUBCASE("corpus smaller than 2 is an error") {
    auto papers = tiny_corpus(1);
    ScheduleConfig cfg{.master_seed = 7, .budget = 5, .corpus_size = 1};
    CHECK_THROWS_AS(sample_assignments(cfg, papers), ValidationError);
  }
  SUBCASE("zero budget is fine") {
    auto papers = tiny_corpus(4);
    ScheduleConfig cfg{.master_seed = 7, .budget = 0, .corpus_size = 4};
    CHECK(sample_assignments(cfg, papers).empty());
  }
  SUBCASE("assignment ids are unique and seeds differ") {
    auto papers = tiny_corpus(5);
    ScheduleConfig cfg{.master_seed = 9, .budget = 200, .corpus_size = 5};
    auto assignments = sample_assignments(cfg, papers);
    std::set<std::string> ids;
    std::set<std::uint64_t> seeds;
    for (const auto& a : assignments) {
      ids.insert(a.assignment_id);
      seeds.insert(a.seed);
      CHECK(a.first != a.second);
    }
    CHECK(ids.size() == assignments.size());
    CHECK(seeds.size() == assignments.size());
  }
}

TEST_CASE("sampling is deterministic in (config, corpus order)") {
  auto papers = tiny_corpus(10);
  ScheduleConfig cfg{.master_seed = 42, .budget = 1000, .corpus_size = 10};
  auto a = sample_assignments(cfg, papers);
  auto b = sample_assignments(cfg, papers);
  CHECK(a == b);
  cfg.master_seed = 43;
  CHECK(sample_assignments(cfg, papers) != a);
}

TEST_CASE("N=3 pair frequencies stay within the binomial 3-sigma band") {
  // M=30000 over 3 pairs: expectation 10000, 3 sigma ~ 245; also assert
  // the looser documented band of 300.
  auto papers = tiny_corpus(3);
  ScheduleConfig cfg{.master_seed = 1234, .budget = 30000, .corpus_size = 3};
  auto assignments = sample_assignments(cfg, papers);
  REQUIRE(assignments.size() == 30000);
  std::map<std::set<std::string>, int> counts;
  for (const auto& a : assignments) counts[{a.first, a.second}]++;
  REQUIRE(counts.size() == 3);
  const double three_sigma = 3.0 * std::sqrt(30000.0 * (1.0 / 3) * (2.0 / 3));
  for (const auto& [pair, count] : counts) {
    CHECK(std::abs(count - 10000.0) <= three_sigma);
    CHECK(std::abs(count - 10000.0) <= 300.0);
  }
}

TEST_CASE("orientation is a fair coin per pair") {
  auto papers = tiny_corpus(3);
  ScheduleConfig cfg{.master_seed = 99, .budget = 30000, .corpus_size = 3};
  auto assignments = sample_assignments(cfg, papers);
  std::map<std::set<std::string>, std::pair<int, int>> orient;
  for (const auto& a : assignments) {
    auto& [total, first_is_min] = orient[{a.first, a.second}];
    ++total;
    if (a.first < a.second) ++first_is_min;
  }
  for (const auto& [pair, stats] : orient) {
    const auto [total, first_is_min] = stats;
    const double sigma = std::sqrt(0.25 * total);
    CHECK(std::abs(first_is_min - 0.5 * total) <= 3.0 * sigma);
  }
}

TEST_CASE("chi-square uniformity over pair frequencies across seeds") {
  // N=6 -> 15 pairs, df=14; upper 0.001 critical value 36.1233. At most
  // 1% of seeds may reject (expected rejection rate is 0.1%).
  const std::size_t n = 6;
  const std::uint64_t m = 10000;
  const double critical = 36.1233;
  auto papers = tiny_corpus(n);
  const double k = static_cast<double>(n * (n - 1) / 2);
  int rejections = 0;
  const int num_seeds = 120;
  for (int seed = 0; seed < num_seeds; ++seed) {
    ScheduleConfig cfg{.master_seed = static_cast<std::uint64_t>(seed),
                       .budget = m,
                       .corpus_size = n};
    auto assignments = sample_assignments(cfg, papers);
    std::map<std::set<std::string>, int> counts;
    for (const auto& a : assignments) counts[{a.first, a.second}]++;
    const double expected = static_cast<double>(m) / k;
    double stat = 0.0;
    // pairs never drawn contribute their full expectation
    stat += (k - static_cast<double>(counts.size())) * expected;
    for (const auto& [pair, c] : counts) {
      stat += (c - expected) * (c - expected) / expected;
    }
    if (stat > critical) ++rejections;
  }
  CHECK(rejections <= num_seeds / 100);
}

TEST_CASE("recommended_budget matches the arithmetic oracle") {
  // ceil(12 n ln n); high-precision values computed independently
  CHECK(recommended_budget(2) == 17);
  CHECK(recommended_budget(3) == 40);
  CHECK(recommended_budget(7158) == 762412);
  CHECK_THROWS_AS(recommended_budget(1), ValidationError);
  CHECK_THROWS_AS(recommended_budget(0), ValidationError);
}
