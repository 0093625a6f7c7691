#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "pairrank/io.hpp"
#include "pairrank/rng.hpp"

using namespace pairrank;

TEST_CASE("validate_corpus") {
  SUBCASE("empty corpus is valid") { CHECK(validate_corpus({}).empty()); }
  SUBCASE("duplicate ids are reported") {
    PaperRecord a;
    a.id = "p1";
    PaperRecord b;
    b.id = "p1";
    auto report = validate_corpus({a, b});
    REQUIRE(report.size() == 1);
    CHECK(report[0].kind == ViolationKind::duplicate_id);
  }
  SUBCASE("embedding dimension mismatch") {
    PaperRecord a;
    a.id = "p1";
    a.embedding = std::vector<double>(8, 0.5);
    PaperRecord b;
    b.id = "p2";
    b.embedding = std::vector<double>(16, 0.5);
    auto report = validate_corpus({a, b});
    REQUIRE(report.size() == 1);
    CHECK(report[0].kind == ViolationKind::embedding_dim_mismatch);
    CHECK(report[0].paper_id == "p2");
  }
  SUBCASE("negative citations") {
    PaperRecord a;
    a.id = "p1";
    a.citations = -3;
    auto report = validate_corpus({a});
    REQUIRE(report.size() == 1);
    CHECK(report[0].kind == ViolationKind::negative_citations);
  }
  SUBCASE("empty id") {
    PaperRecord a;
    auto report = validate_corpus({a});
    REQUIRE(report.size() == 1);
    CHECK(report[0].kind == ViolationKind::empty_id);
  }
  SUBCASE("valid corpus with mixed optional fields") {
    testutil::CorpusOptions opt;
    opt.n = 20;
    opt.num_areas = 3;
    opt.with_citations = true;
    opt.embedding_dim = 4;
    CHECK(validate_corpus(testutil::make_corpus(opt)).empty());
  }
}

TEST_CASE("papers.jsonl round-trip preserves every field") {
  auto dir = testutil::scratch_dir("io_papers");
  testutil::CorpusOptions opt;
  opt.n = 25;
  opt.num_areas = 4;
  opt.num_institutions = 5;
  opt.with_citations = true;
  opt.embedding_dim = 6;
  opt.human_tiers = {{"Accept", 8}, {"Reject", 17}};
  auto papers = testutil::make_corpus(opt);
  // exercise missing optionals and empty main_text (withdrawn papers)
  papers[3].area.reset();
  papers[3].citations.reset();
  papers[3].embedding.reset();
  papers[7].main_text.clear();
  papers[9].human_rating.reset();

  write_papers(dir / "papers.jsonl", papers);
  auto loaded = read_papers(dir / "papers.jsonl");
  CHECK(loaded == papers);
}

TEST_CASE("absent optional fields are omitted, not null") {
  PaperRecord p;
  p.id = "x";
  p.title = "t";
  const json j = to_json(p);
  CHECK_FALSE(j.contains("area"));
  CHECK_FALSE(j.contains("citations"));
  CHECK_FALSE(j.contains("embedding"));
  const std::string dumped = j.dump();
  CHECK(dumped.find("null") == std::string::npos);
}

TEST_CASE("assignments round-trip including 64-bit seeds") {
  auto dir = testutil::scratch_dir("io_assignments");
  std::vector<PairAssignment> assignments;
  for (int i = 0; i < 40; ++i) {
    PairAssignment a;
    a.assignment_id = "a" + std::to_string(i);
    a.first = "p1";
    a.second = "p2";
    a.seed = mix64(static_cast<std::uint64_t>(i) * kGoldenGamma);
    assignments.push_back(a);
  }
  write_assignments(dir / "assignments.jsonl", assignments);
  CHECK(read_assignments(dir / "assignments.jsonl") == assignments);
}

TEST_CASE("comparisons round-trip with invalid records and raw responses") {
  auto dir = testutil::scratch_dir("io_comparisons");
  std::vector<ComparisonRecord> records;
  ComparisonRecord r;
  r.assignment_id = "a0";
  r.winner = "p1";
  r.loser = "p2";
  r.judge_id = "synthetic";
  records.push_back(r);
  r.assignment_id = "a1";
  r.status = JudgmentStatus::invalid;
  r.raw_response = "I cannot choose";
  records.push_back(r);
  write_comparisons(dir / "comparisons.jsonl", records);
  CHECK(read_comparisons(dir / "comparisons.jsonl") == records);
}

TEST_CASE("decision rows round-trip") {
  auto dir = testutil::scratch_dir("io_decisions");
  std::vector<DecisionRow> rows;
  DecisionRow d;
  d.id = "p1";
  d.tier = "Oral";
  d.rank = 0;
  d.area = "ml";
  d.human_decision = "Poster";
  rows.push_back(d);
  DecisionRow e;
  e.id = "p2";
  e.tier = "Reject";
  e.rank = 1;
  rows.push_back(e);
  write_decisions(dir / "decisions.jsonl", rows);
  CHECK(read_decisions(dir / "decisions.jsonl") == rows);
}

TEST_CASE("scores round-trip with diagnostics") {
  auto dir = testutil::scratch_dir("io_scores");
  BtScores s;
  s.beta = {{"a", 0.5}, {"b", -0.25}, {"c", -0.25}};
  s.log_likelihood = -12.345678901234;
  s.iterations = 321;
  s.converged = true;
  s.regularization = 0.01;
  s.zero_comparison_ids = {"c"};
  write_scores(dir / "scores.json", s);
  CHECK(read_scores(dir / "scores.json") == s);
}

TEST_CASE("meta line is written and skipped on read") {
  auto dir = testutil::scratch_dir("io_meta");
  RunMeta meta{"deadbeef00000000", 42};
  std::vector<PairAssignment> assignments(1);
  assignments[0].assignment_id = "a0";
  assignments[0].first = "p1";
  assignments[0].second = "p2";
  assignments[0].seed = 7;
  write_assignments(dir / "a.jsonl", assignments, &meta);

  std::ifstream in(dir / "a.jsonl");
  std::string first_line;
  std::getline(in, first_line);
  CHECK(first_line.find("_meta") != std::string::npos);
  CHECK(first_line.find("deadbeef00000000") != std::string::npos);

  CHECK(read_assignments(dir / "a.jsonl") == assignments);
}

TEST_CASE("malformed jsonl reports file and line") {
  auto dir = testutil::scratch_dir("io_bad");
  {
    std::ofstream out(dir / "bad.jsonl");
    out << R"({"id":"p1","title":"t","abstract":"","captions":"","main_text":""})"
        << "\n";
    out << "not json\n";
  }
  CHECK_THROWS_WITH_AS(read_papers(dir / "bad.jsonl"),
                       doctest::Contains("bad.jsonl:2"), ValidationError);
  CHECK_THROWS_AS(read_papers(dir / "does_not_exist.jsonl"), ValidationError);
}
