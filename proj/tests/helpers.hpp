#pragma once
// Shared test utilities: synthetic corpus construction and scratch dirs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pairrank/rng.hpp"
#include "pairrank/types.hpp"

namespace testutil {

struct CorpusOptions {
  std::size_t n = 100;
  std::uint64_t seed = 1;
  double quality_mean = 0.0;
  double quality_spread = 1.0;
  std::size_t num_areas = 0;          // 0 = no areas
  std::size_t num_institutions = 0;   // 0 = no institutions
  double human_noise = 0.0;           // noise on the human tier proxy
  std::vector<std::pair<std::string, std::size_t>> human_tiers;  // optional
  bool with_citations = false;
  std::size_t embedding_dim = 0;      // 0 = no embeddings
};

// Papers with latent quality stored in human_rating. Human decisions, when
// tiers are given, select by quality + human_noise * gaussian, which makes
// the human side an unbiased but imperfect reference.
inline std::vector<pairrank::PaperRecord> make_corpus(const CorpusOptions& opt) {
  using pairrank::SplitMix64;
  using pairrank::derive_seed;
  std::vector<pairrank::PaperRecord> papers(opt.n);
  std::vector<double> quality(opt.n);
  for (std::size_t i = 0; i < opt.n; ++i) {
    SplitMix64 rng(derive_seed(opt.seed, i, 101));
    quality[i] = opt.quality_mean + opt.quality_spread * rng.gaussian();
    pairrank::PaperRecord& p = papers[i];
    char buf[32];
    std::snprintf(buf, sizeof(buf), "p%04zu", i);
    p.id = buf;
    p.title = "Paper " + std::to_string(i);
    p.abstract = "Abstract of paper " + std::to_string(i);
    p.captions = "Figure 1: results for paper " + std::to_string(i);
    p.main_text = "Main text of paper " + std::to_string(i);
    p.human_rating = quality[i];
    if (opt.num_areas > 0) {
      p.area = "area" + std::to_string(i % opt.num_areas);
    }
    if (opt.num_institutions > 0) {
      SplitMix64 inst_rng(derive_seed(opt.seed, i, 102));
      p.institution =
          "inst" + std::to_string(inst_rng.uniform_below(opt.num_institutions));
    }
    if (opt.with_citations) {
      SplitMix64 cit_rng(derive_seed(opt.seed, i, 103));
      const double latent = quality[i] + 0.3 * cit_rng.gaussian();
      p.citations = static_cast<std::int64_t>(
          std::llround(std::exp(1.5 + 0.8 * latent)));
    }
    if (opt.embedding_dim > 0) {
      SplitMix64 emb_rng(derive_seed(opt.seed, i, 104));
      std::vector<double> e(opt.embedding_dim);
      for (double& x : e) x = emb_rng.gaussian();
      p.embedding = std::move(e);
    }
  }
  if (!opt.human_tiers.empty()) {
    std::vector<std::size_t> order(opt.n);
    for (std::size_t i = 0; i < opt.n; ++i) order[i] = i;
    std::vector<double> proxy(opt.n);
    for (std::size_t i = 0; i < opt.n; ++i) {
      SplitMix64 rng(derive_seed(opt.seed, i, 105));
      proxy[i] = quality[i] + opt.human_noise * rng.gaussian();
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (proxy[a] != proxy[b]) return proxy[a] > proxy[b];
      return a < b;
    });
    std::size_t pos = 0;
    for (const auto& [label, count] : opt.human_tiers) {
      for (std::size_t k = 0; k < count && pos < opt.n; ++k) {
        papers[order[pos++]].human_decision = label;
      }
    }
  }
  return papers;
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "pairrank_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
