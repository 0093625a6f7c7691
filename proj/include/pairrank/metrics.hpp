#pragma once
// Decision-evaluation metrics: agreement tables, citation statistics with
// seeded bootstrap intervals, per-area acceptance rates, nearest-neighbor
// novelty, Gini concentration, Spearman correlation, and the Mann-Whitney
// significance test. All pure functions; bootstrap draws are counter-based
// so results are deterministic given (data, resamples, seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pairrank/errors.hpp"
#include "pairrank/rng.hpp"
#include "pairrank/types.hpp"

namespace pairrank {

struct ConfusionTable {
  std::vector<std::string> labels;                 // tier order, best first
  std::vector<std::vector<std::int64_t>> counts;   // rows = human, cols = system

  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& row : counts) {
      for (std::int64_t c : row) t += c;
    }
    return t;
  }
};

struct MetricReport {
  std::string name;
  double value = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

struct BootstrapConfig {
  std::size_t resamples = 10000;
  std::uint64_t seed = 0;
};

struct AreaRate {
  std::string area;
  std::size_t accepted = 0;
  std::size_t total = 0;
  double rate = 0.0;
};

// counts[r][c] = number of papers with human tier r and system tier c.
inline ConfusionTable confusion_table(
    const std::map<std::string, std::string>& human,
    const std::map<std::string, std::string>& system,
    const std::vector<std::string>& tier_order) {
  if (human.size() != system.size()) {
    throw ValidationError("confusion_table: decision maps differ in size");
  }
  std::unordered_map<std::string, std::size_t> label_index;
  for (std::size_t i = 0; i < tier_order.size(); ++i) {
    label_index[tier_order[i]] = i;
  }
  ConfusionTable table;
  table.labels = tier_order;
  table.counts.assign(tier_order.size(),
                      std::vector<std::int64_t>(tier_order.size(), 0));
  for (const auto& [id, human_tier] : human) {
    auto sys_it = system.find(id);
    if (sys_it == system.end()) {
      throw ValidationError("confusion_table: paper missing from system: " + id);
    }
    auto r = label_index.find(human_tier);
    auto c = label_index.find(sys_it->second);
    if (r == label_index.end()) {
      throw ValidationError("confusion_table: unknown human tier: " + human_tier);
    }
    if (c == label_index.end()) {
      throw ValidationError("confusion_table: unknown system tier: " +
                            sys_it->second);
    }
    ++table.counts[r->second][c->second];
  }
  return table;
}

// Fraction of human-accepted papers also accepted by the system.
inline double acceptance_agreement(const ConfusionTable& table,
                                   const std::set<std::string>& accept_tiers) {
  std::int64_t both = 0;
  std::int64_t human_accepted = 0;
  for (std::size_t r = 0; r < table.labels.size(); ++r) {
    if (!accept_tiers.contains(table.labels[r])) continue;
    for (std::size_t c = 0; c < table.labels.size(); ++c) {
      human_accepted += table.counts[r][c];
      if (accept_tiers.contains(table.labels[c])) both += table.counts[r][c];
    }
  }
  for (const std::string& t : accept_tiers) {
    if (std::find(table.labels.begin(), table.labels.end(), t) ==
        table.labels.end()) {
      throw ValidationError("accept tier not in table labels: " + t);
    }
  }
  if (human_accepted == 0) {
    throw ValidationError("acceptance_agreement: no human-accepted papers");
  }
  return static_cast<double>(both) / static_cast<double>(human_accepted);
}

inline std::string format_confusion(const ConfusionTable& table) {
  std::size_t width = 12;
  for (const std::string& l : table.labels) {
    width = std::max(width, l.size() + 2);
  }
  auto pad = [width](const std::string& s) {
    return s + std::string(s.size() < width ? width - s.size() : 1, ' ');
  };
  std::string out = pad("human\\system");
  for (const std::string& l : table.labels) out += pad(l);
  out += '\n';
  for (std::size_t r = 0; r < table.labels.size(); ++r) {
    out += pad(table.labels[r]);
    for (std::size_t c = 0; c < table.labels.size(); ++c) {
      out += pad(std::to_string(table.counts[r][c]));
    }
    out += '\n';
  }
  return out;
}

namespace detail {

// Linear-interpolation percentile over a sorted sample (R type 7).
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error("percentile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

enum BootstrapStream : std::uint64_t { kStreamBootstrap = 7 };

// Percentile bootstrap of a statistic; each resample draws from its own
// derived seed so a parallel evaluation would match the sequential one.
template <typename Stat>
std::pair<double, double> bootstrap_ci(const std::vector<double>& values,
                                       const BootstrapConfig& config,
                                       const Stat& stat) {
  std::vector<double> stats(config.resamples);
  std::vector<double> resample(values.size());
  for (std::size_t r = 0; r < config.resamples; ++r) {
    SplitMix64 rng(derive_seed(config.seed, r, kStreamBootstrap));
    for (std::size_t k = 0; k < values.size(); ++k) {
      resample[k] = values[rng.uniform_below(values.size())];
    }
    stats[r] = stat(resample);
  }
  std::sort(stats.begin(), stats.end());
  return {percentile_sorted(stats, 0.025), percentile_sorted(stats, 0.975)};
}

inline std::vector<double> citations_of(
    const std::vector<const PaperRecord*>& subset) {
  if (subset.empty()) {
    throw ValidationError("citation statistic over an empty subset");
  }
  std::vector<double> out;
  out.reserve(subset.size());
  for (const PaperRecord* p : subset) {
    if (!p->citations) {
      throw ValidationError("paper without citations: " + p->id);
    }
    out.push_back(static_cast<double>(*p->citations));
  }
  return out;
}

}  // namespace detail

inline MetricReport mean_citations(const std::vector<const PaperRecord*>& subset,
                                   const BootstrapConfig& bootstrap = {}) {
  const std::vector<double> values = detail::citations_of(subset);
  MetricReport report;
  report.name = "mean_citations";
  report.n = values.size();
  report.seed = bootstrap.seed;
  double sum = 0.0;
  for (double v : values) sum += v;
  report.value = sum / static_cast<double>(values.size());
  auto [lo, hi] = detail::bootstrap_ci(values, bootstrap, [](const std::vector<double>& s) {
    double t = 0.0;
    for (double v : s) t += v;
    return t / static_cast<double>(s.size());
  });
  report.ci_low = lo;
  report.ci_high = hi;
  return report;
}

inline MetricReport median_citations(
    const std::vector<const PaperRecord*>& subset,
    const BootstrapConfig& bootstrap = {}) {
  const std::vector<double> values = detail::citations_of(subset);
  MetricReport report;
  report.name = "median_citations";
  report.n = values.size();
  report.seed = bootstrap.seed;
  report.value = detail::median_of(values);
  auto [lo, hi] = detail::bootstrap_ci(
      values, bootstrap,
      [](const std::vector<double>& s) { return detail::median_of(s); });
  report.ci_low = lo;
  report.ci_high = hi;
  return report;
}

// Per-area accepted/total, sorted by rate descending for presentation
// (ties by area name).
inline std::vector<AreaRate> area_acceptance_rates(
    const std::map<std::string, std::string>& decisions,
    const std::vector<PaperRecord>& papers,
    const std::set<std::string>& accept_tiers) {
  std::map<std::string, AreaRate> by_area;
  for (const PaperRecord& p : papers) {
    if (!p.area) throw ValidationError("paper without area: " + p.id);
    auto it = decisions.find(p.id);
    if (it == decisions.end()) {
      throw ValidationError("paper missing from decisions: " + p.id);
    }
    AreaRate& ar = by_area[*p.area];
    ar.area = *p.area;
    ++ar.total;
    if (accept_tiers.contains(it->second)) ++ar.accepted;
  }
  std::vector<AreaRate> out;
  out.reserve(by_area.size());
  for (auto& [area, ar] : by_area) {
    ar.rate = static_cast<double>(ar.accepted) / static_cast<double>(ar.total);
    out.push_back(ar);
  }
  std::sort(out.begin(), out.end(), [](const AreaRate& x, const AreaRate& y) {
    if (x.rate != y.rate) return x.rate > y.rate;
    return x.area < y.area;
  });
  return out;
}

// Cosine distance 1 - (u.v)/(|u||v|), in [0, 2].
inline double cosine_distance(const std::vector<double>& u,
                              const std::vector<double>& v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine_distance: dimension mismatch");
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) {
    throw ValidationError("cosine_distance: zero-norm embedding");
  }
  return 1.0 - dot / (std::sqrt(nu) * std::sqrt(nv));
}

// Minimum cosine distance from the query to any pool member.
inline double nearest_neighbor_distance(
    const std::vector<double>& query,
    const std::vector<const std::vector<double>*>& pool) {
  if (pool.empty()) {
    throw ValidationError("nearest_neighbor_distance: empty pool");
  }
  double best = 2.0;
  for (const std::vector<double>* v : pool) {
    best = std::min(best, cosine_distance(query, *v));
  }
  return best;
}

// Gini concentration of grouped counts: the normalized mean absolute
// difference sum_ij |x_i - x_j| / (2 n sum_i x_i), computed with the
// equivalent sorted form.
inline double gini(const std::vector<std::int64_t>& counts) {
  if (counts.empty()) throw ValidationError("gini of empty counts");
  std::vector<std::int64_t> sorted = counts;
  std::int64_t total = 0;
  for (std::int64_t c : sorted) {
    if (c < 0) throw ValidationError("gini: negative count");
    total += c;
  }
  if (total == 0) throw ValidationError("gini: all counts are zero");
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    weighted += (2.0 * static_cast<double>(i) - n + 1.0) *
                static_cast<double>(sorted[i]);
  }
  return weighted / (n * static_cast<double>(total));
}

inline double gini(const std::map<std::string, std::int64_t>& counts) {
  std::vector<std::int64_t> values;
  values.reserve(counts.size());
  for (const auto& [group, c] : counts) values.push_back(c);
  return gini(values);
}

// Share of the total held by the k largest groups.
inline double share_of_top_k(const std::map<std::string, std::int64_t>& counts,
                             std::size_t k) {
  std::vector<std::int64_t> values;
  values.reserve(counts.size());
  std::int64_t total = 0;
  for (const auto& [group, c] : counts) {
    if (c < 0) throw ValidationError("share_of_top_k: negative count");
    values.push_back(c);
    total += c;
  }
  if (total == 0) throw ValidationError("share_of_top_k: all counts are zero");
  std::sort(values.begin(), values.end(), std::greater<>());
  std::int64_t top = 0;
  for (std::size_t i = 0; i < values.size() && i < k; ++i) top += values[i];
  return static_cast<double>(top) / static_cast<double>(total);
}

namespace detail {

// Average ranks (1-based) with ties sharing their mean rank.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

// Spearman rank correlation with average-rank tie handling.
inline double spearman(const std::map<std::string, double>& x,
                       const std::map<std::string, double>& y) {
  if (x.size() != y.size()) {
    throw ValidationError("spearman: id sets differ in size");
  }
  if (x.size() < 2) {
    throw ValidationError("spearman requires at least 2 observations");
  }
  std::vector<double> xv;
  std::vector<double> yv;
  xv.reserve(x.size());
  yv.reserve(x.size());
  for (const auto& [id, value] : x) {
    auto it = y.find(id);
    if (it == y.end()) throw ValidationError("spearman: id missing: " + id);
    xv.push_back(value);
    yv.push_back(it->second);
  }
  const std::vector<double> rx = detail::average_ranks(xv);
  const std::vector<double> ry = detail::average_ranks(yv);
  const double n = static_cast<double>(rx.size());
  double mean = (n + 1.0) / 2.0;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ValidationError("spearman undefined: an argument is constant");
  }
  return sxy / std::sqrt(sxx * syy);
}

// Two-sided Mann-Whitney U p-value via the tie-corrected normal
// approximation. Degenerate all-tied data has zero variance and returns 1.
inline double mann_whitney_p(const std::vector<double>& group_a,
                             const std::vector<double>& group_b) {
  if (group_a.empty() || group_b.empty()) {
    throw ValidationError("mann_whitney_p: empty group");
  }
  const double n1 = static_cast<double>(group_a.size());
  const double n2 = static_cast<double>(group_b.size());
  std::vector<double> pooled;
  pooled.reserve(group_a.size() + group_b.size());
  pooled.insert(pooled.end(), group_a.begin(), group_a.end());
  pooled.insert(pooled.end(), group_b.begin(), group_b.end());
  const std::vector<double> ranks = detail::average_ranks(pooled);
  double r1 = 0.0;
  for (std::size_t i = 0; i < group_a.size(); ++i) r1 += ranks[i];
  const double u1 = r1 - n1 * (n1 + 1.0) / 2.0;
  const double mu = n1 * n2 / 2.0;
  const double n = n1 + n2;

  // tie correction: sum of (t^3 - t) over tie groups
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double variance =
      n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (variance <= 0.0) return 1.0;
  const double z = (u1 - mu) / std::sqrt(variance);
  const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
  return std::min(p, 1.0);
}

}  // namespace pairrank
