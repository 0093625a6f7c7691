#pragma once
// Run orchestration behind the CLI: corpus ingestion, the sample / judge /
// fit / decide / evaluate stages, the end-to-end pipeline, and the scaling
// experiment. Every stage reads and writes files under config.output_dir
// and stamps them with the config hash and master seed.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pairrank/config.hpp"
#include "pairrank/decisions.hpp"
#include "pairrank/endpoint.hpp"
#include "pairrank/io.hpp"
#include "pairrank/judges.hpp"
#include "pairrank/metrics.hpp"
#include "pairrank/scheduler.hpp"

namespace pairrank {

// Diagnostic sink for progress lines and skip warnings; never written into
// result files.
using Diagnostics = std::function<void(const std::string&)>;

inline void diag(const Diagnostics& d, const std::string& msg) {
  if (d) d(msg);
}

namespace detail {

enum ExperimentStream : std::uint64_t {
  kStreamQuality = 11,
  kStreamRating = 12,
  kStreamRandomBaseline = 13,
  kStreamScaling = 14,
};

}  // namespace detail

struct OutputPaths {
  std::filesystem::path assignments;
  std::filesystem::path comparisons;
  std::filesystem::path scores;
  std::filesystem::path decisions;
  std::filesystem::path report;
  std::filesystem::path confusion_text;
  std::filesystem::path area_rates_csv;
  std::filesystem::path ratings_csv;
  std::filesystem::path scaling_csv;
};

inline OutputPaths output_paths(const ExperimentConfig& c) {
  OutputPaths p;
  p.assignments = c.output_dir / "assignments.jsonl";
  p.comparisons = c.output_dir / "comparisons.jsonl";
  p.scores = c.output_dir / "scores.json";
  p.decisions = c.output_dir / "decisions.jsonl";
  p.report = c.output_dir / "report.json";
  p.confusion_text = c.output_dir / "confusion.txt";
  p.area_rates_csv = c.output_dir / "area_rates.csv";
  p.ratings_csv = c.output_dir / "ratings.csv";
  p.scaling_csv = c.output_dir / "scaling.csv";
  return p;
}

// Loads the corpus and fails with the full violation list if it is invalid.
inline std::vector<PaperRecord> load_valid_corpus(const ExperimentConfig& c,
                                                  const Diagnostics& d = nullptr) {
  std::vector<PaperRecord> papers = read_papers(c.corpus_path);
  const std::vector<CorpusViolation> violations = validate_corpus(papers);
  if (!violations.empty()) {
    std::string msg = "invalid corpus (" + std::to_string(violations.size()) +
                      " violations):";
    for (const CorpusViolation& v : violations) {
      diag(d, "violation: " + v.message);
      msg += "\n  " + v.message;
    }
    throw ValidationError(msg);
  }
  return papers;
}

// Latent quality per paper, resolved from the configured source. The
// gaussian source is a deterministic function of (master_seed, corpus
// order).
inline std::unordered_map<std::string, double> resolve_quality(
    const QualitySourceConfig& source, const std::vector<PaperRecord>& papers,
    std::uint64_t master_seed) {
  std::unordered_map<std::string, double> out;
  out.reserve(papers.size());
  switch (source.kind) {
    case QualitySourceConfig::Kind::explicit_map:
      return source.values;
    case QualitySourceConfig::Kind::field: {
      std::vector<std::string> missing;
      for (const PaperRecord& p : papers) {
        if (!p.human_rating) {
          missing.push_back(p.id);
          continue;
        }
        out.emplace(p.id, *p.human_rating);
      }
      if (!missing.empty()) {
        throw ValidationError(
            "quality_source 'field' needs human_rating on every paper; " +
            std::to_string(missing.size()) + " missing (first: " + missing[0] +
            ")");
      }
      return out;
    }
    case QualitySourceConfig::Kind::gaussian: {
      for (std::size_t i = 0; i < papers.size(); ++i) {
        SplitMix64 rng(derive_seed(master_seed, i, detail::kStreamQuality));
        out.emplace(papers[i].id, source.mean + source.spread * rng.gaussian());
      }
      return out;
    }
  }
  throw Error("unreachable quality source kind");
}

inline std::vector<std::string> corpus_ids(
    const std::vector<PaperRecord>& papers) {
  std::vector<std::string> ids;
  ids.reserve(papers.size());
  for (const PaperRecord& p : papers) ids.push_back(p.id);
  return ids;
}

// Tier spec from config: explicit sizes, or the human decision histogram.
inline TierSpec resolve_tier_spec(const ExperimentConfig& c,
                                  const std::vector<PaperRecord>& papers) {
  if (c.tier.source == TierConfig::Source::from_human_distribution) {
    return derive_tier_spec(papers, c.tier.order);
  }
  TierSpec spec;
  spec.source = TierSource::explicit_spec;
  spec.tiers = c.tier.tiers;
  if (spec.tiers.empty()) {
    throw ValidationError("tier spec is empty; configure tiers");
  }
  return spec;
}

// Accept tiers: configured list, or every tier except the last.
inline std::set<std::string> resolve_accept_tiers(const ExperimentConfig& c,
                                                  const TierSpec& spec) {
  std::set<std::string> out;
  if (!c.accept_tiers.empty()) {
    out.insert(c.accept_tiers.begin(), c.accept_tiers.end());
    return out;
  }
  for (std::size_t i = 0; i + 1 < spec.tiers.size(); ++i) {
    out.insert(spec.tiers[i].first);
  }
  return out;
}

// ---------------------------------------------------------------------------
// sample

inline std::vector<PairAssignment> run_sample(const ExperimentConfig& c,
                                              const Diagnostics& d = nullptr) {
  const std::vector<PaperRecord> papers = load_valid_corpus(c, d);
  ScheduleConfig sc;
  sc.master_seed = c.master_seed;
  sc.budget = c.budget;
  sc.corpus_size = papers.size();
  std::vector<PairAssignment> assignments = sample_assignments(sc, papers);
  const RunMeta meta = run_meta(c);
  write_assignments(output_paths(c).assignments, assignments, &meta);
  diag(d, "sampled " + std::to_string(assignments.size()) + " assignments");
  return assignments;
}

// ---------------------------------------------------------------------------
// judge

namespace detail {

// Judges only the assignments absent from an existing comparisons file. On
// transport exhaustion the records completed so far are flushed to disk
// before the error propagates, so a rerun picks up where this one stopped.
template <typename Judge>
std::vector<ComparisonRecord> judge_resumable(
    const ExperimentConfig& c, const std::vector<PairAssignment>& assignments,
    const Judge& judge, const Diagnostics& d) {
  const std::filesystem::path out_path = output_paths(c).comparisons;
  std::unordered_map<std::string, ComparisonRecord> existing;
  if (std::filesystem::exists(out_path)) {
    for (ComparisonRecord& r : read_comparisons(out_path)) {
      existing.emplace(r.assignment_id, std::move(r));
    }
  }
  std::vector<PairAssignment> pending;
  pending.reserve(assignments.size());
  for (const PairAssignment& a : assignments) {
    if (!existing.contains(a.assignment_id)) pending.push_back(a);
  }
  if (!existing.empty()) {
    diag(d, "resuming: " + std::to_string(assignments.size() - pending.size()) +
                " already judged, " + std::to_string(pending.size()) +
                " remaining");
  }

  std::mutex sink_mutex;
  std::unordered_map<std::string, ComparisonRecord> completed;
  std::size_t logged = 0;
  const std::size_t step = std::max<std::size_t>(1, pending.size() / 10);
  const RecordSink sink = [&](std::size_t, const ComparisonRecord& r) {
    std::lock_guard<std::mutex> lock(sink_mutex);
    completed.emplace(r.assignment_id, r);
    if (completed.size() >= logged + step) {
      logged = completed.size();
      diag(d, "judged " + std::to_string(completed.size()) + "/" +
                  std::to_string(pending.size()));
    }
  };

  auto ordered_records = [&]() {
    std::vector<ComparisonRecord> ordered;
    ordered.reserve(assignments.size());
    for (const PairAssignment& a : assignments) {
      if (auto it = existing.find(a.assignment_id); it != existing.end()) {
        ordered.push_back(it->second);
      }
    }
    return ordered;
  };

  try {
    std::vector<ComparisonRecord> fresh =
        run_judging(pending, judge, c.concurrency, sink);
    for (ComparisonRecord& r : fresh) {
      existing.emplace(r.assignment_id, std::move(r));
    }
  } catch (const TransportError&) {
    for (auto& [id, r] : completed) existing.emplace(id, std::move(r));
    const RunMeta meta = run_meta(c);
    std::vector<ComparisonRecord> partial = ordered_records();
    write_comparisons(out_path, partial, &meta);
    diag(d, "transport failure; " + std::to_string(partial.size()) + "/" +
                std::to_string(assignments.size()) +
                " judged records saved for resume");
    throw;
  }

  std::vector<ComparisonRecord> ordered = ordered_records();
  if (ordered.size() != assignments.size()) {
    throw Error("judging finished with missing records");
  }
  return ordered;
}

}  // namespace detail

inline std::vector<ComparisonRecord> run_judge(const ExperimentConfig& c,
                                               const Diagnostics& d = nullptr) {
  const std::vector<PaperRecord> papers = load_valid_corpus(c, d);
  const std::vector<PairAssignment> assignments =
      read_assignments(output_paths(c).assignments);

  std::vector<ComparisonRecord> records;
  if (c.judge.kind == JudgeKind::synthetic) {
    SyntheticJudgeConfig jc;
    jc.quality = resolve_quality(c.judge.quality, papers, c.master_seed);
    jc.noise_scale = c.judge.noise_scale;
    jc.area_bias = c.judge.area_bias;
    jc.institution_bias = c.judge.institution_bias;
    records = detail::judge_resumable(c, assignments,
                                      SyntheticJudge(std::move(jc), papers), d);
  } else if (c.judge.kind == JudgeKind::endpoint) {
    records = detail::judge_resumable(c, assignments,
                                      EndpointJudge(c.judge.endpoint, papers), d);
  } else {
    throw ValidationError(
        "the rating judge produces per-paper ratings, not pairwise "
        "comparisons; use the pipeline or scaling command");
  }

  const RunMeta meta = run_meta(c);
  write_comparisons(output_paths(c).comparisons, records, &meta);
  const std::size_t invalid = count_invalid(records);
  char summary[128];
  std::snprintf(summary, sizeof(summary),
                "judged %zu assignments, %zu invalid (%.2f%%)", records.size(),
                invalid,
                records.empty() ? 0.0
                                : 100.0 * static_cast<double>(invalid) /
                                      static_cast<double>(records.size()));
  diag(d, summary);
  return records;
}

// ---------------------------------------------------------------------------
// fit + decide

inline BtScores run_fit(const ExperimentConfig& c,
                        const Diagnostics& d = nullptr) {
  const std::vector<PaperRecord> papers = load_valid_corpus(c, d);
  const std::vector<ComparisonRecord> records =
      read_comparisons(output_paths(c).comparisons);
  BtScores scores = fit(records, corpus_ids(papers), c.fit);
  const RunMeta meta = run_meta(c);
  write_scores(output_paths(c).scores, scores, &meta);
  diag(d, "fit: log_likelihood=" + std::to_string(scores.log_likelihood) +
              " iterations=" + std::to_string(scores.iterations) +
              (scores.converged ? " converged" : " NOT converged") + ", " +
              std::to_string(scores.zero_comparison_ids.size()) +
              " papers without comparisons");
  return scores;
}

namespace detail {

inline std::vector<DecisionRow> decision_rows(
    const std::vector<std::string>& ranking, const DecisionOutcome& outcome,
    const std::vector<PaperRecord>& papers) {
  auto by_id = index_by_id(papers);
  std::vector<DecisionRow> rows;
  rows.reserve(ranking.size());
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    DecisionRow row;
    row.id = ranking[r];
    row.rank = r;
    row.tier = outcome.assignment.at(row.id);
    if (auto it = by_id.find(row.id); it != by_id.end()) {
      row.area = it->second->area;
      row.human_decision = it->second->human_decision;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline DecisionOutcome decide_from_ranking(
    const ExperimentConfig& c, const std::vector<std::string>& ranking,
    const TierSpec& spec, const std::vector<PaperRecord>& papers) {
  if (!c.area_control) return assign_tiers(ranking, spec);
  const std::set<std::string> accept = resolve_accept_tiers(c, spec);
  const AreaQuota quota = derive_area_quota(papers, accept);
  return assign_tiers_area_controlled(ranking, spec, quota, papers);
}

}  // namespace detail

inline std::vector<DecisionRow> run_decide(const ExperimentConfig& c,
                                           const Diagnostics& d = nullptr) {
  const std::vector<PaperRecord> papers = load_valid_corpus(c, d);
  const BtScores scores = read_scores(output_paths(c).scores);
  const std::vector<std::string> ranking = rank(scores);
  const TierSpec spec = resolve_tier_spec(c, papers);
  const DecisionOutcome outcome =
      detail::decide_from_ranking(c, ranking, spec, papers);
  std::vector<DecisionRow> rows = detail::decision_rows(ranking, outcome, papers);
  const RunMeta meta = run_meta(c);
  write_decisions(output_paths(c).decisions, rows, &meta);
  diag(d, "decided " + std::to_string(rows.size()) + " papers into " +
              std::to_string(spec.tiers.size()) + " tiers" +
              (outcome.area_controlled ? " (area-controlled)" : ""));
  return rows;
}

// ---------------------------------------------------------------------------
// evaluate

namespace detail {

inline json metric_report_to_json(const MetricReport& m) {
  json j;
  j["name"] = m.name;
  j["value"] = m.value;
  if (m.ci_low) j["ci_low"] = *m.ci_low;
  if (m.ci_high) j["ci_high"] = *m.ci_high;
  j["n"] = m.n;
  j["seed"] = m.seed;
  return j;
}

inline std::map<std::string, std::string> system_decisions(
    const std::vector<DecisionRow>& rows) {
  std::map<std::string, std::string> out;
  for (const DecisionRow& r : rows) out[r.id] = r.tier;
  return out;
}

inline std::map<std::string, std::string> human_decisions(
    const std::vector<PaperRecord>& papers) {
  std::map<std::string, std::string> out;
  for (const PaperRecord& p : papers) {
    if (p.human_decision) out[p.id] = *p.human_decision;
  }
  return out;
}

// Gini over first-author institutions of a selection. The group universe
// is supplied by the caller so two selections can be compared on the same
// footing.
inline std::map<std::string, std::int64_t> institution_counts(
    const std::vector<const PaperRecord*>& selection,
    const std::set<std::string>& universe) {
  std::map<std::string, std::int64_t> counts;
  for (const std::string& inst : universe) counts[inst] = 0;
  for (const PaperRecord* p : selection) {
    if (p->institution) ++counts[*p->institution];
  }
  return counts;
}

}  // namespace detail

// Builds report.json plus the aligned confusion text table and the
// per-area CSV. Metrics whose inputs are missing are skipped with a
// warning, never silently zeroed.
inline json run_evaluate(const ExperimentConfig& c,
                         const Diagnostics& d = nullptr) {
  const std::vector<PaperRecord> papers = load_valid_corpus(c, d);
  const std::vector<DecisionRow> rows =
      read_decisions(output_paths(c).decisions);
  auto by_id = index_by_id(papers);
  if (rows.size() != papers.size()) {
    throw ValidationError("decisions cover " + std::to_string(rows.size()) +
                          " papers but corpus has " +
                          std::to_string(papers.size()));
  }

  const std::map<std::string, std::string> system = detail::system_decisions(rows);
  const std::map<std::string, std::string> human = detail::human_decisions(papers);
  const bool have_human = human.size() == papers.size();
  const bool have_citations = std::all_of(
      papers.begin(), papers.end(),
      [](const PaperRecord& p) { return p.citations.has_value(); });
  const bool have_embeddings = std::all_of(
      papers.begin(), papers.end(),
      [](const PaperRecord& p) { return p.embedding.has_value(); });
  const bool have_areas = std::all_of(
      papers.begin(), papers.end(),
      [](const PaperRecord& p) { return p.area.has_value(); });

  // tier order from the decision file: tiers in best-to-worst rank order
  std::vector<std::string> tier_order;
  for (const DecisionRow& r : rows) {
    if (std::find(tier_order.begin(), tier_order.end(), r.tier) ==
        tier_order.end()) {
      tier_order.push_back(r.tier);
    }
  }
  std::set<std::string> accept;
  if (!c.accept_tiers.empty()) {
    accept.insert(c.accept_tiers.begin(), c.accept_tiers.end());
  } else {
    for (std::size_t i = 0; i + 1 < tier_order.size(); ++i) {
      accept.insert(tier_order[i]);
    }
  }

  auto accepted_by = [&](const std::map<std::string, std::string>& decisions) {
    std::vector<const PaperRecord*> out;
    for (const auto& [id, tier] : decisions) {
      if (accept.contains(tier)) out.push_back(by_id.at(id));
    }
    return out;
  };
  auto rejected_by = [&](const std::map<std::string, std::string>& decisions) {
    std::vector<const PaperRecord*> out;
    for (const auto& [id, tier] : decisions) {
      if (!accept.contains(tier)) out.push_back(by_id.at(id));
    }
    return out;
  };

  json report;
  report["meta"] = {{"config_hash", config_hash(c)},
                    {"master_seed", c.master_seed}};
  report["n_papers"] = papers.size();
  report["accept_tiers"] = std::vector<std::string>(accept.begin(), accept.end());

  const OutputPaths paths = output_paths(c);

  if (have_human) {
    const ConfusionTable table = confusion_table(human, system, tier_order);
    report["confusion"] = {{"labels", table.labels}, {"counts", table.counts}};
    std::ofstream txt = detail::open_for_write(paths.confusion_text);
    txt << "# config_hash=" << config_hash(c) << " master_seed="
        << c.master_seed << "\n";
    txt << format_confusion(table);
    report["agreement"] = acceptance_agreement(table, accept);
  } else {
    diag(d, "skipping confusion/agreement: human decisions incomplete");
  }

  if (have_citations) {
    BootstrapConfig bs{c.bootstrap_resamples, c.master_seed};
    json cites;
    const auto sys_acc = accepted_by(system);
    const auto sys_rej = rejected_by(system);
    cites["system_accepted_mean"] =
        detail::metric_report_to_json(mean_citations(sys_acc, bs));
    cites["system_accepted_median"] =
        detail::metric_report_to_json(median_citations(sys_acc, bs));
    if (!sys_rej.empty()) {
      cites["system_rejected_mean"] =
          detail::metric_report_to_json(mean_citations(sys_rej, bs));
      std::vector<double> acc_v = detail::citations_of(sys_acc);
      std::vector<double> rej_v = detail::citations_of(sys_rej);
      cites["system_mann_whitney_p"] = mann_whitney_p(acc_v, rej_v);
    }
    if (have_human) {
      const auto hum_acc = accepted_by(human);
      const auto hum_rej = rejected_by(human);
      if (!hum_acc.empty()) {
        cites["human_accepted_mean"] =
            detail::metric_report_to_json(mean_citations(hum_acc, bs));
        cites["human_accepted_median"] =
            detail::metric_report_to_json(median_citations(hum_acc, bs));
      }
      if (!hum_acc.empty() && !hum_rej.empty()) {
        std::vector<double> acc_v = detail::citations_of(hum_acc);
        std::vector<double> rej_v = detail::citations_of(hum_rej);
        cites["human_mann_whitney_p"] = mann_whitney_p(acc_v, rej_v);
      }
    }
    report["citations"] = cites;
  } else {
    diag(d, "skipping citation statistics: citations missing");
  }

  if (have_areas) {
    const std::vector<AreaRate> sys_rates =
        area_acceptance_rates(system, papers, accept);
    std::map<std::string, AreaRate> human_by_area;
    if (have_human) {
      for (const AreaRate& ar : area_acceptance_rates(human, papers, accept)) {
        human_by_area[ar.area] = ar;
      }
    }
    json rates = json::array();
    std::ofstream csv = detail::open_for_write(paths.area_rates_csv);
    csv << "# config_hash=" << config_hash(c)
        << " master_seed=" << c.master_seed << "\n";
    csv << "area,total,system_accepted,system_rate";
    if (have_human) csv << ",human_accepted,human_rate";
    csv << "\n";
    char line[512];
    for (const AreaRate& ar : sys_rates) {
      json row;
      row["area"] = ar.area;
      row["total"] = ar.total;
      row["system_accepted"] = ar.accepted;
      row["system_rate"] = ar.rate;
      std::snprintf(line, sizeof(line), "%s,%zu,%zu,%.17g", ar.area.c_str(),
                    ar.total, ar.accepted, ar.rate);
      csv << line;
      if (have_human) {
        const AreaRate& h = human_by_area[ar.area];
        row["human_accepted"] = h.accepted;
        row["human_rate"] = h.rate;
        std::snprintf(line, sizeof(line), ",%zu,%.17g", h.accepted, h.rate);
        csv << line;
      }
      csv << "\n";
      rates.push_back(row);
    }
    report["area_rates"] = rates;
  } else {
    diag(d, "skipping area rates: areas missing");
  }

  if (have_embeddings && papers.size() >= 2) {
    // novelty of the top tier, as the paper measures it
    const std::string top_tier = tier_order.front();
    auto nn_mean = [&](const std::map<std::string, std::string>& decisions,
                       std::vector<double>* out_dists) {
      std::vector<double> dists;
      for (const auto& [id, tier] : decisions) {
        if (tier != top_tier) continue;
        const PaperRecord* query = by_id.at(id);
        std::vector<const std::vector<double>*> pool;
        pool.reserve(papers.size() - 1);
        for (const PaperRecord& p : papers) {
          if (p.id != id) pool.push_back(&*p.embedding);
        }
        dists.push_back(nearest_neighbor_distance(*query->embedding, pool));
      }
      double sum = 0.0;
      for (double v : dists) sum += v;
      if (out_dists) *out_dists = dists;
      return dists.empty() ? 0.0 : sum / static_cast<double>(dists.size());
    };
    json novelty;
    novelty["tier"] = top_tier;
    std::vector<double> sys_d;
    novelty["system_mean_nn_distance"] = nn_mean(system, &sys_d);
    novelty["system_n"] = sys_d.size();
    if (have_human) {
      std::vector<double> hum_d;
      novelty["human_mean_nn_distance"] = nn_mean(human, &hum_d);
      novelty["human_n"] = hum_d.size();
      if (!sys_d.empty() && !hum_d.empty()) {
        novelty["mann_whitney_p"] = mann_whitney_p(sys_d, hum_d);
      }
    }
    report["novelty"] = novelty;
  } else {
    diag(d, "skipping novelty: embeddings missing");
  }

  {
    const auto sys_acc = accepted_by(system);
    const bool any_institution = std::any_of(
        papers.begin(), papers.end(),
        [](const PaperRecord& p) { return p.institution.has_value(); });
    if (any_institution && !sys_acc.empty()) {
      // universe = institutions appearing in either compared selection
      std::set<std::string> universe;
      auto add_universe = [&](const std::vector<const PaperRecord*>& sel) {
        for (const PaperRecord* p : sel) {
          if (p->institution) universe.insert(*p->institution);
        }
      };
      add_universe(sys_acc);
      std::vector<const PaperRecord*> hum_acc;
      if (have_human) {
        hum_acc = accepted_by(human);
        add_universe(hum_acc);
      }
      json g;
      const auto sys_counts = detail::institution_counts(sys_acc, universe);
      g["system"] = gini(sys_counts);
      g["system_share_top_10"] = share_of_top_k(sys_counts, 10);
      if (have_human && !hum_acc.empty()) {
        const auto hum_counts = detail::institution_counts(hum_acc, universe);
        g["human"] = gini(hum_counts);
        g["human_share_top_10"] = share_of_top_k(hum_counts, 10);
      }
      g["n_institutions"] = universe.size();
      report["gini"] = g;
    } else {
      diag(d, "skipping gini: institutions missing");
    }
  }

  if (std::filesystem::exists(paths.scores)) {
    const BtScores scores = read_scores(paths.scores);
    std::map<std::string, double> beta;
    std::map<std::string, double> ratings;
    for (const PaperRecord& p : papers) {
      if (!p.human_rating) continue;
      auto it = scores.beta.find(p.id);
      if (it == scores.beta.end()) continue;
      beta[p.id] = it->second;
      ratings[p.id] = *p.human_rating;
    }
    if (beta.size() >= 2) {
      try {
        report["spearman_bt_vs_human_rating"] = spearman(beta, ratings);
      } catch (const ValidationError& e) {
        diag(d, std::string("skipping spearman: ") + e.what());
      }
    } else {
      diag(d, "skipping spearman: human ratings missing");
    }
  } else {
    diag(d, "skipping spearman: no scores file");
  }

  std::ofstream out = detail::open_for_write(paths.report);
  out << report.dump(2) << '\n';
  return report;
}

// ---------------------------------------------------------------------------
// rating baseline (per-paper ratings, ranked with id tiebreak)

inline std::vector<std::pair<std::string, int>> rate_corpus(
    const JudgeSpecConfig& spec, const std::vector<PaperRecord>& papers,
    std::uint64_t master_seed) {
  RatingJudgeConfig rc;
  rc.quality = resolve_quality(spec.quality, papers, master_seed);
  rc.rating_noise = spec.rating_noise;
  rc.scale_min = spec.scale_min;
  rc.scale_max = spec.scale_max;
  rc.compression = spec.compression;
  std::vector<std::pair<std::string, int>> ratings;
  ratings.reserve(papers.size());
  for (std::size_t i = 0; i < papers.size(); ++i) {
    ratings.emplace_back(
        papers[i].id,
        rate_paper_synthetic(papers[i].id, rc,
                             derive_seed(master_seed, i,
                                         detail::kStreamRating)));
  }
  return ratings;
}

inline std::vector<std::string> ranking_from_ratings(
    std::vector<std::pair<std::string, int>> ratings) {
  std::sort(ratings.begin(), ratings.end(),
            [](const auto& x, const auto& y) {
              if (x.second != y.second) return x.second > y.second;
              return x.first < y.first;
            });
  std::vector<std::string> out;
  out.reserve(ratings.size());
  for (auto& [id, r] : ratings) out.push_back(std::move(id));
  return out;
}

// ---------------------------------------------------------------------------
// pipeline

inline void run_pipeline(const ExperimentConfig& c,
                         const Diagnostics& d = nullptr) {
  if (c.judge.kind == JudgeKind::rating) {
    const std::vector<PaperRecord> papers = load_valid_corpus(c, d);
    const auto ratings = rate_corpus(c.judge, papers, c.master_seed);
    {
      std::ofstream csv =
          detail::open_for_write(output_paths(c).ratings_csv);
      csv << "# config_hash=" << config_hash(c)
          << " master_seed=" << c.master_seed << "\n";
      csv << "id,rating\n";
      for (const auto& [id, r] : ratings) csv << id << ',' << r << '\n';
    }
    const std::vector<std::string> ranking = ranking_from_ratings(ratings);
    const TierSpec spec = resolve_tier_spec(c, papers);
    const DecisionOutcome outcome =
        detail::decide_from_ranking(c, ranking, spec, papers);
    std::vector<DecisionRow> rows =
        detail::decision_rows(ranking, outcome, papers);
    const RunMeta meta = run_meta(c);
    write_decisions(output_paths(c).decisions, rows, &meta);
    run_evaluate(c, d);
    return;
  }
  run_sample(c, d);
  run_judge(c, d);
  run_fit(c, d);
  run_decide(c, d);
  run_evaluate(c, d);
}

// ---------------------------------------------------------------------------
// scaling

struct ScalingPoint {
  std::uint64_t m = 0;
  std::string variant;
  double value = 0.0;
  std::size_t n_accepted = 0;
};

// One sample->judge->fit->decide run per ladder entry, plus the flat
// baselines, all scored by mean citations when present or mean latent
// quality otherwise.
inline std::vector<ScalingPoint> run_scaling(const ExperimentConfig& c,
                                             const Diagnostics& d = nullptr) {
  if (c.budget_ladder.empty()) {
    throw ValidationError("scaling requires a budget_ladder");
  }
  const std::vector<PaperRecord> papers = load_valid_corpus(c, d);
  const TierSpec spec = resolve_tier_spec(c, papers);
  const std::set<std::string> accept = resolve_accept_tiers(c, spec);
  std::size_t accept_count = 0;
  for (const auto& [label, count] : spec.tiers) {
    if (accept.contains(label)) accept_count += count;
  }

  const bool have_citations = std::all_of(
      papers.begin(), papers.end(),
      [](const PaperRecord& p) { return p.citations.has_value(); });
  std::unordered_map<std::string, double> quality;
  if (c.judge.kind != JudgeKind::endpoint) {
    quality = resolve_quality(c.judge.quality, papers, c.master_seed);
  }
  if (!have_citations && quality.empty()) {
    throw ValidationError(
        "scaling needs citations on every paper or a latent quality source");
  }
  auto value_of = [&](const std::vector<const PaperRecord*>& selection) {
    double sum = 0.0;
    for (const PaperRecord* p : selection) {
      sum += have_citations ? static_cast<double>(*p->citations)
                            : quality.at(p->id);
    }
    return selection.empty() ? 0.0
                             : sum / static_cast<double>(selection.size());
  };
  auto by_id = index_by_id(papers);
  auto accepted_of = [&](const DecisionOutcome& outcome) {
    std::vector<const PaperRecord*> sel;
    for (const auto& [id, tier] : outcome.assignment) {
      if (accept.contains(tier)) sel.push_back(by_id.at(id));
    }
    return sel;
  };

  std::vector<ScalingPoint> points;
  auto push = [&](std::uint64_t m, const std::string& variant,
                  const std::vector<const PaperRecord*>& sel) {
    points.push_back({m, variant, value_of(sel), sel.size()});
    diag(d, "scaling m=" + std::to_string(m) + " " + variant + " value=" +
                std::to_string(points.back().value) + " accepted=" +
                std::to_string(sel.size()));
  };

  const bool can_area_control =
      c.area_control &&
      std::all_of(papers.begin(), papers.end(), [](const PaperRecord& p) {
        return p.area.has_value() && p.human_decision.has_value();
      });

  for (std::uint64_t m : c.budget_ladder) {
    ScheduleConfig sc;
    sc.master_seed = derive_seed(c.master_seed, m, detail::kStreamScaling);
    sc.budget = m;
    sc.corpus_size = papers.size();
    const std::vector<PairAssignment> assignments =
        sample_assignments(sc, papers);
    std::vector<ComparisonRecord> records;
    if (c.judge.kind == JudgeKind::endpoint) {
      records = run_judging(assignments, EndpointJudge(c.judge.endpoint, papers),
                            c.concurrency);
    } else {
      SyntheticJudgeConfig jc;
      jc.quality = quality;
      jc.noise_scale = c.judge.noise_scale;
      jc.area_bias = c.judge.area_bias;
      jc.institution_bias = c.judge.institution_bias;
      records = run_judging(assignments, SyntheticJudge(std::move(jc), papers),
                            c.concurrency);
    }
    const BtScores scores = fit(records, corpus_ids(papers), c.fit);
    const std::vector<std::string> ranking = rank(scores);
    push(m, "ranking", accepted_of(assign_tiers(ranking, spec)));
    if (can_area_control) {
      const AreaQuota quota = derive_area_quota(papers, accept);
      push(m, "ranking_area_control",
           accepted_of(assign_tiers_area_controlled(ranking, spec, quota,
                                                    papers)));
    }
  }

  // rating baseline: flat in m, emitted per ladder entry for plotting parity
  {
    JudgeSpecConfig rb = c.rating_baseline.value_or([&] {
      JudgeSpecConfig spec_rb = c.judge;
      spec_rb.kind = JudgeKind::rating;
      return spec_rb;
    }());
    const std::vector<std::string> ranking =
        ranking_from_ratings(rate_corpus(rb, papers, c.master_seed));
    const auto sel = accepted_of(assign_tiers(ranking, spec));
    for (std::uint64_t m : c.budget_ladder) push(m, "rating_baseline", sel);
  }

  // random baseline: uniform permutation through the same tier spec
  {
    std::vector<std::string> ranking = corpus_ids(papers);
    SplitMix64 rng(derive_seed(c.master_seed, 0, detail::kStreamRandomBaseline));
    for (std::size_t i = ranking.size(); i > 1; --i) {
      std::swap(ranking[i - 1], ranking[rng.uniform_below(i)]);
    }
    const auto sel = accepted_of(assign_tiers(ranking, spec));
    for (std::uint64_t m : c.budget_ladder) push(m, "random_baseline", sel);
  }

  // human decisions, when present
  if (std::all_of(papers.begin(), papers.end(), [](const PaperRecord& p) {
        return p.human_decision.has_value();
      })) {
    std::vector<const PaperRecord*> sel;
    for (const PaperRecord& p : papers) {
      if (accept.contains(*p.human_decision)) sel.push_back(&p);
    }
    if (!sel.empty()) {
      for (std::uint64_t m : c.budget_ladder) push(m, "human", sel);
    }
  }

  // oracle top-k by latent quality, when a quality source exists
  if (!quality.empty()) {
    std::vector<std::string> ranking = corpus_ids(papers);
    std::sort(ranking.begin(), ranking.end(),
              [&](const std::string& a, const std::string& b) {
                const double qa = quality.at(a);
                const double qb = quality.at(b);
                if (qa != qb) return qa > qb;
                return a < b;
              });
    std::vector<const PaperRecord*> sel;
    for (std::size_t i = 0; i < accept_count && i < ranking.size(); ++i) {
      sel.push_back(by_id.at(ranking[i]));
    }
    for (std::uint64_t m : c.budget_ladder) push(m, "oracle_top_k", sel);
  }

  std::ofstream csv = detail::open_for_write(output_paths(c).scaling_csv);
  csv << "# config_hash=" << config_hash(c) << " master_seed=" << c.master_seed
      << "\n";
  csv << "m,variant,value,n_accepted\n";
  char line[256];
  for (const ScalingPoint& p : points) {
    std::snprintf(line, sizeof(line), "%llu,%s,%.17g,%zu\n",
                  static_cast<unsigned long long>(p.m), p.variant.c_str(),
                  p.value, p.n_accepted);
    csv << line;
  }
  return points;
}

}  // namespace pairrank
