#pragma once
// Converts a ranking into tier decisions under an exact tier-size spec,
// optionally constraining per-area accepted counts to a quota.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pairrank/errors.hpp"
#include "pairrank/types.hpp"

namespace pairrank {

enum class TierSource { explicit_spec, from_human_distribution };

struct TierSpec {
  std::vector<std::pair<std::string, std::size_t>> tiers;  // best to worst
  TierSource source = TierSource::explicit_spec;

  std::size_t total() const {
    std::size_t s = 0;
    for (const auto& [label, count] : tiers) s += count;
    return s;
  }
};

struct AreaQuota {
  std::map<std::string, std::size_t> per_area_accept_counts;

  std::size_t total() const {
    std::size_t s = 0;
    for (const auto& [area, count] : per_area_accept_counts) s += count;
    return s;
  }
};

// Tier sizes equal to the human decision histogram, ordered by tier_order
// (best to worst). Every paper must carry a decision in tier_order.
inline TierSpec derive_tier_spec(const std::vector<PaperRecord>& papers,
                                 const std::vector<std::string>& tier_order) {
  std::map<std::string, std::size_t> histogram;
  std::vector<std::string> missing;
  for (const PaperRecord& p : papers) {
    if (!p.human_decision) {
      missing.push_back(p.id);
      continue;
    }
    ++histogram[*p.human_decision];
  }
  if (!missing.empty()) {
    std::string msg = "papers without human_decision:";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
      msg += " " + missing[i];
    }
    if (missing.size() > 10) {
      msg += " (+" + std::to_string(missing.size() - 10) + " more)";
    }
    throw ValidationError(msg);
  }
  TierSpec spec;
  spec.source = TierSource::from_human_distribution;
  for (const std::string& label : tier_order) {
    auto it = histogram.find(label);
    spec.tiers.emplace_back(label, it == histogram.end() ? 0 : it->second);
    if (it != histogram.end()) histogram.erase(it);
  }
  if (!histogram.empty()) {
    throw ValidationError("human decision not in tier order: " +
                          histogram.begin()->first);
  }
  return spec;
}

namespace detail {

inline void check_ranking(const std::vector<std::string>& ranking,
                          const TierSpec& spec) {
  if (spec.total() != ranking.size()) {
    throw ValidationError("tier sizes sum to " + std::to_string(spec.total()) +
                          " but ranking has " + std::to_string(ranking.size()) +
                          " papers");
  }
  std::unordered_set<std::string> seen;
  for (const std::string& id : ranking) {
    if (!seen.insert(id).second) {
      throw ValidationError("ranking contains duplicate id: " + id);
    }
  }
}

}  // namespace detail

// Prefix assignment: the first count_1 ranked papers get tier 1, the next
// count_2 get tier 2, and so on.
inline DecisionOutcome assign_tiers(const std::vector<std::string>& ranking,
                                    const TierSpec& spec) {
  detail::check_ranking(ranking, spec);
  DecisionOutcome out;
  out.tiers = spec.tiers;
  out.area_controlled = false;
  std::size_t pos = 0;
  for (const auto& [label, count] : spec.tiers) {
    for (std::size_t k = 0; k < count; ++k) {
      out.assignment[ranking[pos++]] = label;
    }
  }
  return out;
}

// Area-controlled assignment: each area accepts exactly its quota, filled
// by the within-area ranking; accepted papers are then split into the
// accept sub-tiers by global rank, and the remaining papers fill the
// non-accept tiers by global rank.
inline DecisionOutcome assign_tiers_area_controlled(
    const std::vector<std::string>& ranking, const TierSpec& spec,
    const AreaQuota& quota, const std::vector<PaperRecord>& papers) {
  detail::check_ranking(ranking, spec);

  // the accept tiers are the prefix of the spec whose sizes sum to the quota
  const std::size_t accept_total = quota.total();
  std::size_t accept_tier_count = 0;
  std::size_t prefix = 0;
  while (prefix < accept_total && accept_tier_count < spec.tiers.size()) {
    prefix += spec.tiers[accept_tier_count].second;
    ++accept_tier_count;
  }
  if (prefix != accept_total) {
    throw ValidationError(
        "quota total " + std::to_string(accept_total) +
        " does not match any prefix of the tier sizes (got prefix " +
        std::to_string(prefix) + ")");
  }

  std::unordered_map<std::string, std::string> area_of;
  for (const PaperRecord& p : papers) {
    if (!p.area) {
      throw ValidationError("paper without area: " + p.id);
    }
    area_of[p.id] = *p.area;
  }

  // papers per area, in global rank order
  std::map<std::string, std::vector<std::string>> by_area;
  for (const std::string& id : ranking) {
    auto it = area_of.find(id);
    if (it == area_of.end()) {
      throw ValidationError("ranking references paper not in corpus: " + id);
    }
    by_area[it->second].push_back(id);
  }

  std::unordered_set<std::string> accepted;
  for (const auto& [area, count] : quota.per_area_accept_counts) {
    auto it = by_area.find(area);
    const std::size_t available = it == by_area.end() ? 0 : it->second.size();
    if (count > available) {
      throw ValidationError("quota for area '" + area + "' is " +
                            std::to_string(count) + " but only " +
                            std::to_string(available) + " papers exist");
    }
    for (std::size_t k = 0; k < count; ++k) accepted.insert(it->second[k]);
  }

  std::vector<std::string> accepted_by_rank;
  std::vector<std::string> rejected_by_rank;
  for (const std::string& id : ranking) {
    (accepted.contains(id) ? accepted_by_rank : rejected_by_rank).push_back(id);
  }

  DecisionOutcome out;
  out.tiers = spec.tiers;
  out.area_controlled = true;
  std::size_t pos = 0;
  for (std::size_t t = 0; t < accept_tier_count; ++t) {
    for (std::size_t k = 0; k < spec.tiers[t].second; ++k) {
      out.assignment[accepted_by_rank[pos++]] = spec.tiers[t].first;
    }
  }
  pos = 0;
  for (std::size_t t = accept_tier_count; t < spec.tiers.size(); ++t) {
    for (std::size_t k = 0; k < spec.tiers[t].second; ++k) {
      out.assignment[rejected_by_rank[pos++]] = spec.tiers[t].first;
    }
  }
  return out;
}

// Human per-area accept histogram, for quota-from-human runs. Accept tiers
// are named explicitly; papers must carry area and human_decision.
inline AreaQuota derive_area_quota(const std::vector<PaperRecord>& papers,
                                   const std::set<std::string>& accept_tiers) {
  AreaQuota quota;
  for (const PaperRecord& p : papers) {
    if (!p.area) throw ValidationError("paper without area: " + p.id);
    if (!p.human_decision) {
      throw ValidationError("paper without human_decision: " + p.id);
    }
    if (accept_tiers.contains(*p.human_decision)) {
      ++quota.per_area_accept_counts[*p.area];
    }
  }
  return quota;
}

}  // namespace pairrank
