#pragma once
// Experiment configuration: one JSON document describing corpus, judge,
// budget, fit, tiering and output locations. CLI flags override file
// values; the canonical dump is hashed and stamped into every output.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pairrank/bt.hpp"
#include "pairrank/endpoint.hpp"
#include "pairrank/errors.hpp"

namespace pairrank {

struct QualitySourceConfig {
  enum class Kind { explicit_map, field, gaussian };
  Kind kind = Kind::field;
  std::unordered_map<std::string, double> values;  // explicit_map
  double mean = 0.0;    // gaussian
  double spread = 1.0;  // gaussian
};

enum class JudgeKind { synthetic, rating, endpoint };

struct JudgeSpecConfig {
  JudgeKind kind = JudgeKind::synthetic;
  QualitySourceConfig quality;
  // synthetic
  double noise_scale = 1.0;
  std::unordered_map<std::string, double> area_bias;
  std::unordered_map<std::string, double> institution_bias;
  // rating
  double rating_noise = 0.5;
  int scale_min = 1;
  int scale_max = 10;
  double compression = 0.3;
  // endpoint
  EndpointConfig endpoint;
};

struct TierConfig {
  enum class Source { explicit_spec, from_human_distribution };
  Source source = Source::explicit_spec;
  std::vector<std::pair<std::string, std::size_t>> tiers;  // explicit_spec
  std::vector<std::string> order;  // from_human_distribution
};

struct ExperimentConfig {
  std::filesystem::path corpus_path;
  JudgeSpecConfig judge;
  std::uint64_t budget = 0;
  std::vector<std::uint64_t> budget_ladder;
  FitConfig fit;
  TierConfig tier;
  std::vector<std::string> accept_tiers;  // empty = all tiers but the last
  bool area_control = false;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "out";
  unsigned concurrency = 1;
  std::size_t bootstrap_resamples = 10000;
  // rating-system baseline used by the scaling experiment
  std::optional<JudgeSpecConfig> rating_baseline;
};

namespace detail {

inline QualitySourceConfig quality_source_from_json(const json& j) {
  QualitySourceConfig q;
  const std::string type = j.value("type", std::string("field"));
  if (type == "field") {
    q.kind = QualitySourceConfig::Kind::field;
  } else if (type == "gaussian") {
    q.kind = QualitySourceConfig::Kind::gaussian;
    q.mean = j.value("mean", 0.0);
    q.spread = j.value("spread", 1.0);
  } else if (type == "explicit") {
    q.kind = QualitySourceConfig::Kind::explicit_map;
    q.values = j.at("values").get<std::unordered_map<std::string, double>>();
  } else {
    throw ValidationError("unknown quality_source type: " + type);
  }
  return q;
}

inline json quality_source_to_json(const QualitySourceConfig& q) {
  json j;
  switch (q.kind) {
    case QualitySourceConfig::Kind::field:
      j["type"] = "field";
      break;
    case QualitySourceConfig::Kind::gaussian:
      j["type"] = "gaussian";
      j["mean"] = q.mean;
      j["spread"] = q.spread;
      break;
    case QualitySourceConfig::Kind::explicit_map:
      j["type"] = "explicit";
      j["values"] = std::map<std::string, double>(q.values.begin(), q.values.end());
      break;
  }
  return j;
}

inline JudgeSpecConfig judge_spec_from_json(const json& j) {
  JudgeSpecConfig spec;
  const std::string type = j.value("type", std::string("synthetic"));
  if (type == "synthetic") {
    spec.kind = JudgeKind::synthetic;
  } else if (type == "rating") {
    spec.kind = JudgeKind::rating;
  } else if (type == "endpoint") {
    spec.kind = JudgeKind::endpoint;
  } else {
    throw ValidationError("unknown judge type: " + type);
  }
  if (j.contains("quality_source")) {
    spec.quality = quality_source_from_json(j.at("quality_source"));
  }
  spec.noise_scale = j.value("noise_scale", 1.0);
  if (j.contains("area_bias")) {
    spec.area_bias =
        j.at("area_bias").get<std::unordered_map<std::string, double>>();
  }
  if (j.contains("institution_bias")) {
    spec.institution_bias =
        j.at("institution_bias").get<std::unordered_map<std::string, double>>();
  }
  spec.rating_noise = j.value("rating_noise", 0.5);
  spec.scale_min = j.value("scale_min", 1);
  spec.scale_max = j.value("scale_max", 10);
  spec.compression = j.value("compression", 0.3);
  if (spec.kind == JudgeKind::endpoint) {
    spec.endpoint.base_url = j.at("base_url").get<std::string>();
    spec.endpoint.model_name = j.value("model", std::string("gpt-4o-mini"));
    spec.endpoint.api_key_env_var =
        j.value("api_key_env_var", std::string("PAIRRANK_API_KEY"));
    spec.endpoint.max_retries = j.value("max_retries", 3);
    spec.endpoint.request_timeout_seconds = j.value("timeout_seconds", 60.0);
    if (j.contains("cache_dir")) {
      spec.endpoint.cache_dir =
          std::filesystem::path(j.at("cache_dir").get<std::string>());
    }
    spec.endpoint.temperature = j.value("temperature", 0.0);
    spec.endpoint.main_text_chars =
        j.value("main_text_chars", kDefaultMainTextChars);
    spec.endpoint.backoff_initial_ms = j.value("backoff_initial_ms", 250);
  }
  return spec;
}

inline json judge_spec_to_json(const JudgeSpecConfig& spec) {
  json j;
  switch (spec.kind) {
    case JudgeKind::synthetic:
      j["type"] = "synthetic";
      j["noise_scale"] = spec.noise_scale;
      break;
    case JudgeKind::rating:
      j["type"] = "rating";
      j["rating_noise"] = spec.rating_noise;
      j["scale_min"] = spec.scale_min;
      j["scale_max"] = spec.scale_max;
      j["compression"] = spec.compression;
      break;
    case JudgeKind::endpoint:
      j["type"] = "endpoint";
      j["base_url"] = spec.endpoint.base_url;
      j["model"] = spec.endpoint.model_name;
      j["api_key_env_var"] = spec.endpoint.api_key_env_var;
      j["max_retries"] = spec.endpoint.max_retries;
      j["timeout_seconds"] = spec.endpoint.request_timeout_seconds;
      if (spec.endpoint.cache_dir) {
        j["cache_dir"] = spec.endpoint.cache_dir->string();
      }
      j["temperature"] = spec.endpoint.temperature;
      j["main_text_chars"] = spec.endpoint.main_text_chars;
      break;
  }
  j["quality_source"] = quality_source_to_json(spec.quality);
  if (!spec.area_bias.empty()) {
    j["area_bias"] = std::map<std::string, double>(spec.area_bias.begin(),
                                                   spec.area_bias.end());
  }
  if (!spec.institution_bias.empty()) {
    j["institution_bias"] = std::map<std::string, double>(
        spec.institution_bias.begin(), spec.institution_bias.end());
  }
  return j;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("corpus")) {
    c.corpus_path = std::filesystem::path(j.at("corpus").get<std::string>());
  }
  if (j.contains("judge")) {
    c.judge = detail::judge_spec_from_json(j.at("judge"));
  }
  c.budget = j.value("budget", std::uint64_t{0});
  if (j.contains("budget_ladder")) {
    c.budget_ladder = j.at("budget_ladder").get<std::vector<std::uint64_t>>();
    for (std::size_t i = 1; i < c.budget_ladder.size(); ++i) {
      if (c.budget_ladder[i] <= c.budget_ladder[i - 1]) {
        throw ValidationError("budget_ladder must be strictly increasing");
      }
    }
  }
  if (j.contains("fit")) {
    const json& f = j.at("fit");
    c.fit.regularization = f.value("regularization", 0.01);
    c.fit.tolerance = f.value("tolerance", 1e-10);
    c.fit.max_iterations = f.value("max_iterations", 10000L);
  }
  if (j.contains("tiers")) {
    const json& t = j.at("tiers");
    const std::string source = t.value("source", std::string("explicit"));
    if (source == "explicit") {
      c.tier.source = TierConfig::Source::explicit_spec;
      for (const json& row : t.at("tiers")) {
        c.tier.tiers.emplace_back(row.at(0).get<std::string>(),
                                  row.at(1).get<std::size_t>());
      }
    } else if (source == "from_human_distribution") {
      c.tier.source = TierConfig::Source::from_human_distribution;
      c.tier.order = t.at("order").get<std::vector<std::string>>();
    } else {
      throw ValidationError("unknown tier source: " + source);
    }
  }
  if (j.contains("accept_tiers")) {
    c.accept_tiers = j.at("accept_tiers").get<std::vector<std::string>>();
  }
  c.area_control = j.value("area_control", false);
  c.master_seed = j.value("master_seed", std::uint64_t{0});
  if (j.contains("output_dir")) {
    c.output_dir = std::filesystem::path(j.at("output_dir").get<std::string>());
  }
  c.concurrency = j.value("concurrency", 1u);
  c.bootstrap_resamples = j.value("bootstrap_resamples", std::size_t{10000});
  if (j.contains("rating_baseline")) {
    JudgeSpecConfig rb = detail::judge_spec_from_json(j.at("rating_baseline"));
    rb.kind = JudgeKind::rating;
    c.rating_baseline = std::move(rb);
  }
  return c;
}

inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["corpus"] = c.corpus_path.string();
  j["judge"] = detail::judge_spec_to_json(c.judge);
  j["budget"] = c.budget;
  if (!c.budget_ladder.empty()) j["budget_ladder"] = c.budget_ladder;
  j["fit"] = {{"regularization", c.fit.regularization},
              {"tolerance", c.fit.tolerance},
              {"max_iterations", c.fit.max_iterations}};
  json tiers;
  if (c.tier.source == TierConfig::Source::explicit_spec) {
    tiers["source"] = "explicit";
    json rows = json::array();
    for (const auto& [label, count] : c.tier.tiers) {
      rows.push_back(json::array({label, count}));
    }
    tiers["tiers"] = rows;
  } else {
    tiers["source"] = "from_human_distribution";
    tiers["order"] = c.tier.order;
  }
  j["tiers"] = tiers;
  if (!c.accept_tiers.empty()) j["accept_tiers"] = c.accept_tiers;
  j["area_control"] = c.area_control;
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir.string();
  j["concurrency"] = c.concurrency;
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  if (c.rating_baseline) {
    j["rating_baseline"] = detail::judge_spec_to_json(*c.rating_baseline);
  }
  return j;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": bad JSON: " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// FNV-1a over the canonical config dump; stamped into every output file.
inline std::string config_hash(const ExperimentConfig& c) {
  const std::string dump = config_to_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char byte : dump) {
    h ^= byte;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

inline RunMeta run_meta(const ExperimentConfig& c) {
  return RunMeta{config_hash(c), c.master_seed};
}

}  // namespace pairrank
