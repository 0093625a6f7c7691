#pragma once
// Chat-completion endpoint judge. Sends the rendered pairwise prompt as a
// single user message at temperature 0, parses the model's JSON verdict,
// caches raw responses per assignment, and retries transient failures
// with exponential backoff.
//
// Malformed model output yields an invalid ComparisonRecord with the raw
// text preserved; only transport exhaustion throws.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "pairrank/errors.hpp"
#include "pairrank/io.hpp"
#include "pairrank/prompt.hpp"
#include "pairrank/types.hpp"

namespace pairrank {

struct EndpointConfig {
  std::string base_url;    // e.g. "http://127.0.0.1:8080"
  std::string model_name;
  std::string api_key_env_var;  // credential is read from the process env,
                                // never stored or logged
  int max_retries = 3;
  double request_timeout_seconds = 60.0;
  std::optional<std::filesystem::path> cache_dir;
  double temperature = 0.0;
  std::size_t main_text_chars = kDefaultMainTextChars;
  int backoff_initial_ms = 250;
};

namespace detail {

inline std::string strip_code_fences(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  std::size_t end = text.find_last_not_of(" \t\r\n") + 1;
  std::string s = text.substr(begin, end - begin);
  if (s.rfind("```", 0) == 0) {
    std::size_t nl = s.find('\n');
    std::size_t closing = s.rfind("```");
    if (nl != std::string::npos && closing != std::string::npos &&
        closing > nl) {
      s = s.substr(nl + 1, closing - nl - 1);
    }
  }
  return s;
}

inline std::string cache_file_name(const std::string& assignment_id) {
  // assignment ids are library-generated, but guard against path characters
  std::string name;
  name.reserve(assignment_id.size());
  for (char c : assignment_id) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_';
    name += safe ? c : '_';
  }
  return name + ".response";
}

}  // namespace detail

class EndpointJudge {
 public:
  EndpointJudge(EndpointConfig config, const std::vector<PaperRecord>& papers)
      : config_(std::move(config)), papers_(index_by_id(papers)) {
    if (config_.base_url.empty()) {
      throw ValidationError("endpoint base_url is empty");
    }
  }

  ComparisonRecord judge(const PairAssignment& a) const {
    if (auto cached = read_cache(a.assignment_id)) {
      return record_from_content(a, *cached);
    }
    const std::string content = request_completion(a);
    write_cache(a.assignment_id, content);
    return record_from_content(a, content);
  }

  std::string render_prompt(const PairAssignment& a) const {
    return render_pairwise_prompt(paper(a.first), paper(a.second),
                                  config_.main_text_chars);
  }

  // Maps the model's verdict onto the assignment's presentation order.
  // Any deviation from the protocol produces an invalid record.
  ComparisonRecord record_from_content(const PairAssignment& a,
                                       const std::string& content) const {
    ComparisonRecord r;
    r.assignment_id = a.assignment_id;
    r.judge_id = config_.model_name;
    r.raw_response = content;
    r.winner = a.first;  // placeholder orientation until a verdict parses
    r.loser = a.second;
    r.status = JudgmentStatus::invalid;

    json verdict;
    try {
      verdict = json::parse(detail::strip_code_fences(content));
    } catch (const json::exception&) {
      return r;
    }
    if (!verdict.is_object() || !verdict.contains("chosen_paper") ||
        !verdict["chosen_paper"].is_string()) {
      return r;
    }
    const std::string chosen = verdict["chosen_paper"].get<std::string>();
    if (chosen == "paper_1") {
      r.winner = a.first;
      r.loser = a.second;
    } else if (chosen == "paper_2") {
      r.winner = a.second;
      r.loser = a.first;
    } else {
      return r;
    }
    r.status = JudgmentStatus::valid;
    return r;
  }

 private:
  const PaperRecord& paper(const std::string& id) const {
    auto it = papers_.find(id);
    if (it == papers_.end()) {
      throw ValidationError("assignment references unknown paper: " + id);
    }
    return *it->second;
  }

  std::optional<std::filesystem::path> cache_path(
      const std::string& assignment_id) const {
    if (!config_.cache_dir) return std::nullopt;
    return *config_.cache_dir / detail::cache_file_name(assignment_id);
  }

  std::optional<std::string> read_cache(const std::string& assignment_id) const {
    auto path = cache_path(assignment_id);
    if (!path) return std::nullopt;
    std::lock_guard<std::mutex> lock(cache_mutex_);
    std::ifstream in(*path, std::ios::binary);
    if (!in) return std::nullopt;
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
  }

  void write_cache(const std::string& assignment_id,
                   const std::string& content) const {
    auto path = cache_path(assignment_id);
    if (!path) return;
    std::lock_guard<std::mutex> lock(cache_mutex_);
    std::filesystem::create_directories(*config_.cache_dir);
    std::filesystem::path tmp = *path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << content;
    }
    std::filesystem::rename(tmp, *path);
  }

  // One HTTP round trip with retries. Returns the model's message content.
  std::string request_completion(const PairAssignment& a) const {
    json body;
    body["model"] = config_.model_name;
    body["temperature"] = config_.temperature;
    body["messages"] =
        json::array({{{"role", "user"}, {"content", render_prompt(a)}}});
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!config_.api_key_env_var.empty()) {
      if (const char* key = std::getenv(config_.api_key_env_var.c_str());
          key != nullptr && key[0] != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + key);
      }
    }

    std::string last_failure = "no attempt made";
    const int attempts = config_.max_retries + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
      if (attempt > 0) {
        const auto delay = std::chrono::milliseconds(
            static_cast<long>(config_.backoff_initial_ms) << (attempt - 1));
        std::this_thread::sleep_for(delay);
      }
      httplib::Client client(config_.base_url);
      const auto timeout = std::chrono::milliseconds(
          static_cast<long>(config_.request_timeout_seconds * 1000));
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);

      httplib::Result res = client.Post("/v1/chat/completions", headers,
                                        payload, "application/json");
      if (!res) {
        last_failure = "connection failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_failure = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw TransportError("endpoint rejected request for " +
                             a.assignment_id + ": HTTP " +
                             std::to_string(res->status));
      }
      return extract_content(res->body);
    }
    throw TransportError("endpoint unreachable for " + a.assignment_id +
                         " after " + std::to_string(attempts) +
                         " attempts (" + last_failure + ")");
  }

  // Unwraps the chat-completion envelope. A syntactically broken envelope
  // is treated as model output (invalid record), not as transport failure.
  static std::string extract_content(const std::string& http_body) {
    try {
      json envelope = json::parse(http_body);
      return envelope.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const json::exception&) {
      return http_body;
    }
  }

  EndpointConfig config_;
  std::unordered_map<std::string, const PaperRecord*> papers_;
  mutable std::mutex cache_mutex_;
};

inline ComparisonRecord judge_pair_endpoint(const PairAssignment& assignment,
                                            const std::vector<PaperRecord>& papers,
                                            const EndpointConfig& config) {
  return EndpointJudge(config, papers).judge(assignment);
}

}  // namespace pairrank
