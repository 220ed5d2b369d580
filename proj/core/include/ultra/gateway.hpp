// Copyright 2026 The ULTRA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ULTRA_GATEWAY_HPP_
#define ULTRA_GATEWAY_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ultra {

enum class BackendKind { kHttp, kMock };

// How an option's log-probability is read from the backend: summed over
// all of its tokens, or only the first token.
enum class OptionScoring { kSequence, kFirstToken };

struct BackendConfig {
  BackendKind kind = BackendKind::kMock;
  std::string endpoint;  // http only, e.g. http://host:8000/v1/completions
  std::string model;
  std::string api_key;
  std::size_t token_budget = 2048;
  std::chrono::milliseconds timeout{60'000};
  std::size_t retries = 2;
  std::chrono::milliseconds backoff{1'000};  // first retry delay, doubles
  std::size_t max_in_flight = 8;
  OptionScoring scoring = OptionScoring::kSequence;
  std::filesystem::path mock_script;  // mock only; empty = empty script

  void validate() const;
};

// Structured identity of a request ("local|doc|3|Date"). The mock backend
// resolves scripts by this key when the exact prompt is not scripted.
struct RequestTag {
  std::vector<std::string> parts;

  std::string key() const;
  bool empty() const { return parts.empty(); }
};

struct GenerationRequest {
  std::string prompt;
  std::size_t max_new_tokens = 64;
  double temperature = 0.0;
  RequestTag tag;
};

struct ChoiceRequest {
  std::string prompt;
  std::vector<std::string> options;
  RequestTag tag;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string generate(const GenerationRequest& req) = 0;
  // Unnormalized log-scores, one per option, in option order.
  virtual std::vector<double> score_options(const ChoiceRequest& req) = 0;
};

// Closed-world script for offline runs. Lookups try the exact prompt, then
// the request tag key. Unscripted completions return default_completion;
// unscripted choices return default_choice (uniform when empty), except
// for "compare" requests whose two candidates both appear in preferences,
// which get P(first) = s1 / (s1 + s2).
struct MockScript {
  // Values either positional or keyed by option label; labeled entries
  // follow the options when they are permuted.
  struct ChoiceEntry {
    std::vector<double> values;
    std::vector<std::string> labels;  // empty: positional

    std::vector<double> for_options(const std::vector<std::string>& options) const;
  };

  std::map<std::string, std::string> completions;
  std::map<std::string, ChoiceEntry> choices;          // probabilities
  std::map<std::string, ChoiceEntry> choice_logprobs;  // log-scores
  std::map<std::string, double> preferences;
  std::string default_completion = "N/A";
  std::vector<double> default_choice;

  static MockScript from_json(const nlohmann::json& j);
  static MockScript load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

class MockBackend : public Backend {
 public:
  explicit MockBackend(MockScript script);

  std::string generate(const GenerationRequest& req) override;
  std::vector<double> score_options(const ChoiceRequest& req) override;

  const MockScript& script() const { return script_; }

 private:
  MockScript script_;
};

// Completions-style JSON endpoint. Choice scoring echoes prompt + option
// with logprobs and sums the option's token log-probabilities.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendConfig cfg);

  std::string generate(const GenerationRequest& req) override;
  std::vector<double> score_options(const ChoiceRequest& req) override;

  // Attempts made by the most recent request (1 + retries on failure).
  std::size_t last_attempts() const { return last_attempts_.load(); }

 private:
  nlohmann::json post(const nlohmann::json& body);

  BackendConfig cfg_;
  std::string host_;
  std::string path_;
  std::atomic<std::size_t> last_attempts_{0};
};

// Memoizes generate() by (tag key, prompt); score_options passes through.
// Lets repeated runs over overlapping inputs reuse earlier answers.
class CachingBackend : public Backend {
 public:
  explicit CachingBackend(std::shared_ptr<Backend> inner);

  std::string generate(const GenerationRequest& req) override;
  std::vector<double> score_options(const ChoiceRequest& req) override;

  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }

 private:
  std::shared_ptr<Backend> inner_;
  std::mutex mu_;
  std::map<std::string, std::string> cache_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

// Mock (loading cfg.mock_script) or http backend for cfg.
std::shared_ptr<Backend> make_backend(const BackendConfig& cfg);

struct GatewayStats {
  std::size_t completions = 0;
  std::size_t choices = 0;
  std::size_t max_prompt_tokens = 0;
  std::size_t truncated = 0;
};

// Uniform entry point to text generation. Thread-safe; at most
// max_in_flight backend calls run at once.
class Gateway {
 public:
  Gateway(BackendConfig cfg, std::shared_ptr<Backend> backend);
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  static std::unique_ptr<Gateway> from_config(const BackendConfig& cfg);

  // Generated text, trimmed. The prompt is cut to token_budget first.
  std::string complete(const GenerationRequest& req);

  // Strictly positive probabilities summing to 1, in option order.
  std::vector<double> choice_probabilities(const ChoiceRequest& req);

  const BackendConfig& config() const { return cfg_; }
  Backend& backend() { return *backend_; }
  std::shared_ptr<Backend> shared_backend() const { return backend_; }

  GatewayStats stats() const;
  void reset_stats();

 private:
  class Slot;
  std::string fit_prompt(const std::string& prompt);

  BackendConfig cfg_;
  std::shared_ptr<Backend> backend_;
  std::mutex slots_mu_;
  std::condition_variable slots_cv_;
  std::size_t in_flight_ = 0;
  std::atomic<std::size_t> completions_{0};
  std::atomic<std::size_t> choices_{0};
  std::atomic<std::size_t> max_prompt_tokens_{0};
  std::atomic<std::size_t> truncated_{0};
};

// Numerically stable softmax; throws kNumeric on non-finite input.
std::vector<double> softmax(std::span<const double> scores);

}  // namespace ultra

#endif  // ULTRA_GATEWAY_HPP_
