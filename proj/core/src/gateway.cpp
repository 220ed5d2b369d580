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


#include "ultra/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <spdlog/spdlog.h>

#include "ultra/errors.hpp"
#include "ultra/text.hpp"

namespace ultra {

void BackendConfig::validate() const {
  if (token_budget == 0) fail(ErrorKind::kValidation, "token_budget must be positive");
  if (max_in_flight == 0) fail(ErrorKind::kValidation, "max_in_flight must be positive");
  if (kind == BackendKind::kHttp && endpoint.empty()) {
    fail(ErrorKind::kValidation,
         "http backend requires an endpoint (config 'endpoint' or ULTRA_ENDPOINT)");
  }
}

std::string RequestTag::key() const {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += '|';
    out += parts[i];
  }
  return out;
}

std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) return {};
  for (double s : scores) {
    if (!std::isfinite(s)) fail(ErrorKind::kNumeric, "non-finite score passed to softmax");
  }
  const double hi = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - hi);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

// RAII slot in the in-flight limiter.
class Gateway::Slot {
 public:
  explicit Slot(Gateway& gw) : gw_(gw) {
    std::unique_lock lock(gw_.slots_mu_);
    gw_.slots_cv_.wait(lock, [&] { return gw_.in_flight_ < gw_.cfg_.max_in_flight; });
    ++gw_.in_flight_;
  }
  ~Slot() {
    {
      std::lock_guard lock(gw_.slots_mu_);
      --gw_.in_flight_;
    }
    gw_.slots_cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  Gateway& gw_;
};

Gateway::Gateway(BackendConfig cfg, std::shared_ptr<Backend> backend)
    : cfg_(std::move(cfg)), backend_(std::move(backend)) {
  cfg_.validate();
  if (!backend_) fail(ErrorKind::kValidation, "gateway needs a backend");
}

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg) {
  cfg.validate();
  if (cfg.kind == BackendKind::kMock) {
    return std::make_shared<MockBackend>(
        cfg.mock_script.empty() ? MockScript{} : MockScript::load(cfg.mock_script));
  }
  return std::make_shared<HttpBackend>(cfg);
}

std::unique_ptr<Gateway> Gateway::from_config(const BackendConfig& cfg) {
  return std::make_unique<Gateway>(cfg, make_backend(cfg));
}

CachingBackend::CachingBackend(std::shared_ptr<Backend> inner) : inner_(std::move(inner)) {
  if (!inner_) fail(ErrorKind::kValidation, "caching backend needs an inner backend");
}

std::string CachingBackend::generate(const GenerationRequest& req) {
  const std::string key = req.tag.key() + '\x1f' + req.prompt;
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
  }
  ++misses_;
  std::string out = inner_->generate(req);
  std::lock_guard lock(mu_);
  cache_.emplace(key, out);
  return out;
}

std::vector<double> CachingBackend::score_options(const ChoiceRequest& req) {
  return inner_->score_options(req);
}

std::string Gateway::fit_prompt(const std::string& prompt) {
  std::string fitted = truncate_to_tokens(prompt, cfg_.token_budget);
  if (fitted.size() != prompt.size()) {
    ++truncated_;
    spdlog::debug("prompt truncated to {} tokens", cfg_.token_budget);
  }
  const std::size_t tokens = approx_tokens(fitted);
  std::size_t seen = max_prompt_tokens_.load();
  while (tokens > seen && !max_prompt_tokens_.compare_exchange_weak(seen, tokens)) {
  }
  return fitted;
}

std::string Gateway::complete(const GenerationRequest& req) {
  if (trim(req.prompt).empty()) fail(ErrorKind::kValidation, "empty prompt");
  if (req.max_new_tokens == 0) fail(ErrorKind::kValidation, "max_new_tokens must be positive");
  if (!(req.temperature >= 0.0)) fail(ErrorKind::kValidation, "temperature must be >= 0");

  GenerationRequest sent = req;
  sent.prompt = fit_prompt(req.prompt);
  ++completions_;
  Slot slot(*this);
  return trim(backend_->generate(sent));
}

std::vector<double> Gateway::choice_probabilities(const ChoiceRequest& req) {
  if (trim(req.prompt).empty()) fail(ErrorKind::kValidation, "empty prompt");
  if (req.options.size() < 2) fail(ErrorKind::kValidation, "choice needs at least two options");
  if (std::set<std::string>(req.options.begin(), req.options.end()).size() != req.options.size()) {
    fail(ErrorKind::kValidation, "choice options must be distinct");
  }

  ChoiceRequest sent = req;
  sent.prompt = fit_prompt(req.prompt);
  ++choices_;
  std::vector<double> scores;
  {
    Slot slot(*this);
    scores = backend_->score_options(sent);
  }
  if (scores.size() != req.options.size()) {
    fail(ErrorKind::kNumeric, "backend returned " + std::to_string(scores.size()) +
                                  " scores for " + std::to_string(req.options.size()) + " options");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) fail(ErrorKind::kNumeric, "backend returned a non-finite option score");
  }
  auto probs = softmax(scores);
  // Keep the strictly-positive contract under extreme score gaps.
  bool clamped = false;
  for (double& p : probs) {
    if (p < std::numeric_limits<double>::min()) {
      p = std::numeric_limits<double>::min();
      clamped = true;
    }
  }
  if (clamped) {
    double sum = 0.0;
    for (double p : probs) sum += p;
    for (double& p : probs) p /= sum;
  }
  return probs;
}

GatewayStats Gateway::stats() const {
  return GatewayStats{completions_.load(), choices_.load(), max_prompt_tokens_.load(),
                      truncated_.load()};
}

void Gateway::reset_stats() {
  completions_ = 0;
  choices_ = 0;
  max_prompt_tokens_ = 0;
  truncated_ = 0;
}

}  // namespace ultra
