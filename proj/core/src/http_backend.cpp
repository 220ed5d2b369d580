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


#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "ultra/errors.hpp"
#include "ultra/gateway.hpp"

namespace ultra {

namespace {

constexpr std::size_t kBodyExcerpt = 200;

}  // namespace

HttpBackend::HttpBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
  const std::string& url = cfg_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos ||
      (url.compare(0, scheme_end, "http") != 0 && url.compare(0, scheme_end, "https") != 0)) {
    fail(ErrorKind::kValidation, "endpoint must be an http(s) URL: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  host_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/completions" : url.substr(path_start);
}

nlohmann::json HttpBackend::post(const nlohmann::json& body) {
  const std::string payload = body.dump();
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  auto delay = cfg_.backoff;
  const std::size_t attempts = cfg_.retries + 1;
  for (std::size_t attempt = 1;; ++attempt) {
    last_attempts_ = attempt;
    httplib::Client client(host_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(path_, headers, payload, "application/json");
    if (res) {
      if (res->status >= 400) {
        fail(ErrorKind::kBackend, "HTTP " + std::to_string(res->status) + " from " + host_ + path_ +
                                      ": " + res->body.substr(0, kBodyExcerpt));
      }
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error&) {
        fail(ErrorKind::kBackend, "non-JSON response from " + host_ + path_ + ": " +
                                      res->body.substr(0, kBodyExcerpt));
      }
    }
    const std::string why = httplib::to_string(res.error());
    if (attempt >= attempts) {
      fail(ErrorKind::kTransport, "request to " + host_ + path_ + " failed after " +
                                      std::to_string(attempt) + " attempt(s): " + why);
    }
    spdlog::warn("request to {}{} failed ({}), retrying in {} ms", host_, path_, why, delay.count());
    std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

std::string HttpBackend::generate(const GenerationRequest& req) {
  nlohmann::json body = {{"model", cfg_.model},
                         {"prompt", req.prompt},
                         {"max_tokens", req.max_new_tokens},
                         {"temperature", req.temperature}};
  auto res = post(body);
  try {
    return res.at("choices").at(0).at("text").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::kBackend, "response has no choices[0].text: " + res.dump().substr(0, kBodyExcerpt));
  }
}

std::vector<double> HttpBackend::score_options(const ChoiceRequest& req) {
  std::vector<double> scores;
  for (const auto& option : req.options) {
    const std::string text = req.prompt + " " + option;
    nlohmann::json body = {{"model", cfg_.model}, {"prompt", text}, {"max_tokens", 0},
                           {"temperature", 0},    {"logprobs", 1},  {"echo", true}};
    auto res = post(body);
    const nlohmann::json* lp = nullptr;
    if (res.contains("choices") && res["choices"].is_array() && !res["choices"].empty()) {
      const auto& c = res["choices"][0];
      if (c.contains("logprobs") && c["logprobs"].is_object()) lp = &c["logprobs"];
    }
    if (lp == nullptr || !lp->contains("token_logprobs") || !lp->contains("text_offset")) {
      fail(ErrorKind::kCapability,
           "backend did not return echoed token log-probabilities; option scoring needs a "
           "completions endpoint supporting logprobs+echo, or use --mock");
    }
    const auto& logps = (*lp)["token_logprobs"];
    const auto& offsets = (*lp)["text_offset"];
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < std::min(logps.size(), offsets.size()); ++i) {
      if (offsets[i].get<std::size_t>() < req.prompt.size() || logps[i].is_null()) continue;
      total += logps[i].is_number() ? logps[i].get<double>() : std::nan("");
      ++counted;
      if (cfg_.scoring == OptionScoring::kFirstToken) break;
    }
    if (counted == 0) {
      fail(ErrorKind::kCapability, "backend returned no log-probabilities for option '" + option + "'");
    }
    scores.push_back(total);
  }
  return scores;
}

}  // namespace ultra
