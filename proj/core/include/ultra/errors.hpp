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

#ifndef ULTRA_ERRORS_HPP_
#define ULTRA_ERRORS_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ultra {

enum class ErrorKind {
  kValidation,  // bad input data or parameters
  kParse,       // malformed file or unparseable model output
  kTransport,   // network failure after retries
  kBackend,     // backend answered with an HTTP error
  kCapability,  // backend cannot do what was asked (e.g. no logprobs)
  kNumeric,     // non-finite or out-of-domain numbers
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorKind kind() const { return kind_; }
  // 1-based input line, set for parse errors on line-oriented files.
  std::optional<std::size_t> line() const { return line_; }

  // Same kind and line, message prefixed with "context: ".
  Error with_context(std::string_view context) const;

  // True for failures of an individual model call that callers may skip.
  bool is_call_failure() const {
    return kind_ == ErrorKind::kTransport || kind_ == ErrorKind::kBackend;
  }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace ultra

#endif  // ULTRA_ERRORS_HPP_
