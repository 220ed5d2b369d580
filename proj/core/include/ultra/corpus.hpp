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

#ifndef ULTRA_CORPUS_HPP_
#define ULTRA_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ultra {

struct GoldAnnotation {
  std::string role;
  std::vector<std::string> spans;  // verbatim, at least one

  bool operator==(const GoldAnnotation&) const = default;
};

struct Document {
  std::string id;
  std::string title;  // metadata only; never part of the extracted text
  std::string event_type;
  std::vector<std::string> sentences;
  std::optional<std::vector<GoldAnnotation>> gold;

  bool operator==(const Document&) const = default;

  // Sentences joined by single spaces. All character offsets in the
  // library are relative to this string.
  std::string full_text() const;
  // Offset of each sentence within full_text().
  std::vector<std::size_t> sentence_offsets() const;
  // Gold spans annotated for role, empty when none.
  std::vector<std::string> gold_spans(std::string_view role) const;
};

struct Question {
  std::string event_type;
  std::string role;

  bool operator==(const Question&) const = default;
  auto operator<=>(const Question&) const = default;
};

// Event type -> ordered role names.
class Ontology {
 public:
  Ontology() = default;
  explicit Ontology(std::map<std::string, std::vector<std::string>> roles);

  static Ontology load(const std::filesystem::path& path);
  static Ontology from_json(const nlohmann::json& j);

  bool contains(std::string_view event_type) const;
  const std::vector<std::string>& roles(std::string_view event_type) const;
  std::vector<std::string> event_types() const;
  std::size_t size() const { return roles_.size(); }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> roles_;
};

// Throws kValidation naming the document id on invariant violations.
void validate(const Document& doc);

Document document_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const Document& doc);

// Newline-delimited JSON, one document per line; blank lines skipped.
std::vector<Document> read_corpus(std::istream& in);
std::vector<Document> load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const std::vector<Document>& docs);

std::vector<Question> questions_for(const Document& doc,
                                    const Ontology& ontology);

// Fallback for raw text: split after . ! or ? when followed by whitespace
// and an uppercase letter.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace ultra

#endif  // ULTRA_CORPUS_HPP_
