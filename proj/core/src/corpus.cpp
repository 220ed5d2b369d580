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


#include "ultra/corpus.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "ultra/errors.hpp"
#include "ultra/text.hpp"

namespace ultra {

std::string Document::full_text() const {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out += ' ';
    out += sentences[i];
  }
  return out;
}

std::vector<std::size_t> Document::sentence_offsets() const {
  std::vector<std::size_t> offsets;
  offsets.reserve(sentences.size());
  std::size_t pos = 0;
  for (const auto& s : sentences) {
    offsets.push_back(pos);
    pos += s.size() + 1;
  }
  return offsets;
}

std::vector<std::string> Document::gold_spans(std::string_view role) const {
  std::vector<std::string> out;
  if (!gold) return out;
  for (const auto& g : *gold) {
    if (g.role == role) out.insert(out.end(), g.spans.begin(), g.spans.end());
  }
  return out;
}

Ontology::Ontology(std::map<std::string, std::vector<std::string>> roles)
    : roles_(roles.begin(), roles.end()) {}

Ontology Ontology::from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::kValidation, "ontology must be a JSON object");
  std::map<std::string, std::vector<std::string>> roles;
  for (const auto& [type, list] : j.items()) {
    if (type.empty()) fail(ErrorKind::kValidation, "ontology has an empty event type");
    if (!list.is_array()) {
      fail(ErrorKind::kValidation, "ontology entry '" + type + "' must be a list of roles");
    }
    auto& out = roles[type];
    for (const auto& r : list) {
      if (!r.is_string() || r.get<std::string>().empty()) {
        fail(ErrorKind::kValidation, "ontology entry '" + type + "' has a non-string or empty role");
      }
      out.push_back(r.get<std::string>());
    }
  }
  return Ontology(std::move(roles));
}

Ontology Ontology::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kValidation, "cannot open ontology " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  return from_json(j);
}

bool Ontology::contains(std::string_view event_type) const {
  return roles_.find(event_type) != roles_.end();
}

const std::vector<std::string>& Ontology::roles(std::string_view event_type) const {
  auto it = roles_.find(event_type);
  if (it == roles_.end()) {
    std::string known;
    for (const auto& [type, _] : roles_) {
      if (!known.empty()) known += ", ";
      known += type;
    }
    fail(ErrorKind::kValidation, "unknown event type '" + std::string(event_type) +
                                     "'; known types: " + known);
  }
  return it->second;
}

std::vector<std::string> Ontology::event_types() const {
  std::vector<std::string> out;
  for (const auto& [type, _] : roles_) out.push_back(type);
  return out;
}

void validate(const Document& doc) {
  if (doc.id.empty()) fail(ErrorKind::kValidation, "document with empty id");
  const std::string who = "document '" + doc.id + "'";
  if (doc.event_type.empty()) fail(ErrorKind::kValidation, who + " has no event_type");
  if (doc.sentences.empty()) fail(ErrorKind::kValidation, who + " has no sentences");
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    if (trim(doc.sentences[i]).empty()) {
      fail(ErrorKind::kValidation, who + " has an empty sentence at index " + std::to_string(i));
    }
  }
  if (doc.gold) {
    for (const auto& g : *doc.gold) {
      if (g.role.empty()) fail(ErrorKind::kValidation, who + " has a gold entry without role");
      if (g.spans.empty()) {
        fail(ErrorKind::kValidation, who + " gold role '" + g.role + "' has no spans");
      }
    }
  }
}

namespace {

std::string require_string(const nlohmann::json& j, const char* field,
                           const std::string& who) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    fail(ErrorKind::kValidation, who + ": missing or non-string field '" + field + "'");
  }
  return it->get<std::string>();
}

}  // namespace

Document document_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::kValidation, "document record must be a JSON object");
  Document doc;
  doc.id = require_string(j, "id", "document");
  const std::string who = "document '" + doc.id + "'";
  doc.title = j.contains("title") ? require_string(j, "title", who) : "";
  doc.event_type = require_string(j, "event_type", who);

  auto sents = j.find("sentences");
  if (sents == j.end() || !sents->is_array()) {
    fail(ErrorKind::kValidation, who + ": missing 'sentences' list");
  }
  for (const auto& s : *sents) {
    if (!s.is_string()) fail(ErrorKind::kValidation, who + ": non-string sentence");
    doc.sentences.push_back(s.get<std::string>());
  }

  if (auto g = j.find("gold"); g != j.end() && !g->is_null()) {
    if (!g->is_array()) fail(ErrorKind::kValidation, who + ": 'gold' must be a list");
    std::vector<GoldAnnotation> gold;
    for (const auto& entry : *g) {
      GoldAnnotation ann;
      ann.role = require_string(entry, "role", who + " gold");
      auto spans = entry.find("spans");
      if (spans == entry.end() || !spans->is_array()) {
        fail(ErrorKind::kValidation, who + ": gold role '" + ann.role + "' needs 'spans'");
      }
      for (const auto& s : *spans) {
        if (!s.is_string()) fail(ErrorKind::kValidation, who + ": non-string gold span");
        ann.spans.push_back(s.get<std::string>());
      }
      gold.push_back(std::move(ann));
    }
    doc.gold = std::move(gold);
  }
  validate(doc);
  return doc;
}

nlohmann::ordered_json to_json(const Document& doc) {
  nlohmann::ordered_json j;
  j["id"] = doc.id;
  j["title"] = doc.title;
  j["event_type"] = doc.event_type;
  j["sentences"] = doc.sentences;
  if (doc.gold) {
    j["gold"] = nlohmann::ordered_json::array();
    for (const auto& g : *doc.gold) {
      j["gold"].push_back({{"role", g.role}, {"spans", g.spans}});
    }
  }
  return j;
}

std::vector<Document> read_corpus(std::istream& in) {
  std::vector<Document> docs;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::kParse,
                  "line " + std::to_string(lineno) + ": malformed JSON: " + e.what(), lineno);
    }
    Document doc;
    try {
      doc = document_from_json(j);
    } catch (const Error& e) {
      throw e.with_context("line " + std::to_string(lineno));
    }
    if (!ids.insert(doc.id).second) {
      fail(ErrorKind::kValidation, "line " + std::to_string(lineno) +
                                       ": duplicate document id '" + doc.id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kValidation, "cannot open corpus " + path.string());
  try {
    return read_corpus(in);
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

void write_corpus(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& d : docs) out << to_json(d).dump() << '\n';
}

std::vector<Question> questions_for(const Document& doc, const Ontology& ontology) {
  std::vector<Question> out;
  for (const auto& role : ontology.roles(doc.event_type)) {
    out.push_back(Question{doc.event_type, role});
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i + 1;
    if (j >= text.size() || !std::isspace(static_cast<unsigned char>(text[j]))) continue;
    while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j < text.size() && std::isupper(static_cast<unsigned char>(text[j]))) {
      auto s = trim(text.substr(begin, i + 1 - begin));
      if (!s.empty()) out.push_back(std::move(s));
      begin = j;
    }
  }
  auto tail = trim(text.substr(begin));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

}  // namespace ultra
