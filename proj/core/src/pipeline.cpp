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


#include "ultra/pipeline.hpp"

#include <atomic>
#include <exception>
#include <istream>
#include <ostream>
#include <thread>

#include <spdlog/spdlog.h>

#include "ultra/ensemble.hpp"
#include "ultra/errors.hpp"
#include "ultra/leafer.hpp"
#include "ultra/text.hpp"

namespace ultra {

std::string_view to_string(LeaferMode m) {
  switch (m) {
    case LeaferMode::kOff: return "off";
    case LeaferMode::kOracle: return "oracle";
    case LeaferMode::kBackend: return "backend";
  }
  return "?";
}

LeaferMode leafer_mode_from_string(std::string_view s) {
  if (s == "off") return LeaferMode::kOff;
  if (s == "oracle") return LeaferMode::kOracle;
  if (s == "backend") return LeaferMode::kBackend;
  fail(ErrorKind::kValidation, "unknown leafer mode '" + std::string(s) +
                                   "' (expected off, oracle or backend)");
}

void PipelineConfig::validate() const {
  if (window_k < 2) fail(ErrorKind::kValidation, "window_k must be >= 2");
  if (refine.prune_cap == 0) fail(ErrorKind::kValidation, "prune_cap must be >= 1");
  if (workers == 0) fail(ErrorKind::kValidation, "workers must be >= 1");
  backend.validate();
  if (judge_backend) judge_backend->validate();
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    const std::size_t count = std::min(workers, n);
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Pipeline::Pipeline(PipelineConfig cfg, Gateway& gw, Gateway* judge, PromptTemplates templates)
    : cfg_(std::move(cfg)), gw_(gw), judge_(judge), templates_(std::move(templates)) {
  cfg_.validate();
}

CandidateSet Pipeline::apply_leafer(const Document& doc, const CandidateSet& cs) {
  if (cs.candidates.empty()) return cs;
  const auto windows = split_windows(doc, cfg_.window_k);
  std::vector<Judgment> judgments;
  judgments.reserve(cs.candidates.size());
  for (const auto& c : cs.candidates) {
    const Window w = judgment_window(doc, windows, c);
    if (cfg_.leafer == LeaferMode::kOracle) {
      auto gold = gold_for_window(doc, w, cs.question.role, c.text);
      judgments.push_back(make_judgment(c.text, gold));
      continue;
    }
    Gateway& jg = judge_ != nullptr ? *judge_ : gw_;
    try {
      judgments.push_back(judge(jg, templates_, w, cs.question, c.text));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kParse && !e.is_call_failure()) throw;
      spdlog::warn("keeping '{}' unchanged: {}", c.text, e.what());
      judgments.push_back(Judgment{JudgmentClass::kExact, "", std::nullopt});
    }
  }
  return rectify(doc, cs, judgments);
}

ExtractionOutput Pipeline::run_question(const Document& doc, const Question& q) {
  if (cfg_.leafer == LeaferMode::kOracle && !doc.gold) {
    fail(ErrorKind::kValidation,
         "oracle LEAFER needs gold annotations; document '" + doc.id + "' has none");
  }
  const CandidateSet layer1 = extract_candidates(gw_, templates_, doc, q, cfg_.window_k);
  const CandidateSet rectified =
      cfg_.leafer == LeaferMode::kOff ? layer1 : apply_leafer(doc, layer1);
  const RankedArgumentSet ranked =
      cfg_.layer2 ? rank_and_filter(gw_, templates_, doc, rectified, cfg_.refine, &priors_)
                  : passthrough(rectified);

  ExtractionOutput out;
  out.doc_id = doc.id;
  out.role = q.role;
  out.final_args = ranked.final_texts();
  if (cfg_.ensemble) {
    const auto doc_args = extract_doclevel(gw_, templates_, doc, q);
    out.final_args = merge(doc, ranked, q, doc_args).merged;
  }
  if (cfg_.trace) {
    out.trace = StageTrace{layer1.texts(), rectified.texts(), ranked.final_texts(), out.final_args};
  }
  out.candidates = layer1.candidates;
  return out;
}

RunResult Pipeline::run(const std::vector<Document>& corpus, const Ontology& ontology) {
  struct Unit {
    std::size_t doc;
    Question question;
  };
  std::vector<Unit> units;
  std::vector<std::optional<Error>> doc_errors(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    try {
      for (auto& q : questions_for(corpus[d], ontology)) units.push_back(Unit{d, std::move(q)});
    } catch (const Error& e) {
      doc_errors[d] = e.with_context("document '" + corpus[d].id + "'");
    }
  }

  std::vector<std::optional<ExtractionOutput>> results(units.size());
  std::vector<std::optional<Error>> unit_errors(units.size());
  parallel_for(units.size(), cfg_.workers, [&](std::size_t u) {
    try {
      results[u] = run_question(corpus[units[u].doc], units[u].question);
    } catch (const Error& e) {
      unit_errors[u] = e;
    }
  });
  for (std::size_t u = 0; u < units.size(); ++u) {
    auto& err = doc_errors[units[u].doc];
    if (unit_errors[u] && !err) err = unit_errors[u];
  }

  RunResult result;
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (!doc_errors[units[u].doc]) result.outputs.push_back(std::move(*results[u]));
  }
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    if (!doc_errors[d]) continue;
    spdlog::error("document '{}' failed: {}", corpus[d].id, doc_errors[d]->what());
    result.failures.push_back(DocumentFailure{corpus[d].id, doc_errors[d]->what()});
  }
  if (!corpus.empty() && result.failures.size() == corpus.size()) {
    for (const auto& e : doc_errors) {
      if (e) throw e->with_context("all documents failed; first");
    }
  }
  return result;
}

nlohmann::ordered_json to_json(const ExtractionOutput& out) {
  nlohmann::ordered_json j;
  j["doc"] = out.doc_id;
  j["role"] = out.role;
  j["arguments"] = out.final_args;
  if (out.trace) {
    j["layer1"] = out.trace->layer1;
    j["leafer"] = out.trace->leafer;
    j["layer2"] = out.trace->layer2;
    j["merged"] = out.trace->merged;
  }
  return j;
}

ExtractionOutput output_from_json(const nlohmann::json& j) {
  ExtractionOutput out;
  try {
    out.doc_id = j.at("doc").get<std::string>();
    out.role = j.at("role").get<std::string>();
    out.final_args = j.at("arguments").get<std::vector<std::string>>();
    if (j.contains("layer1")) {
      out.trace = StageTrace{j.at("layer1").get<std::vector<std::string>>(),
                             j.value("leafer", std::vector<std::string>{}),
                             j.value("layer2", std::vector<std::string>{}),
                             j.value("merged", std::vector<std::string>{})};
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kValidation, std::string("bad prediction record: ") + e.what());
  }
  return out;
}

void write_outputs(std::ostream& out, const std::vector<ExtractionOutput>& outputs) {
  for (const auto& o : outputs) out << to_json(o).dump() << '\n';
}

std::vector<ExtractionOutput> read_outputs(std::istream& in) {
  std::vector<ExtractionOutput> outputs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      outputs.push_back(output_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(lineno) + ": malformed JSON: " + e.what(),
                  lineno);
    } catch (const Error& e) {
      throw e.with_context("line " + std::to_string(lineno));
    }
  }
  return outputs;
}

}  // namespace ultra
