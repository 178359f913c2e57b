// Copyright 2026 The factalign Authors.
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

#include "factalign/records.h"

#include <set>

#include "factalign/language.h"

namespace factalign {
namespace json_schema {

void ExpectObject(const json &j, std::string_view what) {
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
}

void ExpectKeys(const json &j, std::initializer_list<std::string_view> allowed,
                std::string_view what) {
  ExpectObject(j, what);
  for (const auto &[key, value] : j.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || a == key;
    if (!ok) throw ParseError(std::string(what) + ": unexpected field '" + key + "'");
  }
}

const json &Field(const json &j, std::string_view key, std::string_view what) {
  auto it = j.find(std::string(key));
  if (it == j.end()) {
    throw ParseError(std::string(what) + ": missing field '" + std::string(key) + "'");
  }
  return *it;
}

namespace {

[[noreturn]] void WrongType(std::string_view key, std::string_view what,
                            std::string_view expected) {
  throw ParseError(std::string(what) + ": field '" + std::string(key) + "' must be " +
                   std::string(expected));
}

}  // namespace

std::string String(const json &j, std::string_view key, std::string_view what) {
  const json &v = Field(j, key, what);
  if (!v.is_string()) WrongType(key, what, "a string");
  return v.get<std::string>();
}

double Number(const json &j, std::string_view key, std::string_view what) {
  const json &v = Field(j, key, what);
  if (!v.is_number()) WrongType(key, what, "a number");
  return v.get<double>();
}

int64_t Integer(const json &j, std::string_view key, std::string_view what) {
  const json &v = Field(j, key, what);
  if (!v.is_number_integer()) WrongType(key, what, "an integer");
  return v.get<int64_t>();
}

bool Boolean(const json &j, std::string_view key, std::string_view what) {
  const json &v = Field(j, key, what);
  if (!v.is_boolean()) WrongType(key, what, "a boolean");
  return v.get<bool>();
}

const json &Array(const json &j, std::string_view key, std::string_view what) {
  const json &v = Field(j, key, what);
  if (!v.is_array()) WrongType(key, what, "an array");
  return v;
}

}  // namespace json_schema

using namespace json_schema;

namespace {

Language LanguageField(const json &j, std::string_view key, std::string_view what) {
  std::string code = String(j, key, what);
  auto lang = TryParseLanguage(code);
  if (!lang) throw ParseError(std::string(what) + ": unsupported language '" + code + "'");
  return *lang;
}

json Labels(const Entity &e) {
  json labels = json::object();
  for (const auto &[lang, label] : e.labels) labels[std::string(LanguageCode(lang))] = label;
  return labels;
}

std::map<Language, std::string> ParseLabels(const json &j, std::string_view what) {
  if (!j.is_object()) throw ParseError(std::string(what) + ": labels must be an object");
  std::map<Language, std::string> out;
  for (const auto &[code, label] : j.items()) {
    auto lang = TryParseLanguage(code);
    if (!lang) throw ParseError(std::string(what) + ": unsupported label language '" + code + "'");
    if (!label.is_string()) throw ParseError(std::string(what) + ": label must be a string");
    out[*lang] = label.get<std::string>();
  }
  return out;
}

}  // namespace

json ToJson(const Entity &entity) { return {{"qid", entity.qid}, {"labels", Labels(entity)}}; }

template <>
Entity FromJson<Entity>(const json &j) {
  ExpectKeys(j, {"qid", "labels"}, "entity");
  Entity e;
  e.qid = String(j, "qid", "entity");
  e.labels = ParseLabels(Field(j, "labels", "entity"), "entity");
  return e;
}

json ToJson(const Value &value) {
  struct Visitor {
    json operator()(const ItemValue &v) const {
      return {{"type", "item"}, {"qid", v.entity.qid}, {"labels", Labels(v.entity)}};
    }
    json operator()(const TimeValue &v) const {
      return {{"type", "time"}, {"time", v.time}, {"precision", v.precision},
              {"calendar", v.calendar}};
    }
    json operator()(const QuantityValue &v) const {
      return {{"type", "quantity"},
              {"amount", v.amount},
              {"unit", v.unit ? ToJson(*v.unit) : json(nullptr)}};
    }
    json operator()(const MonoTextValue &v) const {
      return {{"type", "monolingualtext"}, {"text", v.text}, {"language", v.language}};
    }
  };
  return std::visit(Visitor{}, value);
}

template <>
Value FromJson<Value>(const json &j) {
  ExpectObject(j, "value");
  std::string type = String(j, "type", "value");
  if (type == "item") {
    ExpectKeys(j, {"type", "qid", "labels"}, "item value");
    ItemValue v;
    v.entity.qid = String(j, "qid", "item value");
    v.entity.labels = ParseLabels(Field(j, "labels", "item value"), "item value");
    return v;
  }
  if (type == "time") {
    ExpectKeys(j, {"type", "time", "precision", "calendar"}, "time value");
    TimeValue v;
    v.time = String(j, "time", "time value");
    v.precision = static_cast<int>(Integer(j, "precision", "time value"));
    v.calendar = String(j, "calendar", "time value");
    return v;
  }
  if (type == "quantity") {
    ExpectKeys(j, {"type", "amount", "unit"}, "quantity value");
    QuantityValue v;
    v.amount = String(j, "amount", "quantity value");
    const json &unit = Field(j, "unit", "quantity value");
    if (!unit.is_null()) v.unit = FromJson<Entity>(unit);
    return v;
  }
  if (type == "monolingualtext") {
    ExpectKeys(j, {"type", "text", "language"}, "text value");
    MonoTextValue v;
    v.text = String(j, "text", "text value");
    v.language = String(j, "language", "text value");
    return v;
  }
  throw ParseError("value: unknown type '" + type + "'");
}

json ToJson(const Fact &fact) {
  json qualifiers = json::array();
  for (const Qualifier &q : fact.qualifiers) {
    qualifiers.push_back({{"pid", q.predicate.pid},
                          {"predicate_label", q.predicate.label},
                          {"value", ToJson(q.value)}});
  }
  return {{"subject_qid", fact.subject.qid},
          {"labels", Labels(fact.subject)},
          {"pid", fact.predicate.pid},
          {"predicate_label", fact.predicate.label},
          {"object", ToJson(fact.object)},
          {"qualifiers", qualifiers}};
}

template <>
Fact FromJson<Fact>(const json &j) {
  ExpectKeys(j, {"subject_qid", "labels", "pid", "predicate_label", "object", "qualifiers"},
             "fact");
  Fact f;
  f.subject.qid = String(j, "subject_qid", "fact");
  f.subject.labels = ParseLabels(Field(j, "labels", "fact"), "fact");
  f.predicate.pid = String(j, "pid", "fact");
  f.predicate.label = String(j, "predicate_label", "fact");
  f.object = FromJson<Value>(Field(j, "object", "fact"));
  for (const json &q : Array(j, "qualifiers", "fact")) {
    ExpectKeys(q, {"pid", "predicate_label", "value"}, "qualifier");
    Qualifier qual;
    qual.predicate.pid = String(q, "pid", "qualifier");
    qual.predicate.label = String(q, "predicate_label", "qualifier");
    qual.value = FromJson<Value>(Field(q, "value", "qualifier"));
    f.qualifiers.push_back(std::move(qual));
  }
  return f;
}

json ToJson(const Sentence &s) {
  return {{"text", s.text},
          {"language", LanguageCode(s.language)},
          {"section", s.section},
          {"page_id", s.page_id},
          {"entity_id", s.entity_id},
          {"ordinal", s.ordinal}};
}

template <>
Sentence FromJson<Sentence>(const json &j) {
  ExpectKeys(j, {"text", "language", "section", "page_id", "entity_id", "ordinal"},
             "sentence");
  return MakeSentence(String(j, "text", "sentence"), LanguageField(j, "language", "sentence"),
                      String(j, "section", "sentence"), String(j, "page_id", "sentence"),
                      String(j, "entity_id", "sentence"),
                      static_cast<int>(Integer(j, "ordinal", "sentence")));
}

json ToJson(const Rejection &r) {
  return {{"sentence", ToJson(r.sentence)}, {"reason", RejectReasonName(r.reason)}};
}

template <>
Rejection FromJson<Rejection>(const json &j) {
  ExpectKeys(j, {"sentence", "reason"}, "rejection");
  Rejection r{FromJson<Sentence>(Field(j, "sentence", "rejection")), RejectReason::kTooShort};
  try {
    r.reason = ParseRejectReason(String(j, "reason", "rejection"));
  } catch (const ParseError &) {
    throw;
  } catch (const Error &e) {
    throw ParseError(std::string("rejection: ") + e.what());
  }
  return r;
}

json ToJson(const SimilarityComponents &c) {
  return {{"semantic_native", c.semantic_native},
          {"tfidf_fact_to_lr", c.tfidf_fact_to_lr},
          {"tfidf_sentence_to_en", c.tfidf_sentence_to_en},
          {"semantic_translated", c.semantic_translated}};
}

template <>
SimilarityComponents FromJson<SimilarityComponents>(const json &j) {
  constexpr std::string_view what = "components";
  ExpectKeys(j, {"semantic_native", "tfidf_fact_to_lr", "tfidf_sentence_to_en",
                 "semantic_translated"},
             what);
  SimilarityComponents c;
  c.semantic_native = Number(j, "semantic_native", what);
  c.tfidf_fact_to_lr = Number(j, "tfidf_fact_to_lr", what);
  c.tfidf_sentence_to_en = Number(j, "tfidf_sentence_to_en", what);
  c.semantic_translated = Number(j, "semantic_translated", what);
  for (double v : c.AsArray()) {
    if (!(v >= 0 && v <= 1)) throw ParseError("components: value outside [0, 1]");
  }
  return c;
}

json ToJson(const ScoredCandidate &c) {
  return {{"fact_ref", FactId(c.fact)},
          {"fact", ToJson(c.fact)},
          {"score", c.score},
          {"components", ToJson(c.components)}};
}

template <>
ScoredCandidate FromJson<ScoredCandidate>(const json &j) {
  ExpectKeys(j, {"fact_ref", "fact", "score", "components"}, "candidate");
  ScoredCandidate c;
  c.fact = FromJson<Fact>(Field(j, "fact", "candidate"));
  std::string ref = String(j, "fact_ref", "candidate");
  if (ref != FactId(c.fact)) throw ParseError("candidate: fact_ref does not match fact");
  c.score = Number(j, "score", "candidate");
  if (!(c.score >= 0 && c.score <= 1)) throw ParseError("candidate: score outside [0, 1]");
  c.components = FromJson<SimilarityComponents>(Field(j, "components", "candidate"));
  return c;
}

json ToJson(const CandidateSet &set) {
  json candidates = json::array();
  for (const ScoredCandidate &c : set.candidates) candidates.push_back(ToJson(c));
  return {{"sentence", ToJson(set.sentence)}, {"candidates", candidates}};
}

template <>
CandidateSet FromJson<CandidateSet>(const json &j) {
  ExpectKeys(j, {"sentence", "candidates"}, "candidate set");
  CandidateSet set;
  set.sentence = FromJson<Sentence>(Field(j, "sentence", "candidate set"));
  for (const json &c : Array(j, "candidates", "candidate set")) {
    set.candidates.push_back(FromJson<ScoredCandidate>(c));
  }
  if (set.candidates.empty()) throw ParseError("candidate set: no candidates");
  for (size_t i = 1; i < set.candidates.size(); ++i) {
    if (set.candidates[i].score > set.candidates[i - 1].score) {
      throw ParseError("candidate set: scores not in descending order");
    }
  }
  return set;
}

json ToJson(const AlignedInstance &a) {
  json facts = json::array();
  for (const Fact &f : a.facts) facts.push_back(ToJson(f));
  return {{"sentence", ToJson(a.sentence)},
          {"facts", facts},
          {"method", SelectionMethodName(a.method)},
          {"section", a.section}};
}

template <>
AlignedInstance FromJson<AlignedInstance>(const json &j) {
  ExpectKeys(j, {"sentence", "facts", "method", "section"}, "aligned instance");
  AlignedInstance a;
  a.sentence = FromJson<Sentence>(Field(j, "sentence", "aligned instance"));
  for (const json &f : Array(j, "facts", "aligned instance")) a.facts.push_back(FromJson<Fact>(f));
  if (a.facts.empty()) throw ParseError("aligned instance: no facts");
  try {
    a.method = ParseSelectionMethod(String(j, "method", "aligned instance"));
  } catch (const ConfigError &e) {
    throw ParseError(std::string("aligned instance: ") + e.what());
  }
  a.section = String(j, "section", "aligned instance");
  return a;
}

json ToJson(const PairExample &p) {
  return {{"pair_text", p.pair_text},
          {"label", PairLabelName(p.label)},
          {"page_id", p.source_page},
          {"ordinal", p.sentence_ordinal}};
}

template <>
PairExample FromJson<PairExample>(const json &j) {
  ExpectKeys(j, {"pair_text", "label", "page_id", "ordinal"}, "pair");
  PairExample p;
  p.pair_text = String(j, "pair_text", "pair");
  p.label = ParsePairLabel(String(j, "label", "pair"));
  p.source_page = String(j, "page_id", "pair");
  p.sentence_ordinal = static_cast<int>(Integer(j, "ordinal", "pair"));
  if (p.pair_text.find(kPairSeparator) == std::string::npos) {
    throw ParseError("pair: pair_text lacks the separator");
  }
  return p;
}

json ToJson(const DistantSentence &d) {
  json facts = json::array();
  for (const Fact &f : d.facts) facts.push_back(ToJson(f));
  return {{"sentence", ToJson(d.sentence)}, {"facts", facts}};
}

template <>
DistantSentence FromJson<DistantSentence>(const json &j) {
  ExpectKeys(j, {"sentence", "facts"}, "distant sentence");
  DistantSentence d;
  d.sentence = FromJson<Sentence>(Field(j, "sentence", "distant sentence"));
  for (const json &f : Array(j, "facts", "distant sentence")) d.facts.push_back(FromJson<Fact>(f));
  return d;
}

json ToJson(const PrfScores &s) {
  return {{"precision", s.precision}, {"recall", s.recall},
          {"f1", s.f1},               {"support", s.support},
          {"tp", s.true_positives},   {"fp", s.false_positives},
          {"fn", s.false_negatives}};
}

json ToJson(const F1Report &r) {
  json per = json::object();
  for (const auto &[lang, s] : r.per_language) per[std::string(LanguageCode(lang))] = ToJson(s);
  return {{"per_language", per}, {"micro", ToJson(r.micro)}, {"macro", ToJson(r.macro)}};
}

json ToJson(const AgreementReport &r) {
  json pairs = json::array();
  for (const auto &[pair, k] : r.pairwise_kappa) {
    pairs.push_back({{"a", pair.first}, {"b", pair.second}, {"kappa", k}});
  }
  return {{"pairwise_kappa", pairs},
          {"average_kappa", r.average_kappa},
          {"item_count", r.item_count}};
}

json ToJson(const BleuResult &r) {
  return {{"bleu", r.bleu},
          {"bleu_x100", 100 * r.bleu},
          {"brevity_penalty", r.brevity_penalty},
          {"precisions", r.precisions},
          {"matches", r.matches},
          {"totals", r.totals},
          {"hypothesis_length", r.hypothesis_length},
          {"reference_length", r.reference_length},
          {"tokenizer", r.tokenizer}};
}

json ToJson(const StatsReport &r) {
  json histogram = json::object();
  for (const auto &[n, frac] : r.fact_count_histogram) histogram[std::to_string(n)] = frac;
  json top = json::array();
  for (const auto &[label, count] : r.top_predicates) {
    top.push_back({{"predicate_label", label}, {"count", count}});
  }
  return {{"language", LanguageCode(r.language)},
          {"instance_count", r.instance_count},
          {"word_count", {{"avg", r.word_avg}, {"min", r.word_min}, {"max", r.word_max}}},
          {"fact_count", {{"avg", r.fact_avg}, {"min", r.fact_min}, {"max", r.fact_max}}},
          {"vocabulary_size", r.vocabulary_size},
          {"fact_count_histogram", histogram},
          {"top_predicates", top}};
}

}  // namespace factalign
