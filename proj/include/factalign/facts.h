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

#ifndef FACTALIGN_FACTS_H_
#define FACTALIGN_FACTS_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "factalign/language.h"
#include "factalign/providers.h"
#include "factalign/sentences.h"
#include "json.hpp"

namespace factalign {

struct Entity {
  std::string qid;
  std::map<Language, std::string> labels;  // may be partial

  // Label in `language`, or nullptr.
  const std::string *Label(Language language) const;

  bool operator==(const Entity &) const = default;
};

struct Predicate {
  std::string pid;
  std::string label;  // English

  bool operator==(const Predicate &) const = default;
};

struct ItemValue {
  Entity entity;
  bool operator==(const ItemValue &) const = default;
};

struct TimeValue {
  std::string time;  // "+1955-02-11T00:00:00Z"
  int precision = 11;
  std::string calendar;
  bool operator==(const TimeValue &) const = default;
};

struct QuantityValue {
  std::string amount;          // decimal string, e.g. "+2.02"
  std::optional<Entity> unit;  // unset for dimensionless quantities
  bool operator==(const QuantityValue &) const = default;
};

struct MonoTextValue {
  std::string text;
  std::string language;  // raw code, may be outside the supported set
  bool operator==(const MonoTextValue &) const = default;
};

// The four property datatypes a fact object may carry.
using Value = std::variant<ItemValue, TimeValue, QuantityValue, MonoTextValue>;

struct Qualifier {
  Predicate predicate;
  Value value;
  bool operator==(const Qualifier &) const = default;
};

struct Fact {
  Entity subject;
  Predicate predicate;
  Value object;
  std::vector<Qualifier> qualifiers;
  bool operator==(const Fact &) const = default;
};

enum class Datatype {
  kWikibaseItem,
  kTime,
  kQuantity,
  kMonolingualText,
  kExternalId,
  kString,
  kUrl,
  kCommonsMedia,
  kGlobeCoordinate,
  kMath,
  kWikibaseProperty,
  kOther,  // recognized as a Wikibase datatype we do not model individually
};

// Accepts dump spellings ("wikibase-item", "monolingualtext") and CamelCase
// names ("WikibaseItem", "Monolingualtext"). nullopt for unknown strings.
std::optional<Datatype> ParseDatatype(std::string_view name);
std::string_view DatatypeName(Datatype type);

// WikibaseItem, Time, Quantity and Monolingualtext.
std::set<Datatype> DefaultAllowlist();

// Canonical string of a value: item qid, time without calendar, amount with
// unit qid, or language-tagged text.
std::string CanonicalValue(const Value &value);

// Orders ids like "Q2" < "Q10" numerically within the same prefix letter.
bool EntityIdLess(std::string_view a, std::string_view b);

// "subject-qid|pid|canonical object". Stable identifier of a fact.
std::string FactId(const Fact &fact);

// Renders an ISO-8601 Wikibase time honoring its precision:
// 11 -> "11 February 1955", 10 -> "February 1955", 9 -> "1955",
// 8 -> "1950s", 7 -> "20th century", 6 -> "2nd millennium".
std::string FormatTime(std::string_view time, int precision);

// Labels of items and properties referenced by claims.
class LabelCatalog {
 public:
  // Records the labels of an entity or property document.
  void AddDocument(const nlohmann::json &doc);
  void Add(std::string id, Language language, std::string label);

  // Entity with whatever labels are known (possibly none).
  Entity Resolve(const std::string &id) const;
  // English label of a property, or empty.
  std::string PropertyLabel(const std::string &pid) const;

  size_t size() const { return labels_.size(); }

 private:
  std::unordered_map<std::string, std::map<Language, std::string>> labels_;
};

struct FactParseStats {
  int64_t claims = 0;
  int64_t facts = 0;
  int64_t skipped_datatype = 0;   // datatype outside the allowlist
  int64_t unknown_datatype = 0;   // unrecognized datatype string
  int64_t skipped_no_value = 0;   // somevalue/novalue snaks
  int64_t skipped_deprecated = 0;
  int64_t dropped_qualifiers = 0;

  FactParseStats &operator+=(const FactParseStats &other);
};

// Extracts one Fact per claim whose datatype is in the allowlist. Deprecated
// claims and claims without a concrete value are excluded; qualifiers are kept
// when they are one of the four representable types. Throws ParseError naming
// the property id when a claim does not follow the dump schema, and
// ConfigError when the allowlist holds a type that cannot be represented.
std::vector<Fact> ParseEntityFacts(const nlohmann::json &entity_doc,
                                   const LabelCatalog &catalog,
                                   const std::set<Datatype> &allowlist,
                                   FactParseStats *stats = nullptr);

struct VerbalizeOptions {
  // Use the English label when the requested language has none.
  bool english_fallback = true;
};

// Surface form of a value in `language`.
std::string RenderValue(const Value &value, Language language,
                        const VerbalizeOptions &options = {});

// "subject | predicate | object", followed by " | qualifier: value" for each
// qualifier when include_qualifiers is set. Throws MissingLabel.
std::string VerbalizeFact(const Fact &fact, bool include_qualifiers, Language language,
                          const VerbalizeOptions &options = {});

// Fact text in the target language: entity slots use the target-language
// label when one exists and are translated from English otherwise; the
// predicate and non-item values are always translated. Same shape as
// VerbalizeFact. Provider failures are rethrown naming the slot.
std::string LocalizeFactText(const Fact &fact, Language target,
                             const TranslationProvider &translator,
                             bool include_qualifiers = false);

// Keeps the first fact for each (pid, canonical object). Idempotent.
std::vector<Fact> DeduplicateFacts(const std::vector<Fact> &facts);

struct EntityBundle {
  Entity entity;
  Language language = Language::kEn;
  std::vector<Fact> facts;          // deduplicated
  std::vector<Sentence> sentences;  // all in `language`, canonical order
};

// Read-only collection of facts keyed by subject.
class FactStore {
 public:
  void Add(Fact fact);

  const std::vector<Fact> &FactsFor(const std::string &qid) const;
  const Fact *Find(const std::string &fact_id) const;
  std::vector<std::string> Subjects() const;  // sorted
  size_t size() const { return by_id_.size(); }

 private:
  std::map<std::string, std::vector<Fact>> by_subject_;
  std::unordered_map<std::string, std::pair<std::string, size_t>> by_id_;
};

// Groups sentences by (entity, language) and attaches the entity's facts.
// Sentences without an entity id or without facts are not bundled. Bundles are
// ordered by language then entity id.
std::vector<EntityBundle> BuildBundles(const FactStore &store,
                                       const std::vector<Sentence> &sentences);

}  // namespace factalign

#endif  // FACTALIGN_FACTS_H_
