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

#include "factalign/facts.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>

#include "factalign/errors.h"
#include "factalign/text.h"

namespace factalign {

using json = nlohmann::json;

const std::string *Entity::Label(Language language) const {
  auto it = labels.find(language);
  return it == labels.end() || it->second.empty() ? nullptr : &it->second;
}

namespace {

struct DatatypeSpelling {
  Datatype type;
  std::string_view dump;
  std::string_view name;
};

constexpr std::array<DatatypeSpelling, 11> kDatatypes = {{
    {Datatype::kWikibaseItem, "wikibase-item", "WikibaseItem"},
    {Datatype::kTime, "time", "Time"},
    {Datatype::kQuantity, "quantity", "Quantity"},
    {Datatype::kMonolingualText, "monolingualtext", "Monolingualtext"},
    {Datatype::kExternalId, "external-id", "ExternalId"},
    {Datatype::kString, "string", "String"},
    {Datatype::kUrl, "url", "Url"},
    {Datatype::kCommonsMedia, "commonsMedia", "CommonsMedia"},
    {Datatype::kGlobeCoordinate, "globe-coordinate", "GlobeCoordinate"},
    {Datatype::kMath, "math", "Math"},
    {Datatype::kWikibaseProperty, "wikibase-property", "WikibaseProperty"},
}};

// Other datatypes Wikibase defines; recognized but not modelled.
constexpr std::array<std::string_view, 10> kOtherDatatypes = {
    "wikibase-lexeme", "wikibase-form", "wikibase-sense", "musical-notation",
    "tabular-data", "geo-shape", "entity-schema", "wikibase-entityid",
    "MusicalNotation", "TabularData",
};

bool Representable(Datatype type) {
  return type == Datatype::kWikibaseItem || type == Datatype::kTime ||
         type == Datatype::kQuantity || type == Datatype::kMonolingualText;
}

constexpr std::array<std::string_view, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December",
};

std::string Ordinal(long n) {
  std::string suffix = "th";
  if (n % 100 < 11 || n % 100 > 13) {
    if (n % 10 == 1) suffix = "st";
    if (n % 10 == 2) suffix = "nd";
    if (n % 10 == 3) suffix = "rd";
  }
  return std::to_string(n) + suffix;
}

// "http://www.wikidata.org/entity/Q11573" -> "Q11573".
std::string EntityIdFromUri(std::string_view uri) {
  size_t slash = uri.rfind('/');
  return std::string(slash == std::string_view::npos ? uri : uri.substr(slash + 1));
}

}  // namespace

std::optional<Datatype> ParseDatatype(std::string_view name) {
  for (const auto &d : kDatatypes) {
    if (name == d.dump || name == d.name) return d.type;
  }
  for (std::string_view other : kOtherDatatypes) {
    if (name == other) return Datatype::kOther;
  }
  return std::nullopt;
}

std::string_view DatatypeName(Datatype type) {
  for (const auto &d : kDatatypes) {
    if (d.type == type) return d.name;
  }
  return "Other";
}

std::set<Datatype> DefaultAllowlist() {
  return {Datatype::kWikibaseItem, Datatype::kTime, Datatype::kQuantity,
          Datatype::kMonolingualText};
}

std::string CanonicalValue(const Value &value) {
  struct Visitor {
    std::string operator()(const ItemValue &v) const { return v.entity.qid; }
    std::string operator()(const TimeValue &v) const {
      return v.time + "/" + std::to_string(v.precision);
    }
    std::string operator()(const QuantityValue &v) const {
      return v.amount + (v.unit ? " " + v.unit->qid : "");
    }
    std::string operator()(const MonoTextValue &v) const {
      return v.language + ":" + v.text;
    }
  };
  return std::visit(Visitor{}, value);
}

bool EntityIdLess(std::string_view a, std::string_view b) {
  if (!a.empty() && !b.empty() && a[0] == b[0]) {
    return PageIdLess(a.substr(1), b.substr(1));
  }
  return a < b;
}

std::string FactId(const Fact &fact) {
  return fact.subject.qid + "|" + fact.predicate.pid + "|" + CanonicalValue(fact.object);
}

std::string FormatTime(std::string_view time, int precision) {
  // [+-]Y+-MM-DDThh:mm:ssZ
  bool negative = !time.empty() && time[0] == '-';
  if (!time.empty() && (time[0] == '+' || time[0] == '-')) time.remove_prefix(1);
  size_t dash = time.find('-');
  if (dash == std::string_view::npos || dash == 0) {
    throw ParseError("malformed time value '" + std::string(time) + "'");
  }
  long year = 0;
  for (char c : time.substr(0, dash)) {
    if (c < '0' || c > '9') throw ParseError("malformed year in '" + std::string(time) + "'");
    year = year * 10 + (c - '0');
  }
  auto two_digits = [&](size_t pos) -> int {
    if (pos + 2 > time.size()) return 0;
    char a = time[pos], b = time[pos + 1];
    if (a < '0' || a > '9' || b < '0' || b > '9') return 0;
    return (a - '0') * 10 + (b - '0');
  };
  int month = two_digits(dash + 1);
  int day = two_digits(dash + 4);

  std::string era = negative ? " BCE" : "";
  if (precision >= 11 && month >= 1 && month <= 12 && day >= 1) {
    return std::to_string(day) + " " + std::string(kMonths[month - 1]) + " " +
           std::to_string(year) + era;
  }
  if (precision >= 10 && month >= 1 && month <= 12) {
    return std::string(kMonths[month - 1]) + " " + std::to_string(year) + era;
  }
  if (precision == 8) return std::to_string(year / 10 * 10) + "s" + era;
  if (precision == 7) return Ordinal((year - 1) / 100 + 1) + " century" + era;
  if (precision == 6) return Ordinal((year - 1) / 1000 + 1) + " millennium" + era;
  return std::to_string(year) + era;
}

void LabelCatalog::AddDocument(const json &doc) {
  if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_string()) return;
  std::string id = doc["id"].get<std::string>();
  auto labels = doc.find("labels");
  if (labels == doc.end() || !labels->is_object()) return;
  for (const auto &[code, entry] : labels->items()) {
    auto language = TryParseLanguage(code);
    if (!language) continue;
    if (entry.is_object() && entry.contains("value") && entry["value"].is_string()) {
      Add(id, *language, entry["value"].get<std::string>());
    } else if (entry.is_string()) {
      Add(id, *language, entry.get<std::string>());
    }
  }
}

void LabelCatalog::Add(std::string id, Language language, std::string label) {
  labels_[std::move(id)][language] = std::move(label);
}

Entity LabelCatalog::Resolve(const std::string &id) const {
  Entity entity;
  entity.qid = id;
  auto it = labels_.find(id);
  if (it != labels_.end()) entity.labels = it->second;
  return entity;
}

std::string LabelCatalog::PropertyLabel(const std::string &pid) const {
  auto it = labels_.find(pid);
  if (it == labels_.end()) return "";
  auto en = it->second.find(Language::kEn);
  return en == it->second.end() ? "" : en->second;
}

FactParseStats &FactParseStats::operator+=(const FactParseStats &o) {
  claims += o.claims;
  facts += o.facts;
  skipped_datatype += o.skipped_datatype;
  unknown_datatype += o.unknown_datatype;
  skipped_no_value += o.skipped_no_value;
  skipped_deprecated += o.skipped_deprecated;
  dropped_qualifiers += o.dropped_qualifiers;
  return *this;
}

namespace {

[[noreturn]] void SchemaError(const std::string &pid, const std::string &what) {
  throw ParseError("claim " + pid + ": " + what);
}

const json &Member(const json &object, const char *key, const std::string &pid) {
  if (!object.is_object()) SchemaError(pid, std::string("expected object holding '") + key + "'");
  auto it = object.find(key);
  if (it == object.end()) SchemaError(pid, std::string("missing '") + key + "'");
  return *it;
}

std::string StringMember(const json &object, const char *key, const std::string &pid) {
  const json &v = Member(object, key, pid);
  if (!v.is_string()) SchemaError(pid, std::string("'") + key + "' is not a string");
  return v.get<std::string>();
}

// Datatype of a value snak: the explicit field, else inferred from the value.
std::optional<Datatype> SnakDatatype(const json &snak, const std::string &pid) {
  auto it = snak.find("datatype");
  if (it != snak.end()) {
    if (!it->is_string()) SchemaError(pid, "'datatype' is not a string");
    return ParseDatatype(it->get<std::string>());
  }
  const json &datavalue = Member(snak, "datavalue", pid);
  std::string type = StringMember(datavalue, "type", pid);
  if (type == "wikibase-entityid") {
    const json &value = Member(datavalue, "value", pid);
    auto et = value.find("entity-type");
    if (et != value.end() && *et == "property") return Datatype::kWikibaseProperty;
    return Datatype::kWikibaseItem;
  }
  if (type == "time") return Datatype::kTime;
  if (type == "quantity") return Datatype::kQuantity;
  if (type == "monolingualtext") return Datatype::kMonolingualText;
  if (type == "string") return Datatype::kString;
  if (type == "globecoordinate") return Datatype::kGlobeCoordinate;
  return std::nullopt;
}

// Decodes the datavalue of a value snak whose datatype is representable.
Value DecodeValue(const json &snak, Datatype type, const LabelCatalog &catalog,
                  const std::string &pid) {
  const json &value = Member(Member(snak, "datavalue", pid), "value", pid);
  switch (type) {
    case Datatype::kWikibaseItem: {
      std::string id;
      auto it = value.is_object() ? value.find("id") : value.end();
      if (it != value.end() && it->is_string()) {
        id = it->get<std::string>();
      } else {
        const json &numeric = Member(value, "numeric-id", pid);
        if (!numeric.is_number_integer()) SchemaError(pid, "'numeric-id' is not an integer");
        id = "Q" + std::to_string(numeric.get<int64_t>());
      }
      return ItemValue{catalog.Resolve(id)};
    }
    case Datatype::kTime: {
      TimeValue t;
      t.time = StringMember(value, "time", pid);
      const json &precision = Member(value, "precision", pid);
      if (!precision.is_number_integer()) SchemaError(pid, "'precision' is not an integer");
      t.precision = precision.get<int>();
      auto cal = value.find("calendarmodel");
      if (cal != value.end() && cal->is_string()) t.calendar = EntityIdFromUri(cal->get<std::string>());
      FormatTime(t.time, t.precision);  // validates the time string
      return t;
    }
    case Datatype::kQuantity: {
      QuantityValue q;
      q.amount = StringMember(value, "amount", pid);
      auto unit = value.find("unit");
      if (unit != value.end() && unit->is_string() && *unit != "1") {
        q.unit = catalog.Resolve(EntityIdFromUri(unit->get<std::string>()));
      }
      return q;
    }
    case Datatype::kMonolingualText:
      return MonoTextValue{StringMember(value, "text", pid),
                           StringMember(value, "language", pid)};
    default:
      SchemaError(pid, "datatype cannot be represented");
  }
}

}  // namespace

std::vector<Fact> ParseEntityFacts(const json &entity_doc, const LabelCatalog &catalog,
                                   const std::set<Datatype> &allowlist,
                                   FactParseStats *stats) {
  for (Datatype type : allowlist) {
    if (!Representable(type)) {
      throw ConfigError("datatype " + std::string(DatatypeName(type)) +
                        " cannot be used as a fact object");
    }
  }
  FactParseStats local;
  if (!entity_doc.is_object() || !entity_doc.contains("id") ||
      !entity_doc["id"].is_string()) {
    throw ParseError("entity document without an 'id'");
  }
  Entity subject = catalog.Resolve(entity_doc["id"].get<std::string>());
  // Labels on the document itself take precedence over the catalog.
  LabelCatalog own;
  own.AddDocument(entity_doc);
  for (const auto &[language, label] : own.Resolve(subject.qid).labels) {
    subject.labels[language] = label;
  }

  std::vector<Fact> facts;
  auto claims = entity_doc.find("claims");
  if (claims == entity_doc.end()) {
    if (stats) *stats += local;
    return facts;
  }
  if (!claims->is_object()) throw ParseError("entity " + subject.qid + ": 'claims' is not an object");

  for (const auto &[pid, statements] : claims->items()) {
    if (!statements.is_array()) SchemaError(pid, "statements are not an array");
    for (const json &claim : statements) {
      ++local.claims;
      const json &mainsnak = Member(claim, "mainsnak", pid);
      if (claim.contains("rank") && claim["rank"] == "deprecated") {
        ++local.skipped_deprecated;
        continue;
      }
      if (StringMember(mainsnak, "snaktype", pid) != "value") {
        ++local.skipped_no_value;
        continue;
      }
      std::optional<Datatype> type = SnakDatatype(mainsnak, pid);
      if (!type) {
        ++local.unknown_datatype;
        continue;
      }
      if (!allowlist.count(*type)) {
        ++local.skipped_datatype;
        continue;
      }
      Fact fact;
      fact.subject = subject;
      fact.predicate = {pid, catalog.PropertyLabel(pid)};
      fact.object = DecodeValue(mainsnak, *type, catalog, pid);

      auto qualifiers = claim.find("qualifiers");
      if (qualifiers != claim.end()) {
        if (!qualifiers->is_object()) SchemaError(pid, "'qualifiers' is not an object");
        std::vector<std::string> order;
        auto listed = claim.find("qualifiers-order");
        if (listed != claim.end() && listed->is_array()) {
          for (const json &q : *listed) {
            if (q.is_string() && qualifiers->contains(q.get<std::string>())) {
              order.push_back(q.get<std::string>());
            }
          }
        }
        for (const auto &[qpid, unused] : qualifiers->items()) {
          if (std::find(order.begin(), order.end(), qpid) == order.end()) order.push_back(qpid);
        }
        for (const std::string &qpid : order) {
          const json &snaks = (*qualifiers)[qpid];
          if (!snaks.is_array()) SchemaError(pid, "qualifier " + qpid + " is not an array");
          for (const json &snak : snaks) {
            std::optional<Datatype> qtype;
            if (StringMember(snak, "snaktype", pid) == "value") qtype = SnakDatatype(snak, pid);
            if (!qtype || !Representable(*qtype)) {
              spdlog::debug("claim {} of {}: dropping qualifier {}", pid, subject.qid, qpid);
              ++local.dropped_qualifiers;
              continue;
            }
            fact.qualifiers.push_back(
                {{qpid, catalog.PropertyLabel(qpid)}, DecodeValue(snak, *qtype, catalog, pid)});
          }
        }
      }
      facts.push_back(std::move(fact));
      ++local.facts;
    }
  }
  if (stats) *stats += local;
  return facts;
}

namespace {

const std::string &EntityLabel(const Entity &entity, Language language,
                               const VerbalizeOptions &options) {
  if (const std::string *label = entity.Label(language)) return *label;
  if (options.english_fallback) {
    if (const std::string *label = entity.Label(Language::kEn)) return *label;
  }
  throw MissingLabel(entity.qid);
}

std::string StripPlus(std::string_view amount) {
  if (!amount.empty() && amount[0] == '+') amount.remove_prefix(1);
  return std::string(amount);
}

const std::string &PredicateLabel(const Predicate &predicate) {
  if (predicate.label.empty()) throw MissingLabel(predicate.pid);
  return predicate.label;
}

}  // namespace

std::string RenderValue(const Value &value, Language language,
                        const VerbalizeOptions &options) {
  struct Visitor {
    Language language;
    const VerbalizeOptions &options;
    std::string operator()(const ItemValue &v) const {
      return EntityLabel(v.entity, language, options);
    }
    std::string operator()(const TimeValue &v) const {
      return FormatTime(v.time, v.precision);
    }
    std::string operator()(const QuantityValue &v) const {
      std::string out = StripPlus(v.amount);
      if (v.unit) out += " " + EntityLabel(*v.unit, language, options);
      return out;
    }
    std::string operator()(const MonoTextValue &v) const { return v.text; }
  };
  return std::visit(Visitor{language, options}, value);
}

std::string VerbalizeFact(const Fact &fact, bool include_qualifiers, Language language,
                          const VerbalizeOptions &options) {
  std::string out = EntityLabel(fact.subject, language, options);
  out += " | ";
  out += PredicateLabel(fact.predicate);
  out += " | ";
  out += RenderValue(fact.object, language, options);
  if (include_qualifiers) {
    for (const Qualifier &q : fact.qualifiers) {
      out += " | ";
      out += PredicateLabel(q.predicate);
      out += ": ";
      out += RenderValue(q.value, language, options);
    }
  }
  return out;
}

std::string LocalizeFactText(const Fact &fact, Language target,
                             const TranslationProvider &translator,
                             bool include_qualifiers) {
  const VerbalizeOptions english{false};
  auto translate = [&](const std::string &text, const char *slot) -> std::string {
    if (target == Language::kEn) return text;
    try {
      return translator.Translate(text, Language::kEn, target);
    } catch (const std::exception &e) {
      throw ProviderError(std::string("translating ") + slot + " of " + FactId(fact) +
                          ": " + e.what());
    }
  };
  auto entity_slot = [&](const Entity &entity, const char *slot) -> std::string {
    if (const std::string *label = entity.Label(target)) return *label;
    return translate(EntityLabel(entity, Language::kEn, english), slot);
  };
  auto value_slot = [&](const Value &value, const char *slot) -> std::string {
    if (const auto *item = std::get_if<ItemValue>(&value)) {
      return entity_slot(item->entity, slot);
    }
    return translate(RenderValue(value, Language::kEn, english), slot);
  };

  std::string out = entity_slot(fact.subject, "subject");
  out += " | ";
  out += translate(PredicateLabel(fact.predicate), "predicate");
  out += " | ";
  out += value_slot(fact.object, "object");
  if (include_qualifiers) {
    for (const Qualifier &q : fact.qualifiers) {
      out += " | ";
      out += translate(PredicateLabel(q.predicate), "qualifier predicate");
      out += ": ";
      out += value_slot(q.value, "qualifier value");
    }
  }
  return out;
}

std::vector<Fact> DeduplicateFacts(const std::vector<Fact> &facts) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<Fact> unique;
  for (const Fact &fact : facts) {
    if (seen.emplace(fact.predicate.pid, CanonicalValue(fact.object)).second) {
      unique.push_back(fact);
    }
  }
  return unique;
}

void FactStore::Add(Fact fact) {
  std::string id = FactId(fact);
  if (by_id_.count(id)) return;
  auto &list = by_subject_[fact.subject.qid];
  by_id_.emplace(id, std::make_pair(fact.subject.qid, list.size()));
  list.push_back(std::move(fact));
}

const std::vector<Fact> &FactStore::FactsFor(const std::string &qid) const {
  static const std::vector<Fact> kNone;
  auto it = by_subject_.find(qid);
  return it == by_subject_.end() ? kNone : it->second;
}

const Fact *FactStore::Find(const std::string &fact_id) const {
  auto it = by_id_.find(fact_id);
  if (it == by_id_.end()) return nullptr;
  return &by_subject_.at(it->second.first)[it->second.second];
}

std::vector<std::string> FactStore::Subjects() const {
  std::vector<std::string> subjects;
  for (const auto &[qid, facts] : by_subject_) subjects.push_back(qid);
  std::sort(subjects.begin(), subjects.end(), EntityIdLess);
  return subjects;
}

std::vector<EntityBundle> BuildBundles(const FactStore &store,
                                       const std::vector<Sentence> &sentences) {
  std::map<std::pair<Language, std::string>, std::vector<Sentence>> groups;
  for (const Sentence &s : sentences) {
    if (s.entity_id.empty() || store.FactsFor(s.entity_id).empty()) continue;
    groups[{s.language, s.entity_id}].push_back(s);
  }
  std::vector<EntityBundle> bundles;
  for (auto &[key, members] : groups) {
    EntityBundle bundle;
    const std::vector<Fact> &facts = store.FactsFor(key.second);
    bundle.entity = facts.front().subject;
    bundle.language = key.first;
    bundle.facts = DeduplicateFacts(facts);
    std::stable_sort(members.begin(), members.end(), CanonicalSentenceLess);
    bundle.sentences = std::move(members);
    bundles.push_back(std::move(bundle));
  }
  std::stable_sort(bundles.begin(), bundles.end(), [](const auto &a, const auto &b) {
    if (a.language != b.language) return a.language < b.language;
    return EntityIdLess(a.entity.qid, b.entity.qid);
  });
  return bundles;
}

}  // namespace factalign
