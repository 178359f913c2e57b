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

#include "factalign/providers.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "factalign/errors.h"
#include "factalign/random.h"
#include "factalign/text.h"

namespace factalign {

std::string_view NliLabelName(NliLabel label) {
  switch (label) {
    case NliLabel::kEntailment: return "entailment";
    case NliLabel::kContradiction: return "contradiction";
    case NliLabel::kNeutral: return "neutral";
  }
  return "neutral";
}

NliLabel ParseNliLabel(std::string_view name) {
  if (name == "entailment") return NliLabel::kEntailment;
  if (name == "contradiction") return NliLabel::kContradiction;
  if (name == "neutral") return NliLabel::kNeutral;
  throw ProviderError("unknown NLI label '" + std::string(name) + "'");
}

double Cosine(const Embedding &a, const Embedding &b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("embedding dimension mismatch: " +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

Embedding CachingEmbedder::Embed(std::string_view text, Language language) const {
  auto key = std::make_pair(std::string(text), language);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Embedding v = base_.Embed(text, language);
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(std::move(key), v);
  return v;
}

std::string CachingTranslator::Translate(std::string_view text, Language source,
                                         Language target) const {
  if (source == target) return std::string(text);
  auto key = std::make_tuple(std::string(text), source, target);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  std::string out = base_.Translate(text, source, target);
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(std::move(key), out);
  return out;
}

Embedding MockEmbed(std::string_view text, int dim) {
  if (dim < 8) {
    throw ConfigError("embedding dimension must be at least 8, got " +
                      std::to_string(dim));
  }
  Embedding v(dim, 0.0);
  std::vector<std::string> terms = AnalyzeTerms(text);
  for (const std::string &term : terms) {
    Rng rng(MixSeed(Fingerprint(term)));
    for (int i = 0; i < dim; ++i) {
      // 53 random bits mapped onto [-1, 1).
      double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      v[i] += 2.0 * unit - 1.0;
    }
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  if (terms.empty() || norm == 0) {
    std::fill(v.begin(), v.end(), 1.0 / std::sqrt(static_cast<double>(dim)));
    return v;
  }
  norm = std::sqrt(norm);
  for (double &x : v) x /= norm;
  return v;
}

HashEmbedder::HashEmbedder(int dim) : dim_(dim) {
  if (dim < 8) {
    throw ConfigError("embedding dimension must be at least 8, got " +
                      std::to_string(dim));
  }
}

Embedding HashEmbedder::Embed(std::string_view text, Language) const {
  return MockEmbed(text, dim_);
}

std::string IdentityTranslator::Translate(std::string_view text, Language source,
                                          Language target) const {
  std::lock_guard<std::mutex> lock(mu_);
  calls_.push_back({std::string(text), source, target});
  return std::string(text);
}

std::vector<TranslationRequest> IdentityTranslator::calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_;
}

size_t IdentityTranslator::call_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_.size();
}

namespace {

std::string LowerAscii(std::string_view s) {
  std::string out(s);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Splits a whitespace token into leading punctuation, core and trailing
// punctuation.
struct TokenParts {
  std::string lead, core, trail;
};

TokenParts SplitPunctuation(const std::string &token) {
  std::vector<std::pair<size_t, char32_t>> cps;
  size_t pos = 0;
  while (pos < token.size()) {
    size_t start = pos;
    cps.emplace_back(start, DecodeUtf8(token, &pos));
  }
  size_t first = 0;
  while (first < cps.size() && IsPunctuationCodePoint(cps[first].second)) ++first;
  size_t last = cps.size();
  while (last > first && IsPunctuationCodePoint(cps[last - 1].second)) --last;
  auto offset = [&](size_t i) { return i < cps.size() ? cps[i].first : token.size(); };
  TokenParts parts;
  parts.lead = token.substr(0, offset(first));
  parts.core = token.substr(offset(first), offset(last) - offset(first));
  parts.trail = token.substr(offset(last));
  return parts;
}

}  // namespace

void GlossaryTranslator::Add(Language language, std::string_view native,
                             std::string_view english) {
  std::string native_key = LowerAscii(Join(WhitespaceTokens(native), " "));
  std::string english_key = LowerAscii(Join(WhitespaceTokens(english), " "));
  if (native_key.empty() || english_key.empty()) {
    throw ConfigError("glossary entries must be non-empty");
  }
  std::string english_text = Join(WhitespaceTokens(english), " ");
  std::string native_text = Join(WhitespaceTokens(native), " ");
  to_english_[language].emplace(native_key, english_text);
  from_english_[language].emplace(english_key, native_text);
  max_phrase_ = std::max({max_phrase_, WhitespaceTokens(native).size(),
                          WhitespaceTokens(english).size()});
}

GlossaryTranslator GlossaryTranslator::FromFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open glossary " + path);
  GlossaryTranslator glossary;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 3) {
      throw ParseError(path + ":" + std::to_string(line_number) +
                       ": expected 3 tab-separated fields");
    }
    glossary.Add(ParseLanguage(fields[0]), fields[1], fields[2]);
  }
  return glossary;
}

std::string GlossaryTranslator::Apply(std::string_view text,
                                      const Table &table) const {
  std::vector<std::string> tokens = WhitespaceTokens(text);
  std::vector<TokenParts> parts;
  parts.reserve(tokens.size());
  for (const auto &t : tokens) parts.push_back(SplitPunctuation(t));

  std::vector<std::string> out;
  size_t i = 0;
  while (i < parts.size()) {
    bool matched = false;
    size_t longest = std::min(max_phrase_, parts.size() - i);
    for (size_t len = longest; len >= 1 && !matched; --len) {
      // Inner tokens of a phrase must not carry punctuation.
      bool clean = true;
      std::string key;
      for (size_t k = 0; k < len; ++k) {
        const TokenParts &p = parts[i + k];
        if (p.core.empty() || (k > 0 && !p.lead.empty()) ||
            (k + 1 < len && !p.trail.empty())) {
          clean = false;
          break;
        }
        if (k > 0) key.push_back(' ');
        key += LowerAscii(p.core);
      }
      if (!clean) continue;
      auto it = table.find(key);
      if (it == table.end()) continue;
      out.push_back(parts[i].lead + it->second + parts[i + len - 1].trail);
      i += len;
      matched = true;
    }
    if (!matched) {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return Join(out, " ");
}

std::string GlossaryTranslator::Translate(std::string_view text, Language source,
                                          Language target) const {
  if (source == target) return std::string(text);
  static const Table kEmpty;
  auto table_for = [](const std::map<Language, Table> &tables, Language l) -> const Table & {
    auto it = tables.find(l);
    return it == tables.end() ? kEmpty : it->second;
  };
  std::string english = source == Language::kEn
                            ? std::string(text)
                            : Apply(text, table_for(to_english_, source));
  if (target == Language::kEn) return english;
  return Apply(english, table_for(from_english_, target));
}

bool LexiconContentCheck(std::string_view text, Language,
                         const Lexicon &lexicon) {
  for (const std::string &token : WhitespaceTokens(text)) {
    auto it = lexicon.find(token);
    if (it == lexicon.end()) it = lexicon.find(SplitPunctuation(token).core);
    if (it == lexicon.end()) continue;
    if (it->second == PosTag::kNoun || it->second == PosTag::kVerb) return true;
  }
  return false;
}

Lexicon LoadLexicon(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon " + path);
  Lexicon lexicon;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(line_number) +
                       ": expected token<TAB>tag");
    }
    std::string tag = line.substr(tab + 1);
    PosTag pos = PosTag::kOther;
    if (tag == "NOUN" || tag == "PROPN") pos = PosTag::kNoun;
    if (tag == "VERB") pos = PosTag::kVerb;
    lexicon[line.substr(0, tab)] = pos;
  }
  return lexicon;
}

bool LexiconContentTagger::HasContentWord(std::string_view text,
                                          Language language) const {
  return LexiconContentCheck(text, language, lexicon_);
}

bool PermissiveContentTagger::HasContentWord(std::string_view text,
                                             Language) const {
  return !Trim(text).empty();
}

namespace {

// Script block of a code point, or nullopt for non-letters.
enum class Script { kLatin, kDevanagari, kBengali, kGujarati, kTamil, kTelugu,
                    kKannada, kOther };

std::optional<Script> LetterScript(char32_t cp) {
  if ((cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z') ||
      (cp >= 0x00C0 && cp <= 0x024F && cp != 0x00D7 && cp != 0x00F7)) {
    return Script::kLatin;
  }
  if (cp < 0x0370 || IsSpaceCodePoint(cp) || IsPunctuationCodePoint(cp)) {
    return std::nullopt;
  }
  struct Block {
    char32_t begin;
    Script script;
  };
  static constexpr Block kBlocks[] = {
      {0x0900, Script::kDevanagari}, {0x0980, Script::kBengali},
      {0x0A80, Script::kGujarati},   {0x0B80, Script::kTamil},
      {0x0C00, Script::kTelugu},     {0x0C80, Script::kKannada},
  };
  for (const Block &b : kBlocks) {
    if (cp >= b.begin && cp < b.begin + 0x80) {
      // Native digits are not letters.
      char32_t offset = cp - b.begin;
      if (offset >= 0x66 && offset <= 0x6F) return std::nullopt;
      return b.script;
    }
  }
  if (cp >= 0x2000 && cp <= 0x2BFF) return std::nullopt;  // symbols
  return Script::kOther;
}

}  // namespace

Detection ScriptLanguageDetector::Detect(std::string_view text) const {
  std::map<Script, int> votes;
  int letters = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    auto script = LetterScript(DecodeUtf8(text, &pos));
    if (!script) continue;
    ++letters;
    ++votes[*script];
  }
  Detection detection;
  if (letters == 0) return detection;
  Script best = Script::kOther;
  int best_votes = -1;
  for (const auto &[script, count] : votes) {
    if (count > best_votes) {
      best = script;
      best_votes = count;
    }
  }
  detection.confidence = static_cast<double>(best_votes) / letters;
  switch (best) {
    case Script::kLatin: detection.language = Language::kEn; break;
    case Script::kDevanagari: detection.language = Language::kHi; break;
    case Script::kBengali: detection.language = Language::kBn; break;
    case Script::kGujarati: detection.language = Language::kGu; break;
    case Script::kTamil: detection.language = Language::kTa; break;
    case Script::kTelugu: detection.language = Language::kTe; break;
    case Script::kKannada: detection.language = Language::kKn; break;
    case Script::kOther: break;
  }
  return detection;
}

bool DetectionMatches(const Detection &detection, Language expected) {
  if (!detection.language) return false;
  Language got = *detection.language;
  if (got == expected) return true;
  auto devanagari = [](Language l) { return l == Language::kHi || l == Language::kMr; };
  return devanagari(got) && devanagari(expected);
}

namespace {

// Returns (sentence side, fact side) for a possibly pair-formatted input.
std::pair<std::string_view, std::string_view> SplitPair(std::string_view text) {
  size_t sep = text.find(kPairSeparator);
  if (sep == std::string_view::npos) return {text, {}};
  return {text.substr(0, sep), text.substr(sep + kPairSeparator.size())};
}

// Translates a non-English premise to English when a translator is given.
std::string EnglishPremise(std::string_view text, const TranslationProvider *translator) {
  if (translator == nullptr) return std::string(text);
  Detection d = ScriptLanguageDetector().Detect(text);
  if (!d.language || *d.language == Language::kEn) return std::string(text);
  return translator->Translate(text, *d.language, Language::kEn);
}

}  // namespace

double TermCoverage(std::string_view premise, std::string_view hypothesis) {
  if (hypothesis.empty()) std::tie(premise, hypothesis) = SplitPair(premise);
  std::vector<std::string> hyp = AnalyzeTerms(hypothesis);
  if (hyp.empty()) return 0.0;
  std::vector<std::string> prem_terms = AnalyzeTerms(premise);
  std::set<std::string> prem(prem_terms.begin(), prem_terms.end());
  size_t covered = 0;
  for (const auto &t : hyp) covered += prem.count(t);
  return static_cast<double>(covered) / hyp.size();
}

NliResult OverlapEntailment::Classify(std::string_view premise,
                                      std::string_view hypothesis) const {
  double coverage;
  if (hypothesis.empty()) {
    auto [sentence, fact] = SplitPair(premise);
    coverage = TermCoverage(EnglishPremise(sentence, translator_), fact);
  } else {
    coverage = TermCoverage(EnglishPremise(premise, translator_), hypothesis);
  }
  if (coverage >= threshold_) return {NliLabel::kEntailment, coverage};
  return {NliLabel::kNeutral, 1.0 - coverage};
}

double OverlapClassifier::Score(std::string_view pair_text) const {
  auto [sentence, fact] = SplitPair(pair_text);
  return TermCoverage(EnglishPremise(sentence, translator_), fact);
}

}  // namespace factalign
