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

#ifndef FACTALIGN_PROVIDERS_H_
#define FACTALIGN_PROVIDERS_H_

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "factalign/language.h"

namespace factalign {

using Embedding = std::vector<double>;

// Separator between the sentence and the fact in classifier input strings.
inline constexpr std::string_view kPairSeparator = "\u27E8SEP\u27E9";

// Sentence/fact encoder. Vectors have unit L2 norm and a fixed dimension.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Embedding Embed(std::string_view text, Language language) const = 0;
};

class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  // Must return `text` unchanged when source == target.
  virtual std::string Translate(std::string_view text, Language source,
                                Language target) const = 0;
};

enum class NliLabel { kEntailment, kContradiction, kNeutral };

std::string_view NliLabelName(NliLabel label);
NliLabel ParseNliLabel(std::string_view name);

struct NliResult {
  NliLabel label = NliLabel::kNeutral;
  double confidence = 0.0;  // diagnostics only, never used for decisions
};

class EntailmentProvider {
 public:
  virtual ~EntailmentProvider() = default;
  virtual NliResult Classify(std::string_view premise,
                             std::string_view hypothesis) const = 0;
};

// Binary fact/sentence alignment model. Returns P(fact expressed by sentence).
class AlignmentClassifierProvider {
 public:
  virtual ~AlignmentClassifierProvider() = default;
  virtual double Score(std::string_view pair_text) const = 0;
};

// Answers whether a text contains at least one noun, proper noun or verb.
class ContentTagger {
 public:
  virtual ~ContentTagger() = default;
  virtual bool HasContentWord(std::string_view text, Language language) const = 0;
};

struct Detection {
  std::optional<Language> language;  // unset when the text has no letters
  double confidence = 0.0;
};

class LanguageDetector {
 public:
  virtual ~LanguageDetector() = default;
  virtual Detection Detect(std::string_view text) const = 0;
};

// Cosine similarity; 0 when either vector has zero norm.
double Cosine(const Embedding &a, const Embedding &b);

// Memoizing decorators. Provider calls are idempotent, so a cached answer is
// indistinguishable from a fresh one.
class CachingEmbedder : public EmbeddingProvider {
 public:
  explicit CachingEmbedder(const EmbeddingProvider &base) : base_(base) {}
  Embedding Embed(std::string_view text, Language language) const override;

 private:
  const EmbeddingProvider &base_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::string, Language>, Embedding> cache_;
};

class CachingTranslator : public TranslationProvider {
 public:
  explicit CachingTranslator(const TranslationProvider &base) : base_(base) {}
  std::string Translate(std::string_view text, Language source,
                        Language target) const override;

 private:
  const TranslationProvider &base_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<std::string, Language, Language>, std::string> cache_;
};

// ---------------------------------------------------------------------------
// Deterministic mocks.
// ---------------------------------------------------------------------------

// Hash-seeded embedding: every analyzed term gets a pseudo-random vector
// seeded by its fingerprint, the term vectors are mean-pooled and the result
// is L2-normalized. Texts without terms map to the reserved vector with all
// components equal to 1/sqrt(dim). Throws ConfigError when dim < 8.
Embedding MockEmbed(std::string_view text, int dim);

class HashEmbedder : public EmbeddingProvider {
 public:
  explicit HashEmbedder(int dim = 64);

  // The language is ignored so that translations which share surface terms
  // embed close to each other.
  Embedding Embed(std::string_view text, Language language) const override;

  int dim() const { return dim_; }

 private:
  int dim_;
};

struct TranslationRequest {
  std::string text;
  Language source;
  Language target;
};

// Returns the input unchanged and records every request.
class IdentityTranslator : public TranslationProvider {
 public:
  std::string Translate(std::string_view text, Language source,
                        Language target) const override;

  std::vector<TranslationRequest> calls() const;
  size_t call_count() const;

 private:
  mutable std::mutex mu_;
  mutable std::vector<TranslationRequest> calls_;
};

// Word/phrase substitution translator backed by a bilingual glossary of
// (language, native phrase, English phrase) entries. Phrases are matched
// greedily, longest first, on whitespace tokens with surrounding punctuation
// preserved; unmatched tokens pass through unchanged. Translation between two
// non-English languages pivots through English.
class GlossaryTranslator : public TranslationProvider {
 public:
  GlossaryTranslator() = default;

  void Add(Language language, std::string_view native, std::string_view english);

  // Reads "code<TAB>native<TAB>english" lines; '#' starts a comment.
  static GlossaryTranslator FromFile(const std::string &path);

  std::string Translate(std::string_view text, Language source,
                        Language target) const override;

 private:
  using Table = std::map<std::string, std::string>;
  std::string Apply(std::string_view text, const Table &table) const;

  // Keys are lowercased space-joined phrases.
  std::map<Language, Table> to_english_;
  std::map<Language, Table> from_english_;
  size_t max_phrase_ = 1;
};

enum class PosTag { kNoun, kVerb, kOther };

using Lexicon = std::unordered_map<std::string, PosTag>;

// True iff some whitespace token of `text` maps to NOUN or VERB in the
// lexicon. Unknown tokens count as OTHER.
bool LexiconContentCheck(std::string_view text, Language language,
                         const Lexicon &lexicon);

// Reads "token<TAB>TAG" lines with TAG in {NOUN, PROPN, VERB, OTHER, ...};
// any tag other than NOUN, PROPN or VERB maps to OTHER.
Lexicon LoadLexicon(const std::string &path);

class LexiconContentTagger : public ContentTagger {
 public:
  explicit LexiconContentTagger(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}
  bool HasContentWord(std::string_view text, Language language) const override;

 private:
  Lexicon lexicon_;
};

// Treats every non-empty text as containing a content word. Used when no
// tagger or lexicon is configured.
class PermissiveContentTagger : public ContentTagger {
 public:
  bool HasContentWord(std::string_view text, Language language) const override;
};

// Unicode script voting. Devanagari is reported as Hindi; callers expecting
// Marathi accept it through DetectionMatches().
class ScriptLanguageDetector : public LanguageDetector {
 public:
  Detection Detect(std::string_view text) const override;
};

// True when the detection is compatible with the expected language, treating
// Hindi and Marathi as interchangeable since they share a script.
bool DetectionMatches(const Detection &detection, Language expected);

using EntailmentFn =
    std::function<NliResult(std::string_view premise, std::string_view hypothesis)>;

class FunctionEntailment : public EntailmentProvider {
 public:
  explicit FunctionEntailment(EntailmentFn fn) : fn_(std::move(fn)) {}
  NliResult Classify(std::string_view premise,
                     std::string_view hypothesis) const override {
    return fn_(premise, hypothesis);
  }

 private:
  EntailmentFn fn_;
};

// Fraction of the hypothesis terms that occur in the premise. When either
// argument contains the pair separator, the text before it is used as the
// sentence and the text after it as the fact.
double TermCoverage(std::string_view premise, std::string_view hypothesis);

// Labels entailment iff TermCoverage >= threshold, neutral otherwise. With a
// translator, a premise whose script is not Latin is translated to English
// first so that English facts can be matched against it.
class OverlapEntailment : public EntailmentProvider {
 public:
  explicit OverlapEntailment(double threshold = 0.6,
                             const TranslationProvider *translator = nullptr)
      : threshold_(threshold), translator_(translator) {}
  NliResult Classify(std::string_view premise,
                     std::string_view hypothesis) const override;

 private:
  double threshold_;
  const TranslationProvider *translator_;
};

class ConstantClassifier : public AlignmentClassifierProvider {
 public:
  explicit ConstantClassifier(double probability) : probability_(probability) {}
  double Score(std::string_view) const override { return probability_; }

 private:
  double probability_;
};

class FunctionClassifier : public AlignmentClassifierProvider {
 public:
  explicit FunctionClassifier(std::function<double(std::string_view)> fn)
      : fn_(std::move(fn)) {}
  double Score(std::string_view pair_text) const override { return fn_(pair_text); }

 private:
  std::function<double(std::string_view)> fn_;
};

// Splits the pair text at the separator and returns TermCoverage of the fact
// side against the sentence side, translated as above when needed.
class OverlapClassifier : public AlignmentClassifierProvider {
 public:
  explicit OverlapClassifier(const TranslationProvider *translator = nullptr)
      : translator_(translator) {}
  double Score(std::string_view pair_text) const override;

 private:
  const TranslationProvider *translator_;
};

}  // namespace factalign

#endif  // FACTALIGN_PROVIDERS_H_
