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

#ifndef FACTALIGN_SENTENCES_H_
#define FACTALIGN_SENTENCES_H_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "factalign/dump_reader.h"
#include "factalign/language.h"
#include "factalign/providers.h"

namespace factalign {

struct Sentence {
  std::string text;
  Language language = Language::kEn;
  int token_count = 0;  // whitespace tokens of text
  std::string section;
  std::string page_id;
  std::string entity_id;
  int ordinal = 0;  // position within the page

  bool operator==(const Sentence &) const = default;
};

// Builds a sentence with token_count derived from the text.
Sentence MakeSentence(std::string text, Language language, std::string section = "",
                      std::string page_id = "", std::string entity_id = "",
                      int ordinal = 0);

// Canonical page order: numeric ids by value, everything else lexicographic.
bool PageIdLess(std::string_view a, std::string_view b);

// Orders sentences by (page id, ordinal).
bool CanonicalSentenceLess(const Sentence &a, const Sentence &b);

struct SplitterConfig {
  // Sentence terminators.
  std::set<char32_t> terminators = {'.', '?', '!', 0x0964, 0x0965};
  // Words that do not end a sentence when followed by '.', stored without the
  // trailing period, per language.
  std::map<Language, std::set<std::string>> nonbreaking_prefixes;
  // Treat a single uppercase Latin letter followed by '.' as an initial.
  bool latin_initials = true;

  void AddPrefix(Language language, std::string_view prefix);

  // Loads one prefix per line; '#' starts a comment.
  void LoadPrefixFile(Language language, const std::string &path);

  // Loads "<code>.txt" for every supported language found in `directory`.
  static SplitterConfig FromDirectory(const std::string &directory);
};

// Splits plain text into trimmed, non-empty sentences. Newlines are hard
// boundaries. A terminator run (plus closing quotes or brackets) ends a
// sentence when followed by whitespace or the end of the line, unless the
// run is a single '.' after a non-breaking prefix or an initial.
std::vector<std::string> SplitSentences(std::string_view body, Language language,
                                        const SplitterConfig &config = {});

enum class RejectReason { kTooShort, kTooLong, kWrongLanguage, kNoContentWord };

std::string_view RejectReasonName(RejectReason reason);
RejectReason ParseRejectReason(std::string_view name);

struct Rejection {
  Sentence sentence;
  RejectReason reason;

  bool operator==(const Rejection &) const = default;
};

struct FilterReport {
  std::vector<Sentence> kept;
  std::vector<Rejection> rejected;
};

struct FilterLimits {
  int min_tokens = 5;
  int max_tokens = 100;
};

// Applies the pruning rules in fixed order: language, then length, then
// content. Every input sentence lands in exactly one of kept or rejected.
FilterReport FilterSentences(const std::vector<Sentence> &sentences,
                             Language expected_language,
                             const LanguageDetector &detector,
                             const ContentTagger &tagger,
                             const FilterLimits &limits = {});

// Splits every section of a page and filters the result. Ordinals count all
// split sentences of the page, kept or not.
FilterReport IngestPage(const WikiPage &page, const SplitterConfig &splitter,
                        const LanguageDetector &detector, const ContentTagger &tagger,
                        const FilterLimits &limits = {});

// Page-parallel IngestPage. The merged report is in canonical order.
FilterReport IngestPages(const std::vector<WikiPage> &pages,
                         const SplitterConfig &splitter,
                         const LanguageDetector &detector,
                         const ContentTagger &tagger, int workers,
                         const FilterLimits &limits = {});

}  // namespace factalign

#endif  // FACTALIGN_SENTENCES_H_
