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

#include "factalign/sentences.h"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "factalign/errors.h"
#include "factalign/parallel.h"
#include "factalign/text.h"

namespace factalign {

Sentence MakeSentence(std::string text, Language language, std::string section,
                      std::string page_id, std::string entity_id, int ordinal) {
  Sentence s;
  s.token_count = CountTokens(text);
  s.text = std::move(text);
  s.language = language;
  s.section = std::move(section);
  s.page_id = std::move(page_id);
  s.entity_id = std::move(entity_id);
  s.ordinal = ordinal;
  return s;
}

bool PageIdLess(std::string_view a, std::string_view b) {
  auto numeric = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](char c) { return c >= '0' && c <= '9'; });
  };
  if (numeric(a) && numeric(b)) {
    a.remove_prefix(std::min(a.find_first_not_of('0'), a.size()));
    b.remove_prefix(std::min(b.find_first_not_of('0'), b.size()));
    if (a.size() != b.size()) return a.size() < b.size();
  }
  return a < b;
}

bool CanonicalSentenceLess(const Sentence &a, const Sentence &b) {
  if (a.page_id != b.page_id) return PageIdLess(a.page_id, b.page_id);
  return a.ordinal < b.ordinal;
}

void SplitterConfig::AddPrefix(Language language, std::string_view prefix) {
  prefix = Trim(prefix);
  while (!prefix.empty() && prefix.back() == '.') prefix.remove_suffix(1);
  if (!prefix.empty()) nonbreaking_prefixes[language].emplace(prefix);
}

void SplitterConfig::LoadPrefixFile(Language language, const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open prefix list " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    AddPrefix(language, line);
  }
}

SplitterConfig SplitterConfig::FromDirectory(const std::string &directory) {
  SplitterConfig config;
  for (Language language : kAllLanguages) {
    std::filesystem::path file =
        std::filesystem::path(directory) / (std::string(LanguageCode(language)) + ".txt");
    if (std::filesystem::exists(file)) config.LoadPrefixFile(language, file.string());
  }
  return config;
}

namespace {

bool IsClosingMark(char32_t cp) {
  switch (cp) {
    case '"': case '\'': case ')': case ']': case '}':
    case 0x2019: case 0x201D: case 0x00BB: case 0x203A:
      return true;
    default:
      return false;
  }
}

bool IsUpperLatin(std::string_view word) {
  return word.size() == 1 && word[0] >= 'A' && word[0] <= 'Z';
}

// Splits one line (no newlines) and appends the sentences to `out`.
void SplitLine(std::string_view line, Language language, const SplitterConfig &config,
               std::vector<std::string> *out) {
  const std::set<std::string> *prefixes = nullptr;
  auto it = config.nonbreaking_prefixes.find(language);
  if (it != config.nonbreaking_prefixes.end()) prefixes = &it->second;

  auto emit = [&](size_t begin, size_t end) {
    std::string_view piece = Trim(line.substr(begin, end - begin));
    if (!piece.empty()) out->emplace_back(piece);
  };

  size_t start = 0;
  size_t pos = 0;
  while (pos < line.size()) {
    size_t cp_begin = pos;
    char32_t cp = DecodeUtf8(line, &pos);
    if (!config.terminators.count(cp)) continue;

    // Extend over the whole terminator run and any closing marks.
    size_t run_end = pos;
    int terminators = 1;
    while (run_end < line.size()) {
      size_t next = run_end;
      char32_t c = DecodeUtf8(line, &next);
      if (config.terminators.count(c)) {
        ++terminators;
      } else if (!IsClosingMark(c)) {
        break;
      }
      run_end = next;
    }

    bool boundary = true;
    if (run_end < line.size()) {
      size_t next = run_end;
      boundary = IsSpaceCodePoint(DecodeUtf8(line, &next));
    }
    if (boundary && cp == '.' && terminators == 1) {
      // The word directly before the period.
      size_t word_begin = cp_begin;
      while (word_begin > start) {
        size_t prev = word_begin - 1;
        while (prev > start && (static_cast<unsigned char>(line[prev]) & 0xC0) == 0x80) --prev;
        size_t probe = prev;
        if (IsSpaceCodePoint(DecodeUtf8(line, &probe))) break;
        word_begin = prev;
      }
      std::string_view word = line.substr(word_begin, cp_begin - word_begin);
      while (!word.empty() && (word[0] == '(' || word[0] == '"' || word[0] == '\'' ||
                               word[0] == '[')) {
        word.remove_prefix(1);
      }
      if ((prefixes != nullptr && prefixes->count(std::string(word))) ||
          (config.latin_initials && IsUpperLatin(word))) {
        boundary = false;
      }
    }
    if (boundary) {
      emit(start, run_end);
      start = run_end;
    }
    pos = run_end;
  }
  emit(start, line.size());
}

}  // namespace

std::vector<std::string> SplitSentences(std::string_view body, Language language,
                                        const SplitterConfig &config) {
  std::vector<std::string> sentences;
  size_t pos = 0;
  while (pos <= body.size()) {
    size_t nl = body.find('\n', pos);
    if (nl == std::string_view::npos) nl = body.size();
    SplitLine(body.substr(pos, nl - pos), language, config, &sentences);
    pos = nl + 1;
  }
  return sentences;
}

std::string_view RejectReasonName(RejectReason reason) {
  switch (reason) {
    case RejectReason::kTooShort: return "TooShort";
    case RejectReason::kTooLong: return "TooLong";
    case RejectReason::kWrongLanguage: return "WrongLanguage";
    case RejectReason::kNoContentWord: return "NoContentWord";
  }
  return "";
}

RejectReason ParseRejectReason(std::string_view name) {
  for (RejectReason r : {RejectReason::kTooShort, RejectReason::kTooLong,
                         RejectReason::kWrongLanguage, RejectReason::kNoContentWord}) {
    if (RejectReasonName(r) == name) return r;
  }
  throw ParseError("unknown reject reason '" + std::string(name) + "'");
}

FilterReport FilterSentences(const std::vector<Sentence> &sentences,
                             Language expected_language,
                             const LanguageDetector &detector,
                             const ContentTagger &tagger, const FilterLimits &limits) {
  FilterReport report;
  for (const Sentence &s : sentences) {
    if (!DetectionMatches(detector.Detect(s.text), expected_language)) {
      report.rejected.push_back({s, RejectReason::kWrongLanguage});
    } else if (s.token_count < limits.min_tokens) {
      report.rejected.push_back({s, RejectReason::kTooShort});
    } else if (s.token_count > limits.max_tokens) {
      report.rejected.push_back({s, RejectReason::kTooLong});
    } else if (!tagger.HasContentWord(s.text, expected_language)) {
      report.rejected.push_back({s, RejectReason::kNoContentWord});
    } else {
      report.kept.push_back(s);
    }
  }
  return report;
}

FilterReport IngestPage(const WikiPage &page, const SplitterConfig &splitter,
                        const LanguageDetector &detector, const ContentTagger &tagger,
                        const FilterLimits &limits) {
  std::vector<Sentence> sentences;
  int ordinal = 0;
  for (const Section &section : page.sections) {
    for (std::string &text : SplitSentences(section.body, page.language, splitter)) {
      sentences.push_back(MakeSentence(std::move(text), page.language, section.header,
                                       page.page_id, page.entity_id, ordinal++));
    }
  }
  return FilterSentences(sentences, page.language, detector, tagger, limits);
}

FilterReport IngestPages(const std::vector<WikiPage> &pages,
                         const SplitterConfig &splitter,
                         const LanguageDetector &detector, const ContentTagger &tagger,
                         int workers, const FilterLimits &limits) {
  std::vector<FilterReport> reports(pages.size());
  ParallelFor(pages.size(), workers, [&](size_t i) {
    reports[i] = IngestPage(pages[i], splitter, detector, tagger, limits);
  });
  std::vector<size_t> order(pages.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return PageIdLess(pages[a].page_id, pages[b].page_id);
  });
  FilterReport merged;
  for (size_t i : order) {
    auto &r = reports[i];
    std::move(r.kept.begin(), r.kept.end(), std::back_inserter(merged.kept));
    std::move(r.rejected.begin(), r.rejected.end(), std::back_inserter(merged.rejected));
  }
  return merged;
}

}  // namespace factalign
