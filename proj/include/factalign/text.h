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

#ifndef FACTALIGN_TEXT_H_
#define FACTALIGN_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace factalign {

// Decodes one UTF-8 code point starting at text[*pos] and advances *pos.
// Invalid bytes decode as U+FFFD and advance by one byte.
char32_t DecodeUtf8(std::string_view text, size_t *pos);

// Appends the UTF-8 encoding of a code point.
void AppendUtf8(char32_t cp, std::string *out);

// Splits on ASCII and Unicode whitespace; never yields empty tokens.
std::vector<std::string> WhitespaceTokens(std::string_view text);

// Number of whitespace-delimited tokens.
int CountTokens(std::string_view text);

bool IsSpaceCodePoint(char32_t cp);

// True for ASCII punctuation and the common Unicode punctuation marks
// (dandas, dashes, quotes, brackets).
bool IsPunctuationCodePoint(char32_t cp);

// Term analyzer shared by the TFIDF scorer and the mock embedder: lowercases
// ASCII letters, replaces punctuation by spaces and splits on whitespace.
std::vector<std::string> AnalyzeTerms(std::string_view text);

// Trims leading and trailing whitespace (Unicode-aware).
std::string_view Trim(std::string_view text);

// Joins the parts with a separator.
std::string Join(const std::vector<std::string> &parts, std::string_view sep);

// 64-bit FNV-1a.
uint64_t Fingerprint(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL);

// Lowercase 16-digit hexadecimal rendering of a 64-bit value.
std::string HexDigest(uint64_t value);

}  // namespace factalign

#endif  // FACTALIGN_TEXT_H_
