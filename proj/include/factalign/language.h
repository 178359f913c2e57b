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

#ifndef FACTALIGN_LANGUAGE_H_
#define FACTALIGN_LANGUAGE_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace factalign {

// The eight supported languages. Declaration order is the canonical
// presentation order used in reports.
enum class Language { kHi, kMr, kTe, kTa, kEn, kGu, kBn, kKn };

inline constexpr std::array<Language, 8> kAllLanguages = {
    Language::kHi, Language::kMr, Language::kTe, Language::kTa,
    Language::kEn, Language::kGu, Language::kBn, Language::kKn,
};

// Two-letter code, e.g. "hi".
std::string_view LanguageCode(Language language);

// Parses a two-letter code; nullopt for unsupported codes.
std::optional<Language> TryParseLanguage(std::string_view code);

// Like TryParseLanguage but throws ConfigError.
Language ParseLanguage(std::string_view code);

}  // namespace factalign

#endif  // FACTALIGN_LANGUAGE_H_
