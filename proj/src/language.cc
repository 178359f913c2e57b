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

#include "factalign/language.h"

#include "factalign/errors.h"

namespace factalign {

std::string_view LanguageCode(Language language) {
  switch (language) {
    case Language::kHi: return "hi";
    case Language::kMr: return "mr";
    case Language::kTe: return "te";
    case Language::kTa: return "ta";
    case Language::kEn: return "en";
    case Language::kGu: return "gu";
    case Language::kBn: return "bn";
    case Language::kKn: return "kn";
  }
  return "??";
}

std::optional<Language> TryParseLanguage(std::string_view code) {
  for (Language l : kAllLanguages) {
    if (LanguageCode(l) == code) return l;
  }
  return std::nullopt;
}

Language ParseLanguage(std::string_view code) {
  auto language = TryParseLanguage(code);
  if (!language) {
    throw ConfigError("unsupported language code '" + std::string(code) + "'");
  }
  return *language;
}

}  // namespace factalign
