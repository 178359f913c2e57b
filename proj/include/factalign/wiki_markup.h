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

#ifndef FACTALIGN_WIKI_MARKUP_H_
#define FACTALIGN_WIKI_MARKUP_H_

#include <string>
#include <string_view>
#include <vector>

#include "factalign/errors.h"

namespace factalign {

// Raised when markup cannot be stripped (nesting deeper than the limit).
class MarkupError : public Error {
 public:
  using Error::Error;
};

struct Section {
  std::string header;  // empty for the lead section
  std::string body;    // plain text, one paragraph per line

  bool operator==(const Section &) const = default;
};

// Converts wikitext to plain text. Templates, tables, references, comments,
// file/category links and formatting quotes are removed; internal links are
// replaced by their label and external links by their caption. Paragraphs are
// trimmed, empty lines dropped and the rest joined with '\n'.
std::string StripMarkup(std::string_view wikitext);

// Splits wikitext at "== Header ==" markers (levels 2 to 6) and strips each
// part. The text before the first header becomes the lead section with an
// empty header. Sections whose body is empty after stripping are dropped.
std::vector<Section> ExtractSections(std::string_view wikitext);

// Decodes the HTML character references that survive XML decoding, e.g.
// "&nbsp;" and "&#2325;".
std::string DecodeHtmlEntities(std::string_view text);

}  // namespace factalign

#endif  // FACTALIGN_WIKI_MARKUP_H_
