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

#ifndef FACTALIGN_DUMP_READER_H_
#define FACTALIGN_DUMP_READER_H_

#include <cstdint>
#include <exception>
#include <functional>
#include <istream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "factalign/language.h"
#include "factalign/wiki_markup.h"

namespace factalign {

struct WikiPage {
  std::string page_id;
  std::string entity_id;  // Wikidata id, empty when unknown
  Language language = Language::kEn;
  std::string title;
  std::vector<Section> sections;  // document order

  bool operator==(const WikiPage &) const = default;
};

using PageCallback = std::function<void(WikiPage)>;

// Streaming reader for MediaWiki XML exports. Bytes are pushed with Feed() in
// chunks of any size; every article page (namespace 0, not a redirect) is
// delivered to the callback as soon as its closing tag is seen. Pages whose
// markup cannot be stripped are skipped with a warning and counted.
class PageExtractor {
 public:
  PageExtractor(Language language, PageCallback callback);
  ~PageExtractor();

  PageExtractor(const PageExtractor &) = delete;
  PageExtractor &operator=(const PageExtractor &) = delete;

  // Throws ParseError with the byte offset on malformed XML.
  void Feed(std::string_view chunk);
  void Finish();

  int64_t pages_emitted() const { return pages_emitted_; }
  int64_t pages_skipped() const { return pages_skipped_; }
  int64_t markup_failures() const { return markup_failures_; }

 private:
  struct State;

  void Parse(const char *data, size_t size, bool final);

  std::unique_ptr<State> state_;
  int64_t pages_emitted_ = 0;
  int64_t pages_skipped_ = 0;
  int64_t markup_failures_ = 0;
};

// Streams the pages of an XML dump read from `in`.
void ExtractPages(std::istream &in, Language language, const PageCallback &callback,
                  size_t chunk_size = 1 << 16);

// Streams the pages of a dump file; ".gz" files are decompressed on the fly.
void ExtractPagesFromFile(const std::string &path, Language language,
                          const PageCallback &callback);

// Batch variant over an in-memory dump.
std::vector<WikiPage> ExtractAllPages(std::string_view dump, Language language);

}  // namespace factalign

#endif  // FACTALIGN_DUMP_READER_H_
