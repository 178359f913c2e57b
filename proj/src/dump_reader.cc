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

#include "factalign/dump_reader.h"

#include <expat.h>
#include <spdlog/spdlog.h>

#include <sstream>

#include "factalign/errors.h"
#include "factalign/file_io.h"
#include "factalign/text.h"

namespace factalign {

namespace {

bool IsRedirectText(std::string_view text) {
  text = Trim(text);
  if (text.empty() || text[0] != '#') return false;
  std::string head(text.substr(1, 16));
  for (char &c : head) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return head.rfind("REDIRECT", 0) == 0 || text.substr(1).rfind("पुनर्निर्देशित", 0) == 0 ||
         text.substr(1).rfind("पुनर्प्रेषित", 0) == 0;
}

}  // namespace

struct PageExtractor::State {
  PageExtractor *owner = nullptr;
  XML_Parser parser = nullptr;
  Language language;
  PageCallback callback;
  std::exception_ptr error;

  // Element stack of the current position.
  std::vector<std::string> path;
  // Text accumulator for the element being captured, if any.
  std::string *capture = nullptr;

  bool in_page = false;
  bool redirect = false;
  bool has_page_id = false;
  std::string title, ns, page_id, text;

  void StartPage() {
    in_page = true;
    redirect = false;
    has_page_id = false;
    title.clear();
    ns.clear();
    page_id.clear();
    text.clear();
  }

  void EndPage() {
    in_page = false;
    if (Trim(ns) != "0" || redirect || IsRedirectText(text)) {
      ++owner->pages_skipped_;
      return;
    }
    WikiPage page;
    page.page_id = std::string(Trim(page_id));
    page.language = language;
    page.title = std::string(Trim(title));
    try {
      page.sections = ExtractSections(text);
    } catch (const MarkupError &e) {
      spdlog::warn("skipping page {} ({}): {}", page.page_id, page.title, e.what());
      ++owner->markup_failures_;
      ++owner->pages_skipped_;
      return;
    }
    ++owner->pages_emitted_;
    callback(std::move(page));
  }

  static void OnStart(void *data, const XML_Char *name, const XML_Char **attrs) {
    auto *self = static_cast<State *>(data);
    try {
      std::string_view element(name);
      std::string_view parent = self->path.empty() ? "" : self->path.back();
      self->path.emplace_back(element);
      if (element == "page") {
        self->StartPage();
        return;
      }
      if (!self->in_page) return;
      if (element == "redirect") {
        self->redirect = true;
      } else if (element == "title" && parent == "page") {
        self->capture = &self->title;
      } else if (element == "ns" && parent == "page") {
        self->capture = &self->ns;
      } else if (element == "id" && parent == "page" && !self->has_page_id) {
        self->has_page_id = true;
        self->capture = &self->page_id;
      } else if (element == "text" && parent == "revision") {
        self->text.clear();
        self->capture = &self->text;
      }
      (void)attrs;
    } catch (...) {
      self->Fail();
    }
  }

  static void OnEnd(void *data, const XML_Char *name) {
    auto *self = static_cast<State *>(data);
    try {
      self->capture = nullptr;
      if (!self->path.empty()) self->path.pop_back();
      if (std::string_view(name) == "page" && self->in_page) self->EndPage();
    } catch (...) {
      self->Fail();
    }
  }

  static void OnText(void *data, const XML_Char *s, int len) {
    auto *self = static_cast<State *>(data);
    if (self->capture != nullptr) self->capture->append(s, len);
  }

  void Fail() {
    if (!error) error = std::current_exception();
    XML_StopParser(parser, XML_FALSE);
  }
};

PageExtractor::PageExtractor(Language language, PageCallback callback)
    : state_(std::make_unique<State>()) {
  state_->owner = this;
  state_->language = language;
  state_->callback = std::move(callback);
  state_->parser = XML_ParserCreate("UTF-8");
  if (state_->parser == nullptr) throw Error("cannot allocate XML parser");
  XML_SetUserData(state_->parser, state_.get());
  XML_SetElementHandler(state_->parser, &State::OnStart, &State::OnEnd);
  XML_SetCharacterDataHandler(state_->parser, &State::OnText);
}

PageExtractor::~PageExtractor() {
  if (state_ && state_->parser) XML_ParserFree(state_->parser);
}

void PageExtractor::Parse(const char *data, size_t size, bool final) {
  XML_Status status =
      XML_Parse(state_->parser, data, static_cast<int>(size), final ? 1 : 0);
  if (state_->error) {
    std::exception_ptr error = state_->error;
    state_->error = nullptr;
    std::rethrow_exception(error);
  }
  if (status != XML_STATUS_OK) {
    throw ParseError(std::string("malformed XML: ") +
                         XML_ErrorString(XML_GetErrorCode(state_->parser)),
                     XML_GetCurrentByteIndex(state_->parser));
  }
}

void PageExtractor::Feed(std::string_view chunk) {
  constexpr size_t kMaxPiece = 1 << 30;
  while (chunk.size() > kMaxPiece) {
    Parse(chunk.data(), kMaxPiece, false);
    chunk.remove_prefix(kMaxPiece);
  }
  Parse(chunk.data(), chunk.size(), false);
}

void PageExtractor::Finish() { Parse("", 0, true); }

void ExtractPages(std::istream &in, Language language, const PageCallback &callback,
                  size_t chunk_size) {
  PageExtractor extractor(language, callback);
  std::vector<char> buffer(chunk_size);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    std::streamsize n = in.gcount();
    if (n <= 0) break;
    extractor.Feed(std::string_view(buffer.data(), static_cast<size_t>(n)));
  }
  extractor.Finish();
}

void ExtractPagesFromFile(const std::string &path, Language language,
                          const PageCallback &callback) {
  PageExtractor extractor(language, callback);
  ReadChunks(path, [&](std::string_view chunk) { extractor.Feed(chunk); });
  extractor.Finish();
}

std::vector<WikiPage> ExtractAllPages(std::string_view dump, Language language) {
  std::vector<WikiPage> pages;
  PageExtractor extractor(language, [&](WikiPage page) { pages.push_back(std::move(page)); });
  extractor.Feed(dump);
  extractor.Finish();
  return pages;
}

}  // namespace factalign
