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

#include "factalign/wiki_markup.h"

#include <algorithm>
#include <array>
#include <cstdlib>

#include "factalign/text.h"

namespace factalign {
namespace {

constexpr int kMaxNesting = 64;

// Tags whose content is dropped together with the tag.
constexpr std::array<std::string_view, 10> kDroppedContentTags = {
    "ref", "math", "gallery", "timeline", "score", "syntaxhighlight",
    "source", "imagemap", "templatedata", "chem",
};

// Namespace prefixes of links that do not render as text.
constexpr std::array<std::string_view, 22> kHiddenLinkNamespaces = {
    "file", "image", "category", "media",
    "चित्र", "श्रेणी", "संचिका", "वर्ग", "फ़ाइल",
    "চিত্র", "বিষয়শ্রেণী", "ফাইল",
    "படிமம்", "பகுப்பு", "దస్త్రం", "వర్గం",
    "ಚಿತ್ರ", "ವರ್ಗ", "ચિત્ર", "શ્રેણી", "ફાઇલ", "ಕಡತ",
};

std::string AsciiLower(std::string_view s) {
  std::string out(s);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool IsAsciiAlpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool StartsWith(std::string_view s, size_t pos, std::string_view prefix) {
  return s.substr(pos, prefix.size()) == prefix;
}

// Interwiki language links such as [[en:Foo]] or [[zh-yue:Foo]].
bool IsInterwikiPrefix(std::string_view prefix) {
  if (prefix.size() < 2 || prefix.size() > 12) return false;
  for (char c : prefix) {
    if (!((c >= 'a' && c <= 'z') || c == '-')) return false;
  }
  return prefix.size() <= 3 || prefix.find('-') != std::string_view::npos;
}

class Stripper {
 public:
  explicit Stripper(std::string_view text) : text_(text), lower_(AsciiLower(text)) {}

  std::string Run() {
    size_t pos = 0;
    return Parse(pos, text_.size(), 0);
  }

 private:
  // Converts text_[pos, end) to plain text.
  std::string Parse(size_t &pos, size_t end, int depth) {
    if (depth > kMaxNesting) throw MarkupError("markup nesting too deep");
    std::string out;
    while (pos < end) {
      if (StartsWith(text_, pos, "<!--")) {
        size_t close = text_.find("-->", pos + 4);
        pos = close == std::string_view::npos || close + 3 > end ? end : close + 3;
      } else if (StartsWith(text_, pos, "{{") || StartsWith(text_, pos, "{|")) {
        pos = SkipBalanced(pos, end);
      } else if (StartsWith(text_, pos, "[[")) {
        out += Link(pos, end, depth);
      } else if (text_[pos] == '[' && IsExternalLinkStart(pos + 1)) {
        out += ExternalLink(pos, end, depth);
      } else if (text_[pos] == '\'' && StartsWith(text_, pos, "''")) {
        while (pos < end && text_[pos] == '\'') ++pos;
      } else if (text_[pos] == '<' && pos + 1 < end &&
                 (IsAsciiAlpha(text_[pos + 1]) || text_[pos + 1] == '/')) {
        pos = SkipTag(pos, end);
      } else if (StartsWith(text_, pos, "__") && MagicWordEnd(pos) != 0) {
        pos = MagicWordEnd(pos);
      } else {
        out.push_back(text_[pos++]);
      }
    }
    return out;
  }

  // Skips a "{{...}}" or "{|...|}" construct including nested braces.
  // Unterminated constructs swallow the rest of the range.
  size_t SkipBalanced(size_t pos, size_t end) {
    int nesting = 0;
    while (pos < end) {
      if (StartsWith(text_, pos, "{{") || StartsWith(text_, pos, "{|")) {
        if (++nesting > kMaxNesting) throw MarkupError("template nesting too deep");
        pos += 2;
      } else if (StartsWith(text_, pos, "}}") || StartsWith(text_, pos, "|}")) {
        pos += 2;
        if (--nesting == 0) return pos;
      } else {
        ++pos;
      }
    }
    return end;
  }

  // Finds the "]]" closing the link opened at `pos`, honoring nested links.
  size_t FindLinkClose(size_t pos, size_t end) {
    int nesting = 0;
    while (pos < end) {
      if (StartsWith(text_, pos, "[[")) {
        if (++nesting > kMaxNesting) throw MarkupError("link nesting too deep");
        pos += 2;
      } else if (StartsWith(text_, pos, "]]")) {
        if (--nesting == 0) return pos;
        pos += 2;
      } else {
        ++pos;
      }
    }
    return std::string_view::npos;
  }

  std::string Link(size_t &pos, size_t end, int depth) {
    size_t close = FindLinkClose(pos, end);
    if (close == std::string_view::npos) {
      // Not a link; keep the brackets as text.
      pos += 2;
      return "[[";
    }
    size_t inner_begin = pos + 2;
    pos = close + 2;
    std::string_view inner = text_.substr(inner_begin, close - inner_begin);

    // Top-level pipe separates target and label.
    size_t pipe = std::string_view::npos;
    int nesting = 0;
    for (size_t i = 0; i < inner.size(); ++i) {
      if (StartsWith(inner, i, "[[") || StartsWith(inner, i, "{{")) ++nesting, ++i;
      else if (StartsWith(inner, i, "]]") || StartsWith(inner, i, "}}")) --nesting, ++i;
      else if (inner[i] == '|' && nesting == 0) {
        pipe = i;
        break;
      }
    }
    std::string_view target = inner.substr(0, pipe);
    bool leading_colon = !target.empty() && target[0] == ':';
    if (leading_colon) target.remove_prefix(1);
    size_t colon = target.find(':');
    if (!leading_colon && colon != std::string_view::npos) {
      std::string prefix = AsciiLower(Trim(target.substr(0, colon)));
      for (std::string_view ns : kHiddenLinkNamespaces) {
        if (prefix == ns) return "";
      }
      if (IsInterwikiPrefix(prefix)) return "";
    }
    if (pipe == std::string_view::npos || Trim(inner.substr(pipe + 1)).empty()) {
      return std::string(target);
    }
    size_t label_pos = inner_begin + pipe + 1;
    return Parse(label_pos, close, depth + 1);
  }

  bool IsExternalLinkStart(size_t pos) const {
    for (std::string_view scheme : {"http://", "https://", "ftp://", "//"}) {
      if (StartsWith(lower_, pos, scheme)) return true;
    }
    return false;
  }

  std::string ExternalLink(size_t &pos, size_t end, int depth) {
    size_t close = text_.find(']', pos);
    size_t newline = text_.find('\n', pos);
    if (close == std::string_view::npos || close >= end ||
        (newline != std::string_view::npos && newline < close)) {
      return std::string(1, text_[pos++]);
    }
    size_t space = text_.find(' ', pos);
    size_t label_pos = close;
    if (space != std::string_view::npos && space < close) label_pos = space + 1;
    pos = close + 1;
    return Parse(label_pos, close, depth + 1);
  }

  // Handles an HTML-like tag at `pos` and returns the position after it.
  size_t SkipTag(size_t pos, size_t end) {
    size_t gt = text_.find('>', pos);
    if (gt == std::string_view::npos || gt >= end) return pos + 1;
    bool closing = text_[pos + 1] == '/';
    size_t name_begin = pos + (closing ? 2 : 1);
    size_t name_end = name_begin;
    while (name_end < gt && IsAsciiAlpha(text_[name_end])) ++name_end;
    std::string name = AsciiLower(text_.substr(name_begin, name_end - name_begin));
    bool self_closing = text_[gt - 1] == '/';
    if (closing || self_closing) return gt + 1;
    if (std::find(kDroppedContentTags.begin(), kDroppedContentTags.end(), name) ==
        kDroppedContentTags.end()) {
      return gt + 1;
    }
    size_t close = lower_.find("</" + name, gt + 1);
    if (close == std::string::npos || close >= end) return end;
    size_t close_gt = text_.find('>', close);
    return close_gt == std::string_view::npos ? end : close_gt + 1;
  }

  // End of a "__MAGICWORD__" starting at pos, or 0.
  size_t MagicWordEnd(size_t pos) const {
    size_t i = pos + 2;
    while (i < text_.size() && text_[i] >= 'A' && text_[i] <= 'Z') ++i;
    if (i == pos + 2 || !StartsWith(text_, i, "__")) return 0;
    return i + 2;
  }

  std::string_view text_;
  std::string lower_;
};

// Cleans one line of stripped text: list markers, rules and whitespace runs.
std::string CleanLine(std::string_view line) {
  line = Trim(line);
  while (!line.empty() && (line[0] == '*' || line[0] == '#' || line[0] == ':' ||
                           line[0] == ';')) {
    line.remove_prefix(1);
  }
  if (line.find_first_not_of('-') == std::string_view::npos) return "";
  return Join(WhitespaceTokens(line), " ");
}

// Position and extent of a section header found by FindHeader.
struct HeaderMatch {
  size_t begin = std::string_view::npos;  // first '='
  size_t end = 0;                         // one past the closing run
  std::string_view title;
};

size_t CountRun(std::string_view s, size_t pos, char c) {
  size_t n = 0;
  while (pos + n < s.size() && s[pos + n] == c) ++n;
  return n;
}

bool IsSpaceByte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

HeaderMatch FindHeader(std::string_view text, size_t from) {
  for (size_t i = from; i < text.size(); ++i) {
    if (text[i] != '=' || (i > 0 && !IsSpaceByte(text[i - 1]))) continue;
    size_t run = CountRun(text, i, '=');
    if (run < 2 || run > 6) {
      i += run - 1;
      continue;
    }
    size_t title_begin = i + run;
    size_t j = title_begin;
    while (j < text.size() && text[j] != '=' && text[j] != '\n') ++j;
    if (j >= text.size() || text[j] != '=' || CountRun(text, j, '=') != run) {
      i += run - 1;
      continue;
    }
    size_t after = j + run;
    if (after < text.size() && !IsSpaceByte(text[after])) {
      i += run - 1;
      continue;
    }
    std::string_view title = Trim(text.substr(title_begin, j - title_begin));
    if (title.empty()) {
      i += run - 1;
      continue;
    }
    return {i, after, title};
  }
  return {};
}

std::string RemoveComments(std::string_view text) {
  std::string out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t open = text.find("<!--", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    size_t close = text.find("-->", open + 4);
    if (close == std::string_view::npos) break;
    pos = close + 3;
  }
  return out;
}

}  // namespace

std::string DecodeHtmlEntities(std::string_view text) {
  static const std::array<std::pair<std::string_view, char32_t>, 9> kNamed = {{
      {"nbsp", 0x00A0}, {"amp", '&'}, {"lt", '<'}, {"gt", '>'}, {"quot", '"'},
      {"apos", '\''}, {"ndash", 0x2013}, {"mdash", 0x2014}, {"zwj", 0x200D},
  }};
  std::string out;
  size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] != '&') {
      out.push_back(text[pos++]);
      continue;
    }
    size_t semi = text.find(';', pos);
    if (semi == std::string_view::npos || semi - pos > 10) {
      out.push_back(text[pos++]);
      continue;
    }
    std::string_view name = text.substr(pos + 1, semi - pos - 1);
    char32_t cp = 0;
    if (!name.empty() && name[0] == '#') {
      bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      std::string digits(name.substr(hex ? 2 : 1));
      char *endp = nullptr;
      long value = digits.empty() ? 0 : std::strtol(digits.c_str(), &endp, hex ? 16 : 10);
      if (endp && *endp == '\0' && value > 0 && value < 0x110000) {
        cp = static_cast<char32_t>(value);
      }
    } else {
      for (const auto &[entity, value] : kNamed) {
        if (name == entity) cp = value;
      }
    }
    if (cp == 0) {
      out.push_back(text[pos++]);
      continue;
    }
    AppendUtf8(cp, &out);
    pos = semi + 1;
  }
  return out;
}

std::string StripMarkup(std::string_view wikitext) {
  std::string stripped = Stripper(wikitext).Run();
  std::string decoded = DecodeHtmlEntities(stripped);
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos <= decoded.size()) {
    size_t nl = decoded.find('\n', pos);
    if (nl == std::string::npos) nl = decoded.size();
    std::string line = CleanLine(std::string_view(decoded).substr(pos, nl - pos));
    if (!line.empty()) lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return Join(lines, "\n");
}

std::vector<Section> ExtractSections(std::string_view wikitext) {
  std::string text = RemoveComments(wikitext);
  std::vector<Section> sections;
  auto add = [&](std::string header, std::string_view raw_body) {
    Section section{std::move(header), StripMarkup(raw_body)};
    if (!section.body.empty()) sections.push_back(std::move(section));
  };
  std::string header;
  size_t body_begin = 0;
  for (;;) {
    HeaderMatch match = FindHeader(text, body_begin);
    if (match.begin == std::string_view::npos) {
      add(header, std::string_view(text).substr(body_begin));
      break;
    }
    add(header, std::string_view(text).substr(body_begin, match.begin - body_begin));
    header = Join(WhitespaceTokens(StripMarkup(match.title)), " ");
    body_begin = match.end;
  }
  return sections;
}

}  // namespace factalign
