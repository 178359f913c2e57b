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

#include "factalign/file_io.h"

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <vector>

#include "factalign/errors.h"
#include "factalign/text.h"

namespace factalign {

void ReadChunks(const std::string &path,
                const std::function<void(std::string_view)> &consume,
                size_t chunk_size) {
  // gzopen reads uncompressed files as-is.
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw ConfigError("cannot open " + path);
  std::unique_ptr<gzFile_s, decltype(&gzclose)> guard(file, &gzclose);
  gzbuffer(file, 1 << 17);
  std::vector<char> buffer(chunk_size);
  for (;;) {
    int n = gzread(file, buffer.data(), static_cast<unsigned>(buffer.size()));
    if (n < 0) {
      int code = 0;
      throw ParseError(path + ": " + gzerror(file, &code));
    }
    if (n == 0) break;
    consume(std::string_view(buffer.data(), n));
  }
}

void ReadLines(const std::string &path,
               const std::function<void(std::string_view, int)> &consume) {
  std::string pending;
  int line_number = 0;
  ReadChunks(path, [&](std::string_view chunk) {
    size_t pos = 0;
    while (pos < chunk.size()) {
      size_t nl = chunk.find('\n', pos);
      if (nl == std::string_view::npos) {
        pending.append(chunk.substr(pos));
        break;
      }
      pending.append(chunk.substr(pos, nl - pos));
      if (!pending.empty() && pending.back() == '\r') pending.pop_back();
      consume(pending, ++line_number);
      pending.clear();
      pos = nl + 1;
    }
  });
  if (!pending.empty()) consume(pending, ++line_number);
}

std::string ReadFile(const std::string &path) {
  std::string contents;
  ReadChunks(path, [&](std::string_view chunk) { contents.append(chunk); });
  return contents;
}

void WriteFile(const std::string &path, std::string_view contents) {
  std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path());
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw ConfigError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

std::string FileDigest(const std::string &path) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  ReadChunks(path, [&](std::string_view chunk) { hash = Fingerprint(chunk, hash); });
  return HexDigest(hash);
}

}  // namespace factalign
