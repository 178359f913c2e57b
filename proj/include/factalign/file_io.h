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

#ifndef FACTALIGN_FILE_IO_H_
#define FACTALIGN_FILE_IO_H_

#include <functional>
#include <string>
#include <string_view>

namespace factalign {

// Reads a file in chunks, transparently decompressing gzip input (detected by
// magic bytes). Throws ConfigError when the file cannot be opened.
void ReadChunks(const std::string &path,
                const std::function<void(std::string_view)> &consume,
                size_t chunk_size = 1 << 16);

// Calls `consume` for every line (without the trailing newline).
void ReadLines(const std::string &path,
               const std::function<void(std::string_view line, int line_number)> &consume);

std::string ReadFile(const std::string &path);

// Writes via a temporary file and rename so readers never see partial output.
void WriteFile(const std::string &path, std::string_view contents);

// Fingerprint of a file's (decompressed) bytes as 16 hex digits.
std::string FileDigest(const std::string &path);

}  // namespace factalign

#endif  // FACTALIGN_FILE_IO_H_
