/* Copyright 2026 The MBT Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Possession archive: one text file per game. Layout is described in
// docs/formats.md.

#ifndef MBT_ARCHIVE_HPP_
#define MBT_ARCHIVE_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mbt/ingest.hpp"

namespace mbt {

inline constexpr int kArchiveVersion = 1;
inline constexpr const char* kArchiveExtension = ".poss";

struct PossessionArchive {
  std::string game_id;
  std::vector<Possession> possessions;
};

void write_archive(std::ostream& out, const PossessionArchive& archive);
void write_archive(const std::filesystem::path& path, const PossessionArchive& archive);

PossessionArchive read_archive(std::istream& in);
PossessionArchive read_archive(const std::filesystem::path& path);

// All *.poss files in `dir`, sorted by file name.
std::vector<std::filesystem::path> list_archives(const std::filesystem::path& dir);

}  // namespace mbt

#endif  // MBT_ARCHIVE_HPP_
