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

#include "mbt/archive.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mbt {
namespace {

constexpr const char* kMagic = "MBT-POSSESSION-ARCHIVE";

std::string token(const std::string& s) {
  if (s.empty()) return "-";
  std::string out = s;
  std::replace_if(out.begin(), out.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }, '_');
  return out;
}

std::string untoken(const std::string& s) { return s == "-" ? std::string() : s; }

[[noreturn]] void fail(const std::string& what) {
  throw DataQualityError("malformed possession archive: " + what);
}

template <typename T>
T read_field(std::istream& in, const char* key) {
  std::string k;
  T value{};
  if (!(in >> k) || k != key || !(in >> value)) fail(std::string("expected '") + key + "'");
  return value;
}

}  // namespace

void write_archive(std::ostream& out, const PossessionArchive& archive) {
  out << fmt::format("{} {}\n", kMagic, kArchiveVersion);
  out << fmt::format("game_id {}\n", token(archive.game_id));
  out << fmt::format("possession_count {}\n", archive.possessions.size());
  for (std::size_t k = 0; k < archive.possessions.size(); ++k) {
    const Possession& p = archive.possessions[k];
    out << fmt::format(
        "possession {} period {} start_game_clock {} dt {} frames {} attacked_basket {} "
        "direction_source {} shot_clock_imputed {} label {}\n",
        k, p.period, p.start_game_clock_s, p.dt, p.frames.size(), to_string(p.attacked_basket),
        token(p.direction_source), p.shot_clock_imputed, token(p.label));
    out << fmt::format("offense {}\n", fmt::join(p.offense_ids, " "));
    out << fmt::format("defense {}\n", fmt::join(p.defense_ids, " "));
    for (const Frame& f : p.frames) {
      std::string line = fmt::format("{} {} {} {}", f.t, f.ball.x, f.ball.y, f.shot_clock_s);
      for (const auto& pl : f.players) line += fmt::format(" {} {}", pl.x, pl.y);
      line += '\n';
      out << line;
    }
  }
}

void write_archive(const std::filesystem::path& path, const PossessionArchive& archive) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write archive " + path.string());
  write_archive(out, archive);
  if (!out) throw IoError("failed writing archive " + path.string());
}

PossessionArchive read_archive(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) fail("bad magic");
  if (version != kArchiveVersion) fail("unsupported version " + std::to_string(version));
  PossessionArchive archive;
  archive.game_id = untoken(read_field<std::string>(in, "game_id"));
  const auto count = read_field<std::size_t>(in, "possession_count");
  archive.possessions.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Possession p;
    p.game_id = archive.game_id;
    read_field<std::size_t>(in, "possession");
    p.period = read_field<int>(in, "period");
    p.start_game_clock_s = read_field<double>(in, "start_game_clock");
    p.dt = read_field<double>(in, "dt");
    const auto n = read_field<std::size_t>(in, "frames");
    p.attacked_basket = basket_from_string(read_field<std::string>(in, "attacked_basket"));
    p.direction_source = untoken(read_field<std::string>(in, "direction_source"));
    p.shot_clock_imputed = read_field<int>(in, "shot_clock_imputed");
    p.label = untoken(read_field<std::string>(in, "label"));
    std::string key;
    if (!(in >> key) || key != "offense") fail("expected 'offense'");
    for (int& id : p.offense_ids) if (!(in >> id)) fail("offense ids");
    if (!(in >> key) || key != "defense") fail("expected 'defense'");
    for (int& id : p.defense_ids) if (!(in >> id)) fail("defense ids");
    p.frames.resize(n);
    for (Frame& f : p.frames) {
      if (!(in >> f.t >> f.ball.x >> f.ball.y >> f.shot_clock_s)) fail("frame row");
      for (auto& pl : f.players) {
        if (!(in >> pl.x >> pl.y)) fail("frame row");
      }
    }
    archive.possessions.push_back(std::move(p));
  }
  return archive;
}

PossessionArchive read_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read archive " + path.string());
  return read_archive(in);
}

std::vector<std::filesystem::path> list_archives(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == kArchiveExtension) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mbt
