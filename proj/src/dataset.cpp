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

#include "mbt/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "binary_io.hpp"

namespace mbt {
namespace {

constexpr char kDatasetMagic[8] = {'M', 'B', 'T', 'D', 'S', 'E', 'T', '\0'};

// Role slots in [begin, end) other than self_slot, nearest to self first.
std::vector<int> nearest_first(const Frame& anchor, const std::array<int, 10>& slot_ids,
                               int self_slot, int begin, int end) {
  std::vector<int> slots;
  for (int s = begin; s < end; ++s) {
    if (s != self_slot) slots.push_back(s);
  }
  const Location2D& me = anchor.players[static_cast<std::size_t>(self_slot)];
  std::sort(slots.begin(), slots.end(), [&](int a, int b) {
    const double da = distance(me, anchor.players[static_cast<std::size_t>(a)]);
    const double db = distance(me, anchor.players[static_cast<std::size_t>(b)]);
    if (da != db) return da < db;
    return slot_ids[static_cast<std::size_t>(a)] < slot_ids[static_cast<std::size_t>(b)];
  });
  return slots;
}

void put_sample(std::ostream& out, const Sample& s) {
  io::put(out, s.possession_index);
  io::put(out, static_cast<std::int32_t>(s.anchor_index));
  io::put(out, static_cast<std::int32_t>(s.player_of_interest_id));
  for (int id : s.ordered_ids) io::put(out, static_cast<std::int32_t>(id));
  io::put(out, s.shot_clock_s);
  io::put(out, s.anchor_location.x);
  io::put(out, s.anchor_location.y);
  for (int k = 0; k < s.history_steps(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    io::put(out, s.history_self[uk].x);
    io::put(out, s.history_self[uk].y);
    for (const auto& other : s.history_others) {
      io::put(out, other[uk].x);
      io::put(out, other[uk].y);
    }
    io::put(out, s.history_ball[uk].x);
    io::put(out, s.history_ball[uk].y);
    io::put(out, s.shot_clock_history[uk]);
  }
  for (std::size_t h = 0; h < s.target.size(); ++h) {
    io::put(out, s.target_locations.locations[h].x);
    io::put(out, s.target_locations.locations[h].y);
    io::put(out, s.target.velocities[h].vx);
    io::put(out, s.target.velocities[h].vy);
  }
}

Sample get_sample(std::istream& in, const DatasetHeader& hdr) {
  Sample s;
  s.possession_index = io::get<std::uint32_t>(in);
  s.anchor_index = io::get<std::int32_t>(in);
  s.player_of_interest_id = io::get<std::int32_t>(in);
  for (int& id : s.ordered_ids) id = io::get<std::int32_t>(in);
  s.shot_clock_s = io::get<double>(in);
  s.anchor_location.x = io::get<double>(in);
  s.anchor_location.y = io::get<double>(in);
  const auto steps = static_cast<std::size_t>(hdr.L + 1);
  s.history_self.resize(steps);
  for (auto& o : s.history_others) o.resize(steps);
  s.history_ball.resize(steps);
  s.shot_clock_history.resize(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    s.history_self[k].x = io::get<double>(in);
    s.history_self[k].y = io::get<double>(in);
    for (auto& other : s.history_others) {
      other[k].x = io::get<double>(in);
      other[k].y = io::get<double>(in);
    }
    s.history_ball[k].x = io::get<double>(in);
    s.history_ball[k].y = io::get<double>(in);
    s.shot_clock_history[k] = io::get<double>(in);
  }
  const auto horizon = static_cast<std::size_t>(hdr.H);
  s.target.dt = hdr.dt;
  s.target_locations.dt = hdr.dt;
  s.target.velocities.resize(horizon);
  s.target_locations.locations.resize(horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    s.target_locations.locations[h].x = io::get<double>(in);
    s.target_locations.locations[h].y = io::get<double>(in);
    s.target.velocities[h].vx = io::get<double>(in);
    s.target.velocities[h].vy = io::get<double>(in);
  }
  return s;
}

}  // namespace

Velocity2D Sample::last_observed_velocity() const {
  if (history_self.size() < 2) throw std::invalid_argument("history shorter than 2 steps");
  const Location2D& a = history_self[history_self.size() - 2];
  const Location2D& b = history_self.back();
  return {(b.x - a.x) / target.dt, (b.y - a.y) / target.dt};
}

std::vector<Sample> build_samples(const Possession& p, const SampleConfig& cfg,
                                  std::uint32_t possession_index) {
  if (cfg.L < 1 || cfg.H < 1 || cfg.stride < 1) {
    throw std::invalid_argument("L, H and stride must be >= 1");
  }
  std::vector<Sample> out;
  const int n = static_cast<int>(p.frames.size());
  if (n < cfg.L + cfg.H + 1) return out;

  std::array<int, 10> slot_ids{};
  std::copy(p.offense_ids.begin(), p.offense_ids.end(), slot_ids.begin());
  std::copy(p.defense_ids.begin(), p.defense_ids.end(), slot_ids.begin() + 5);

  for (int t = cfg.L; t + cfg.H < n; t += cfg.stride) {
    const Frame& anchor = p.frames[static_cast<std::size_t>(t)];
    for (int self = 0; self < 5; ++self) {
      std::vector<int> order{self};
      for (int s : nearest_first(anchor, slot_ids, self, 0, 5)) order.push_back(s);
      for (int s : nearest_first(anchor, slot_ids, self, 5, 10)) order.push_back(s);

      Sample smp;
      smp.possession_index = possession_index;
      smp.anchor_index = t;
      smp.player_of_interest_id = slot_ids[static_cast<std::size_t>(self)];
      for (std::size_t k = 0; k < 10; ++k) {
        smp.ordered_ids[k] = slot_ids[static_cast<std::size_t>(order[k])];
      }
      for (int k = t - cfg.L; k <= t; ++k) {
        const Frame& f = p.frames[static_cast<std::size_t>(k)];
        smp.history_self.push_back(f.players[static_cast<std::size_t>(self)]);
        for (std::size_t j = 0; j < 9; ++j) {
          smp.history_others[j].push_back(f.players[static_cast<std::size_t>(order[j + 1])]);
        }
        smp.history_ball.push_back(f.ball);
        smp.shot_clock_history.push_back(f.shot_clock_s);
      }
      smp.shot_clock_s = anchor.shot_clock_s;
      smp.anchor_location = anchor.players[static_cast<std::size_t>(self)];
      smp.target_locations.dt = p.dt;
      for (int h = 1; h <= cfg.H; ++h) {
        smp.target_locations.locations.push_back(
            p.frames[static_cast<std::size_t>(t + h)].players[static_cast<std::size_t>(self)]);
      }
      smp.target = velocities_from_locations(smp.anchor_location, smp.target_locations);
      out.push_back(std::move(smp));
    }
  }
  return out;
}

IndexSplit split_indices(std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must be in (0, 1)");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio));
  IndexSplit split;
  split.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

DatasetSplit split_possessions(const std::vector<Possession>& possessions, double ratio,
                               std::uint64_t seed, const SampleConfig& cfg) {
  DatasetSplit out;
  out.seed = seed;
  const IndexSplit idx = split_indices(possessions.size(), ratio, seed);
  for (std::size_t i : idx.train) {
    auto s = build_samples(possessions[i], cfg, static_cast<std::uint32_t>(i));
    std::move(s.begin(), s.end(), std::back_inserter(out.train));
  }
  for (std::size_t i : idx.test) {
    auto s = build_samples(possessions[i], cfg, static_cast<std::uint32_t>(i));
    std::move(s.begin(), s.end(), std::back_inserter(out.test));
  }
  return out;
}

std::vector<Sample> filter_by_player(std::span<const Sample> samples, int player_id) {
  std::vector<Sample> out;
  std::copy_if(samples.begin(), samples.end(), std::back_inserter(out),
               [&](const Sample& s) { return s.player_of_interest_id == player_id; });
  return out;
}

std::vector<Sample> filter_by_possession_player(std::span<const Sample> samples,
                                                int player_id) {
  std::vector<Sample> out;
  std::copy_if(samples.begin(), samples.end(), std::back_inserter(out), [&](const Sample& s) {
    return std::find(s.ordered_ids.begin(), s.ordered_ids.end(), player_id) != s.ordered_ids.end();
  });
  return out;
}

std::vector<Eigen::MatrixXd> encode_features(std::span<const Sample> samples,
                                             std::span<const std::size_t> indices,
                                             const NormalizationSpec& norm) {
  if (indices.empty()) return {};
  const int steps = samples[indices.front()].history_steps();
  const auto cols = static_cast<Eigen::Index>(indices.size());
  std::vector<Eigen::MatrixXd> inputs(static_cast<std::size_t>(steps),
                                      Eigen::MatrixXd(FeatureLayout::kWidth, cols));
  for (Eigen::Index c = 0; c < cols; ++c) {
    const Sample& s = samples[indices[static_cast<std::size_t>(c)]];
    if (s.history_steps() != steps) throw std::invalid_argument("mixed history lengths in batch");
    for (int k = 0; k < steps; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      auto col = inputs[uk].col(c);
      Eigen::Index r = 0;
      auto put = [&](const Location2D& l) {
        col(r++) = normalize(l.x, FeatureKind::kLocationX, norm);
        col(r++) = normalize(l.y, FeatureKind::kLocationY, norm);
      };
      put(s.history_self[uk]);
      for (const auto& other : s.history_others) put(other[uk]);
      put(s.history_ball[uk]);
      col(r) = normalize(s.shot_clock_history[uk], FeatureKind::kShotClock, norm);
    }
  }
  return inputs;
}

Batch make_batch(std::span<const Sample> samples, std::span<const std::size_t> indices,
                 const NormalizationSpec& norm, OutputKind target_kind, BatchStats* stats) {
  Batch b;
  b.indices.assign(indices.begin(), indices.end());
  b.inputs = encode_features(samples, indices, norm);
  if (indices.empty()) return b;
  const int horizon = samples[indices.front()].horizon();
  b.targets.resize(2 * horizon, static_cast<Eigen::Index>(indices.size()));
  for (Eigen::Index c = 0; c < b.targets.cols(); ++c) {
    const Sample& s = samples[indices[static_cast<std::size_t>(c)]];
    if (s.horizon() != horizon) throw std::invalid_argument("mixed horizons in batch");
    for (int h = 0; h < horizon; ++h) {
      const auto uh = static_cast<std::size_t>(h);
      if (target_kind == OutputKind::kVelocity) {
        const Velocity2D& v = s.target.velocities[uh];
        for (double comp : {v.vx, v.vy}) {
          if (stats && std::abs(comp) > norm.v_max_fps) ++stats->clamped_velocities;
        }
        b.targets(2 * h, c) = normalize(v.vx, FeatureKind::kVelocity, norm);
        b.targets(2 * h + 1, c) = normalize(v.vy, FeatureKind::kVelocity, norm);
      } else {
        const Location2D& l = s.target_locations.locations[uh];
        b.targets(2 * h, c) = normalize(l.x, FeatureKind::kLocationX, norm);
        b.targets(2 * h + 1, c) = normalize(l.y, FeatureKind::kLocationY, norm);
      }
    }
  }
  return b;
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, int epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::vector<Batch> make_batches(std::span<const Sample> samples,
                                const NormalizationSpec& norm, const BatchOptions& options,
                                BatchStats* stats) {
  if (options.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  std::vector<std::size_t> order;
  if (options.shuffle) {
    order = epoch_order(samples.size(), options.seed, options.epoch);
  } else {
    order.resize(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  std::vector<Batch> out;
  const auto bs = static_cast<std::size_t>(options.batch_size);
  for (std::size_t begin = 0; begin < order.size(); begin += bs) {
    const std::size_t end = std::min(order.size(), begin + bs);
    out.push_back(make_batch(samples, std::span(order).subspan(begin, end - begin), norm,
                             options.target_kind, stats));
  }
  return out;
}

Dataset build_dataset(const std::vector<Possession>& possessions, const SampleConfig& cfg,
                      double ratio, std::uint64_t seed, const NormalizationSpec& norm) {
  norm.validate();
  Dataset ds;
  ds.header.L = cfg.L;
  ds.header.H = cfg.H;
  ds.header.stride = cfg.stride;
  ds.header.dt = possessions.empty() ? kDefaultDt : possessions.front().dt;
  ds.header.layout.sequence_length = cfg.L + 1;
  ds.header.norm = norm;
  ds.header.seed = seed;
  ds.header.split_ratio = ratio;
  for (std::size_t i = 0; i < possessions.size(); ++i) {
    const Possession& p = possessions[i];
    if (std::abs(p.dt - ds.header.dt) > 1e-9) {
      throw DataQualityError("possessions with different frame spacing in one dataset");
    }
    PossessionInfo info;
    info.id = p.game_id + "#" + std::to_string(i);
    info.label = p.label;
    std::copy(p.offense_ids.begin(), p.offense_ids.end(), info.player_ids.begin());
    std::copy(p.defense_ids.begin(), p.defense_ids.end(), info.player_ids.begin() + 5);
    ds.possessions.push_back(std::move(info));
  }
  ds.split = split_possessions(possessions, ratio, seed, cfg);
  return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset " + path.string());
  const DatasetHeader& h = ds.header;
  out.write(kDatasetMagic, sizeof kDatasetMagic);
  io::put(out, kDatasetVersion);
  io::put(out, static_cast<std::int32_t>(h.L));
  io::put(out, static_cast<std::int32_t>(h.H));
  io::put(out, static_cast<std::int32_t>(h.stride));
  io::put(out, h.dt);
  io::put(out, static_cast<std::int32_t>(h.layout.version));
  io::put(out, static_cast<std::int32_t>(h.layout.width));
  io::put(out, static_cast<std::int32_t>(h.layout.sequence_length));
  io::put(out, h.norm.court.length_ft);
  io::put(out, h.norm.court.width_ft);
  io::put(out, h.norm.court.halfcourt_x_ft);
  io::put(out, h.norm.v_max_fps);
  io::put(out, h.norm.shot_clock_max_s);
  io::put(out, h.seed);
  io::put(out, h.split_ratio);
  io::put(out, static_cast<std::uint64_t>(ds.possessions.size()));
  for (const auto& p : ds.possessions) {
    io::put_string(out, p.id);
    io::put_string(out, p.label);
    for (int id : p.player_ids) io::put(out, static_cast<std::int32_t>(id));
  }
  io::put(out, ds.split.seed);
  for (const auto* side : {&ds.split.train, &ds.split.test}) {
    io::put(out, static_cast<std::uint64_t>(side->size()));
    for (const auto& s : *side) put_sample(out, s);
  }
  if (!out) throw IoError("failed writing dataset " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read dataset " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kDatasetMagic, sizeof magic) != 0) {
    throw DataQualityError("not a dataset file: " + path.string());
  }
  const auto version = io::get<std::uint32_t>(in);
  if (version != kDatasetVersion) {
    throw DataQualityError("unsupported dataset version " + std::to_string(version));
  }
  Dataset ds;
  DatasetHeader& h = ds.header;
  h.L = io::get<std::int32_t>(in);
  h.H = io::get<std::int32_t>(in);
  h.stride = io::get<std::int32_t>(in);
  h.dt = io::get<double>(in);
  h.layout.version = io::get<std::int32_t>(in);
  h.layout.width = io::get<std::int32_t>(in);
  h.layout.sequence_length = io::get<std::int32_t>(in);
  if (h.layout.version != FeatureLayout::kVersion || h.layout.width != FeatureLayout::kWidth) {
    throw DataQualityError("dataset feature layout does not match this build");
  }
  h.norm.court.length_ft = io::get<double>(in);
  h.norm.court.width_ft = io::get<double>(in);
  h.norm.court.halfcourt_x_ft = io::get<double>(in);
  h.norm.v_max_fps = io::get<double>(in);
  h.norm.shot_clock_max_s = io::get<double>(in);
  h.seed = io::get<std::uint64_t>(in);
  h.split_ratio = io::get<double>(in);
  const auto n_poss = io::get<std::uint64_t>(in);
  ds.possessions.resize(n_poss);
  for (auto& p : ds.possessions) {
    p.id = io::get_string(in);
    p.label = io::get_string(in);
    for (int& id : p.player_ids) id = io::get<std::int32_t>(in);
  }
  ds.split.seed = io::get<std::uint64_t>(in);
  for (auto* side : {&ds.split.train, &ds.split.test}) {
    const auto n = io::get<std::uint64_t>(in);
    side->reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) side->push_back(get_sample(in, h));
  }
  return ds;
}

}  // namespace mbt
