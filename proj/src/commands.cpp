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

#include "mbt/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <set>

#include "mbt/archive.hpp"
#include "mbt/ingest.hpp"
#include "mbt/plot.hpp"

namespace mbt {
namespace fs = std::filesystem;
namespace {

using json = nlohmann::json;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CommandError("io", "cannot write " + path.string());
  out << text;
  if (!out) throw CommandError("io", "failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandError("io", "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw CommandError("data", path.string() + ": " + e.what());
  }
}

json provenance(const char* command, json options) {
  return {{"tool", "mbt"}, {"version", kToolVersion}, {"command", command}, {"options", std::move(options)}};
}

void say(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

void require_exists(const fs::path& p, const char* what) {
  if (p.empty()) throw CommandError("config", fmt::format("{} path is required", what));
  if (!fs::exists(p)) throw CommandError("missing", fmt::format("{} not found: {}", what, p.string()));
}

std::string model_id_for(const ModelConfig& m, const TrainConfig& t) {
  return fmt::format("MBT{}{}", m.M, to_string(t.loss.distance));
}

json to_json(const ModelConfig& m, const TrainConfig& t) {
  return {{"model", mbt::to_json(m)}, {"train", mbt::to_json(t)}};
}

const std::vector<Sample>& pick_split(const Dataset& ds, const std::string& split) {
  if (split == "test") return ds.split.test;
  if (split == "train") return ds.split.train;
  throw CommandError("config", "split must be 'train' or 'test', got '" + split + "'");
}

std::vector<Sample> select_samples(const Dataset& ds, const std::string& split, int player_id) {
  const auto& all = pick_split(ds, split);
  if (player_id == 0) return all;
  return filter_by_player(all, player_id);
}

Dataset load_dataset(const fs::path& p) {
  require_exists(p, "dataset");
  return read_dataset(p);
}

Checkpoint load_checked(const fs::path& p, const Dataset& ds) {
  require_exists(p, "checkpoint");
  Checkpoint c = load_checkpoint(p);
  if (c.config.L != ds.header.L || c.config.H != ds.header.H) {
    throw CommandError("mismatch", fmt::format("checkpoint {} has L={} H={} but the dataset has L={} H={}",
                                               p.string(), c.config.L, c.config.H, ds.header.L, ds.header.H));
  }
  return c;
}

std::string checkpoint_model_id(const Checkpoint& c, const fs::path& p) {
  if (c.provenance.contains("model_id")) return c.provenance.at("model_id").get<std::string>();
  return p.stem().string();
}

// Runs the training loop and writes checkpoint, report and epoch log.
TrainResult train_and_save(const char* command, const std::vector<Sample>& samples,
                           const ModelConfig& model, const TrainConfig& train_cfg,
                           const NormalizationSpec& norm, const fs::path& out_dir, json prov,
                           const Parameters* base, const ModelConfig* base_cfg, std::ostream* log) {
  fs::create_directories(out_dir);
  std::string epoch_log;
  auto on_epoch = [&](const EpochRecord& r) {
    epoch_log += fmt::format("epoch={} epsilon={} train_loss={:.9g} validation_min_ade_ft={:.9g} improved={}\n",
                             r.epoch, r.epsilon, r.train_loss, r.validation_min_ade_ft, r.improved ? 1 : 0);
    say(log, fmt::format("[{}] epoch {} eps {:.3f} loss {:.5f} val min-ADE {:.4f} ft{} ({:.1f} s)", command,
                         r.epoch, r.epsilon, r.train_loss, r.validation_min_ade_ft, r.improved ? " *" : "",
                         r.wall_seconds));
  };
  TrainResult result;
  try {
    result = base ? finetune(*base, *base_cfg, samples, model, train_cfg, norm, on_epoch)
                  : train(samples, model, train_cfg, norm, on_epoch);
  } catch (const TrainingDiverged& e) {
    write_json(out_dir / "diverged_state.json", {{"provenance", prov}, {"error", e.what()}, {"state", e.state()}});
    write_text(out_dir / fmt::format("{}.log", command), epoch_log);
    throw CommandError("diverged", fmt::format("{}; state written to {}", e.what(),
                                               (out_dir / "diverged_state.json").string()));
  }
  result.report.best_checkpoint = "model.ckpt";

  Checkpoint ckpt;
  ckpt.config = model;
  ckpt.layout.sequence_length = model.sequence_length();
  ckpt.norm = norm;
  ckpt.params = result.params;
  ckpt.provenance = prov;
  ckpt.provenance["best_epoch"] = result.report.best_epoch;
  save_checkpoint(out_dir / "model.ckpt", ckpt);
  write_json(out_dir / fmt::format("{}_report.json", command),
             {{"provenance", prov}, {"report", to_json(result.report)}});
  write_text(out_dir / fmt::format("{}.log", command), epoch_log);
  return result;
}

}  // namespace

std::string error_code(const std::exception& e) {
  if (const auto* c = dynamic_cast<const CommandError*>(&e)) return c->code();
  if (dynamic_cast<const TrainingDiverged*>(&e)) return "diverged";
  if (dynamic_cast<const DataQualityError*>(&e)) return "data";
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return "data";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "config";
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return "io";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  return "internal";
}

json to_json(const SyntheticSpec& s) {
  return {{"scenario", to_string(s.scenario)},
          {"n_possessions", s.n_possessions},
          {"fork_probabilities", s.fork_probabilities},
          {"speed_fps", s.speed_fps},
          {"noise_std_ft", s.noise_std_ft},
          {"seed", s.seed},
          {"frames", s.frames},
          {"fork_frame", s.fork_frame},
          {"turn_deg", s.turn_deg},
          {"turn_accel_fps2", s.turn_accel_fps2},
          {"accel_cap_fps2", s.accel_cap_fps2},
          {"dt", s.dt}};
}

IngestSummary cmd_ingest(const IngestOptions& o, std::ostream* log) {
  require_exists(o.raw_dir, "raw directory");
  if (!fs::is_directory(o.raw_dir)) throw CommandError("config", o.raw_dir.string() + " is not a directory");
  if (o.downsample < 1) throw CommandError("config", "downsample must be >= 1");

  SegmentConfig cfg;
  cfg.min_duration_s = o.min_duration_s;
  for (const auto& spec : o.direction_overrides) {
    int period = 0, team = 0;
    char basket[16] = {};
    if (std::sscanf(spec.c_str(), "%d:%d=%15s", &period, &team, basket) != 3) {
      throw CommandError("config", "direction override must look like period:team=low_x|high_x, got '" + spec + "'");
    }
    cfg.direction_override[{period, team}] = basket_from_string(basket);
  }

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(o.raw_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  fs::create_directories(o.out_dir);

  const json prov = provenance("ingest", {{"raw_dir", o.raw_dir.generic_string()},
                                          {"out_dir", o.out_dir.generic_string()},
                                          {"min_duration_s", o.min_duration_s},
                                          {"downsample", o.downsample},
                                          {"canonicalize", o.canonicalize},
                                          {"direction_overrides", o.direction_overrides}});
  IngestSummary summary;
  json games = json::array();
  ParseStats total_parse;
  SegmentStats total_seg;
  for (const auto& f : files) {
    ParsedGame g;
    try {
      g = parse_tracking_file(f);
    } catch (const DataQualityError&) {
      throw;
    } catch (const std::exception& e) {
      throw CommandError("io", f.string() + ": " + e.what());
    }
    const std::string game_id = g.game_id.empty() ? f.stem().string() : g.game_id;
    SegmentStats seg;
    std::vector<Possession> raw = segment_possessions(g.frames, cfg, game_id, &seg);
    PossessionArchive archive;
    archive.game_id = game_id;
    for (auto& p : raw) {
      Possession q = downsample(p, o.downsample);
      if (o.canonicalize) q = canonicalize_halfcourt(std::move(q), cfg.court);
      archive.possessions.push_back(std::move(q));
    }
    write_archive(o.out_dir / (game_id + kArchiveExtension), archive);

    json directions = json::array();
    for (const auto& d : seg.directions) {
      directions.push_back({{"period", d.period}, {"team_id", d.team_id}, {"attacks", to_string(d.attacks)},
                            {"source", d.source}});
    }
    games.push_back({{"game_id", game_id},
                     {"file", f.filename().generic_string()},
                     {"moments_seen", g.stats.moments_seen},
                     {"malformed", g.stats.malformed},
                     {"wrong_player_count", g.stats.wrong_player_count},
                     {"duplicates", g.stats.duplicates},
                     {"frames_kept", g.stats.kept},
                     {"candidates", seg.candidates},
                     {"too_short", seg.too_short},
                     {"possessions", archive.possessions.size()},
                     {"shot_clock_imputed", seg.shot_clock_imputed},
                     {"directions", directions}});
    total_parse.moments_seen += g.stats.moments_seen;
    total_parse.malformed += g.stats.malformed;
    total_parse.wrong_player_count += g.stats.wrong_player_count;
    total_parse.duplicates += g.stats.duplicates;
    total_parse.kept += g.stats.kept;
    total_seg.candidates += seg.candidates;
    total_seg.too_short += seg.too_short;
    total_seg.shot_clock_imputed += seg.shot_clock_imputed;
    summary.possessions += archive.possessions.size();
    ++summary.games;
    say(log, fmt::format("[ingest] {}: {} possessions", game_id, archive.possessions.size()));
  }
  summary.stats = {{"provenance", prov},
                   {"games", games},
                   {"totals",
                    {{"games", summary.games},
                     {"possessions", summary.possessions},
                     {"moments_seen", total_parse.moments_seen},
                     {"malformed", total_parse.malformed},
                     {"wrong_player_count", total_parse.wrong_player_count},
                     {"duplicates", total_parse.duplicates},
                     {"frames_kept", total_parse.kept},
                     {"candidates", total_seg.candidates},
                     {"too_short", total_seg.too_short},
                     {"shot_clock_imputed", total_seg.shot_clock_imputed}}}};
  write_json(o.out_dir / "ingest_stats.json", summary.stats);
  return summary;
}

fs::path cmd_synth(const SynthOptions& o, std::ostream* log) {
  o.spec.validate();
  const PossessionArchive a = synthesize(o.spec);
  fs::create_directories(o.out_dir);
  const fs::path path = o.out_dir / (a.game_id + kArchiveExtension);
  write_archive(path, a);
  std::map<std::string, std::size_t> labels;
  for (const auto& p : a.possessions) ++labels[p.label];
  write_json(o.out_dir / "synth.json",
             {{"provenance", provenance("synth", {{"spec", to_json(o.spec)}, {"out_dir", o.out_dir.generic_string()}})},
              {"archive", path.filename().generic_string()},
              {"possessions", a.possessions.size()},
              {"label_counts", labels}});
  say(log, fmt::format("[synth] {} possessions -> {}", a.possessions.size(), path.string()));
  return path;
}

Dataset cmd_build_dataset(const BuildDatasetOptions& o, std::ostream* log) {
  require_exists(o.archives, "archives");
  if (o.out.empty()) throw CommandError("config", "output path is required");
  std::vector<fs::path> files =
      fs::is_directory(o.archives) ? list_archives(o.archives) : std::vector<fs::path>{o.archives};
  std::vector<Possession> possessions;
  for (const auto& f : files) {
    PossessionArchive a = read_archive(f);
    for (auto& p : a.possessions) possessions.push_back(std::move(p));
  }
  if (possessions.empty()) throw CommandError("data", "no possessions found under " + o.archives.string());

  Dataset ds = build_dataset(possessions, SampleConfig{o.L, o.H, o.stride}, o.split_ratio, o.seed);
  if (o.player_id != 0) {
    ds.split.train = filter_by_player(ds.split.train, o.player_id);
    ds.split.test = filter_by_player(ds.split.test, o.player_id);
  }
  if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
  write_dataset(o.out, ds);
  std::set<std::uint32_t> train_poss, test_poss;
  for (const auto& s : ds.split.train) train_poss.insert(s.possession_index);
  for (const auto& s : ds.split.test) test_poss.insert(s.possession_index);
  write_json(fs::path(o.out.string() + ".json"),
             {{"provenance", provenance("build-dataset", {{"archives", o.archives.generic_string()},
                                                          {"out", o.out.generic_string()},
                                                          {"L", o.L},
                                                          {"H", o.H},
                                                          {"stride", o.stride},
                                                          {"split_ratio", o.split_ratio},
                                                          {"seed", o.seed},
                                                          {"player_id", o.player_id}})},
              {"archives", files.size()},
              {"possessions", possessions.size()},
              {"train_possessions", train_poss.size()},
              {"test_possessions", test_poss.size()},
              {"train_samples", ds.split.train.size()},
              {"test_samples", ds.split.test.size()},
              {"dataset_hash", file_hash(o.out)}});
  say(log, fmt::format("[build-dataset] {} possessions, {} train / {} test samples", possessions.size(),
                       ds.split.train.size(), ds.split.test.size()));
  return ds;
}

TrainResult cmd_train(const TrainOptions& o, std::ostream* log) {
  const Dataset ds = load_dataset(o.dataset);
  ModelConfig model = o.model;
  model.L = ds.header.L;
  model.H = ds.header.H;
  TrainConfig cfg = o.train;
  cfg.loss.M = model.M;
  if (model.M == 1 && cfg.loss.epsilon0 > 0.0) {
    say(log, "[train] M = 1: epsilon forced to 0");
    cfg.loss.epsilon0 = 0.0;
    cfg.loss.epsilon_decrement = 0.0;
  }
  const std::vector<Sample> samples = select_samples(ds, "train", o.player_id);
  if (samples.empty()) throw CommandError("data", "no training samples");
  json prov = provenance("train", {{"dataset", o.dataset.generic_string()},
                                   {"out_dir", o.out_dir.generic_string()},
                                   {"player_id", o.player_id},
                                   {"config", to_json(model, cfg)}});
  prov["model_id"] = model_id_for(model, cfg);
  prov["dataset_hash"] = file_hash(o.dataset);
  return train_and_save("train", samples, model, cfg, ds.header.norm, o.out_dir, prov, nullptr, nullptr, log);
}

TrainResult cmd_finetune(const FinetuneOptions& o, std::ostream* log) {
  require_exists(o.base_checkpoint, "base checkpoint");
  const Dataset ds = load_dataset(o.dataset);
  const Checkpoint base = load_checked(o.base_checkpoint, ds);
  if (o.player_id == 0) throw CommandError("config", "fine-tuning needs a player id");
  TrainConfig cfg = o.train;
  cfg.loss.M = base.config.M;
  if (base.config.M == 1) cfg.loss.epsilon0 = cfg.loss.epsilon_decrement = 0.0;
  const std::vector<Sample> samples = o.subset == FinetuneSubset::kPlayerOfInterest
                                          ? filter_by_player(ds.split.train, o.player_id)
                                          : filter_by_possession_player(ds.split.train, o.player_id);
  if (samples.empty()) {
    throw CommandError("data", fmt::format("no training samples for player {}", o.player_id));
  }
  json prov = provenance("finetune", {{"base_checkpoint", o.base_checkpoint.generic_string()},
                                      {"dataset", o.dataset.generic_string()},
                                      {"out_dir", o.out_dir.generic_string()},
                                      {"player_id", o.player_id},
                                      {"subset", to_string(o.subset)},
                                      {"config", to_json(base.config, cfg)}});
  prov["model_id"] = fmt::format("{}+p{}", checkpoint_model_id(base, o.base_checkpoint), o.player_id);
  prov["base_checkpoint_hash"] = file_hash(o.base_checkpoint);
  prov["dataset_hash"] = file_hash(o.dataset);
  return train_and_save("finetune", samples, base.config, cfg, base.norm, o.out_dir, prov, &base.params,
                        &base.config, log);
}

EvaluateSummary cmd_evaluate(const EvaluateOptions& o, std::ostream* log) {
  const Dataset ds = load_dataset(o.dataset);
  const std::vector<Sample> samples = select_samples(ds, o.split, o.player_id);
  if (samples.empty()) throw CommandError("data", "no samples to evaluate");

  std::vector<std::unique_ptr<Predictor>> predictors;
  for (const auto& b : o.baselines) {
    if (b == "CL") {
      predictors.push_back(std::make_unique<ConstantLocationPredictor>());
    } else if (b == "CV") {
      predictors.push_back(std::make_unique<ConstantVelocityPredictor>());
    } else {
      throw CommandError("config", "unknown baseline '" + b + "' (expected CL or CV)");
    }
  }
  std::vector<std::string> checkpoint_hashes;
  for (const auto& p : o.checkpoints) {
    Checkpoint c = load_checked(p, ds);
    predictors.push_back(
        std::make_unique<NetworkPredictor>(c.params, c.config, c.norm, checkpoint_model_id(c, p)));
    checkpoint_hashes.push_back(file_hash(p));
  }
  if (predictors.empty()) throw CommandError("config", "nothing to evaluate");

  std::vector<std::string> ckpt_names;
  for (const auto& p : o.checkpoints) ckpt_names.push_back(p.generic_string());
  const json prov = provenance("evaluate", {{"dataset", o.dataset.generic_string()},
                                            {"checkpoints", ckpt_names},
                                            {"checkpoint_hashes", checkpoint_hashes},
                                            {"baselines", o.baselines},
                                            {"split", o.split},
                                            {"mse_mode", to_string(o.mse_mode)},
                                            {"realism_modes", to_string(o.realism_modes)},
                                            {"player_id", o.player_id},
                                            {"out_dir", o.out_dir.generic_string()}});

  EvaluateSummary summary;
  summary.realism.ground_truth = summarize_accelerations("ground_truth", truth_accelerations(samples));
  const EvaluationOptions opts{o.mse_mode, o.realism_modes};
  json models = json::array();
  std::vector<MetricsReport> reports;
  for (const auto& pred : predictors) {
    Evaluation ev = evaluate(*pred, samples, opts);
    json m = {{"metrics", to_json(ev.metrics)}, {"accelerations", to_json(ev.accelerations)}};
    if (ev.metrics.M >= 2) m["calibration"] = to_json(ev.calibration);
    models.push_back(std::move(m));
    reports.push_back(ev.metrics);
    summary.realism.models.push_back(ev.accelerations);
    say(log, fmt::format("[evaluate] {}: ADE {:.3f} FDE {:.3f} MSE {:.3f}", ev.metrics.model_id, ev.metrics.ade_ft,
                         ev.metrics.fde_ft, ev.metrics.mse_ft2s2));
    summary.evaluations.push_back(std::move(ev));
  }
  fs::create_directories(o.out_dir);
  write_json(o.out_dir / "metrics.json", {{"provenance", prov},
                                          {"split", o.split},
                                          {"sample_count", samples.size()},
                                          {"models", models},
                                          {"realism", to_json(summary.realism)}});
  std::string text = format_metrics_table(reports) + "\n" + format_realism_table(summary.realism);
  for (const auto& ev : summary.evaluations) {
    if (ev.metrics.M >= 2) {
      text += fmt::format("\ncalibration {}\n{}", ev.metrics.model_id, format_calibration_table(ev.calibration));
    }
  }
  write_text(o.out_dir / "metrics.txt", text);
  return summary;
}

PredictionFile cmd_predict(const PredictOptions& o, std::ostream* log) {
  const Dataset ds = load_dataset(o.dataset);
  std::vector<Sample> samples = select_samples(ds, o.split, o.player_id);
  if (o.limit > 0 && samples.size() > o.limit) samples.resize(o.limit);
  if (samples.empty()) throw CommandError("data", "no samples to predict");
  if (o.out.empty()) throw CommandError("config", "output path is required");

  std::unique_ptr<Predictor> predictor;
  std::string checkpoint_hash;
  if (!o.checkpoint.empty()) {
    const Checkpoint c = load_checked(o.checkpoint, ds);
    predictor = std::make_unique<NetworkPredictor>(c.params, c.config, c.norm, checkpoint_model_id(c, o.checkpoint));
    checkpoint_hash = file_hash(o.checkpoint);
  } else if (o.baseline == "CL") {
    predictor = std::make_unique<ConstantLocationPredictor>();
  } else if (o.baseline == "CV") {
    predictor = std::make_unique<ConstantVelocityPredictor>();
  } else {
    throw CommandError("config", "predict needs a checkpoint or a CL/CV baseline");
  }

  const auto preds = predictor->predict(samples);
  PredictionFile f;
  f.model_id = predictor->id();
  f.H = ds.header.H;
  f.M = predictor->modes();
  f.dt = ds.header.dt;
  f.provenance = provenance("predict", {{"dataset", o.dataset.generic_string()},
                                        {"checkpoint", o.checkpoint.generic_string()},
                                        {"checkpoint_hash", checkpoint_hash},
                                        {"baseline", o.baseline},
                                        {"split", o.split},
                                        {"limit", o.limit},
                                        {"player_id", o.player_id},
                                        {"out", o.out.generic_string()}});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& info = ds.possessions.at(samples[i].possession_index);
    f.records.push_back(make_prediction_record(i, samples[i], preds[i], info.id));
  }
  if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
  write_prediction_file(o.out, f);
  say(log, fmt::format("[predict] {} samples -> {}", f.records.size(), o.out.string()));
  return f;
}

void cmd_plot(const PlotOptions& o, std::ostream* log) {
  if (o.out.empty()) throw CommandError("config", "output path is required");
  if (!o.metrics.empty()) {
    const json j = read_json(o.metrics);
    for (const auto& m : j.at("models")) {
      const std::string id = m.at("metrics").at("model_id").get<std::string>();
      if (!m.contains("calibration") || (!o.model_id.empty() && id != o.model_id)) continue;
      write_text(o.out, calibration_svg(calibration_from_json(m.at("calibration")), "calibration " + id));
      say(log, fmt::format("[plot] calibration of {} -> {}", id, o.out.string()));
      return;
    }
    throw CommandError("missing", "no calibration table" +
                                      (o.model_id.empty() ? std::string() : " for model '" + o.model_id + "'") +
                                      " in " + o.metrics.string());
  }
  require_exists(o.predictions, "prediction file");
  const PredictionFile f = read_prediction_file(o.predictions);
  const auto it = std::find_if(f.records.begin(), f.records.end(),
                               [&](const PredictionRecord& r) { return r.sample_id == o.sample_id; });
  if (it == f.records.end()) {
    throw CommandError("missing", fmt::format("sample {} not in {}", o.sample_id, o.predictions.string()));
  }
  write_text(o.out, possession_svg(*it));
  say(log, fmt::format("[plot] sample {} -> {}", o.sample_id, o.out.string()));
}

}  // namespace mbt
