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

// mbt command line. Options may also come from an INI file passed with
// --config, one [section] per command, e.g.
//
//   [train]
//   dataset = data/fork.mbtd
//   M = 4

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include "mbt/commands.hpp"

namespace {

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

struct TrainFlags {
  std::string output_kind = "velocity";
  std::string schedule = "linear";
  std::string distance = "l";
};

void add_train_flags(CLI::App* sub, mbt::TrainConfig& t, TrainFlags& f) {
  sub->add_option("--batch-size", t.batch_size, "Samples per Adam step")->capture_default_str();
  sub->add_option("--learning-rate", t.learning_rate, "Adam step size")->capture_default_str();
  sub->add_option("--l2", t.l2_weight, "Weight of the squared-weight penalty")->capture_default_str();
  sub->add_option("--epochs", t.max_epochs, "Maximum number of epochs")->capture_default_str();
  sub->add_option("--patience", t.patience, "Epochs without improvement before stopping")->capture_default_str();
  sub->add_option("--validation-fraction", t.validation_fraction, "Share of possessions held out")
      ->capture_default_str();
  sub->add_option("--alpha", t.loss.alpha, "Weight of the trajectory term")->capture_default_str();
  sub->add_option("--epsilon0", t.loss.epsilon0, "Initial epsilon")->capture_default_str();
  sub->add_option("--epsilon-decrement", t.loss.epsilon_decrement, "Epsilon reduction per epoch")
      ->capture_default_str();
  sub->add_option("--schedule", f.schedule, "Epsilon schedule")
      ->check(CLI::IsMember({"linear", "multiplicative"}))
      ->capture_default_str();
  sub->add_option("--distance", f.distance, "Winner selection distance")
      ->check(CLI::IsMember({"MSE", "l", "v"}))
      ->capture_default_str();
}

void apply_train_flags(mbt::TrainConfig& t, const TrainFlags& f) {
  t.loss.schedule = mbt::epsilon_schedule_from_string(f.schedule);
  t.loss.distance = mbt::distance_kind_from_string(f.distance);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mbt: multi-modal player trajectory prediction"};
  app.set_config("--config", "", "INI file with one [section] per command");
  app.require_subcommand(1);
  app.set_version_flag("--version", mbt::kToolVersion);

  std::function<void()> run;
  std::ostream* log = &std::cerr;

  // ingest
  mbt::IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Extract half-court possessions from raw tracking logs");
  c_ingest->add_option("--raw", ingest.raw_dir, "Directory of raw game JSON files")->required();
  c_ingest->add_option("--out", ingest.out_dir, "Output directory for archives")->required();
  c_ingest->add_option("--min-duration", ingest.min_duration_s, "Shortest kept possession, seconds")
      ->capture_default_str();
  c_ingest->add_option("--downsample", ingest.downsample, "Keep every n-th frame")->capture_default_str();
  c_ingest->add_flag("!--no-canonicalize", ingest.canonicalize, "Keep original court orientation");
  c_ingest->add_option("--direction", ingest.direction_overrides,
                       "Attack direction override, period:team=low_x|high_x");
  c_ingest->callback([&] { run = [&] { mbt::cmd_ingest(ingest, log); }; });

  // synth
  mbt::SynthOptions synth;
  std::string scenario = "fork";
  auto* c_synth = app.add_subcommand("synth", "Generate synthetic possessions");
  c_synth->add_option("--out", synth.out_dir, "Output directory")->required();
  c_synth->add_option("--scenario", scenario, "Generator")
      ->check(CLI::IsMember({"fork", "constant_velocity"}))
      ->capture_default_str();
  c_synth->add_option("--n", synth.spec.n_possessions, "Number of possessions")->capture_default_str();
  c_synth->add_option("--probs", synth.spec.fork_probabilities, "Branch probabilities")->expected(1, -1);
  c_synth->add_option("--speed", synth.spec.speed_fps, "Running speed, ft/s")->capture_default_str();
  c_synth->add_option("--noise", synth.spec.noise_std_ft, "Location noise std, ft")->capture_default_str();
  c_synth->add_option("--seed", synth.spec.seed, "Random seed")->capture_default_str();
  c_synth->add_option("--frames", synth.spec.frames, "Frames per possession")->capture_default_str();
  c_synth->add_option("--fork-frame", synth.spec.fork_frame, "First frame off the stem")->capture_default_str();
  c_synth->add_option("--turn-deg", synth.spec.turn_deg, "Outer branch heading, degrees")->capture_default_str();
  c_synth->add_option("--turn-accel", synth.spec.turn_accel_fps2, "Turn acceleration, ft/s^2")
      ->capture_default_str();
  c_synth->add_option("--accel-cap", synth.spec.accel_cap_fps2, "Largest acceleration allowed, ft/s^2")
      ->capture_default_str();
  c_synth->callback([&] {
    synth.spec.scenario = mbt::synthetic_scenario_from_string(scenario);
    run = [&] { mbt::cmd_synth(synth, log); };
  });

  // build-dataset
  mbt::BuildDatasetOptions build;
  auto* c_build = app.add_subcommand("build-dataset", "Build samples and a possession-level split");
  c_build->add_option("--archives", build.archives, "Archive directory or file")->required();
  c_build->add_option("--out", build.out, "Output dataset file")->required();
  c_build->add_option("--L", build.L, "History steps before the anchor")->capture_default_str();
  c_build->add_option("--H", build.H, "Predicted steps")->capture_default_str();
  c_build->add_option("--stride", build.stride, "Anchor stride")->capture_default_str();
  c_build->add_option("--split-ratio", build.split_ratio, "Training share of possessions")->capture_default_str();
  c_build->add_option("--seed", build.seed, "Split seed")->capture_default_str();
  c_build->add_option("--player", build.player_id, "Keep one player of interest (0 keeps all)");
  c_build->callback([&] { run = [&] { mbt::cmd_build_dataset(build, log); }; });

  // train
  mbt::TrainOptions train;
  train.train = mbt::TrainConfig::base(train.model.M);
  TrainFlags train_flags;
  std::uint64_t train_seed = 0;
  auto* c_train = app.add_subcommand("train", "Train a model on all players");
  c_train->add_option("--dataset", train.dataset, "Dataset file")->required();
  c_train->add_option("--out", train.out_dir, "Output directory")->required();
  c_train->add_option("--seed", train_seed, "Seed for initialization and shuffling")->capture_default_str();
  c_train->add_option("--M", train.model.M, "Number of modes")->capture_default_str();
  c_train->add_option("--width", train.model.recurrent_width, "Recurrent units per layer")->capture_default_str();
  c_train->add_option("--layers", train.model.recurrent_layers, "Recurrent layers")->capture_default_str();
  c_train->add_option("--output-kind", train_flags.output_kind, "Network output")
      ->check(CLI::IsMember({"velocity", "location"}))
      ->capture_default_str();
  c_train->add_option("--player", train.player_id, "Train on one player of interest (0 keeps all)");
  add_train_flags(c_train, train.train, train_flags);
  c_train->callback([&] {
    train.model.seed = train.train.seed = train_seed;
    train.model.output_kind = mbt::output_kind_from_string(train_flags.output_kind);
    apply_train_flags(train.train, train_flags);
    run = [&] { mbt::cmd_train(train, log); };
  });

  // finetune
  mbt::FinetuneOptions fine;
  TrainFlags fine_flags;
  std::string subset = "player_of_interest";
  auto* c_fine = app.add_subcommand("finetune", "Fine-tune a base model on one player");
  c_fine->add_option("--base", fine.base_checkpoint, "Base checkpoint")->required();
  c_fine->add_option("--dataset", fine.dataset, "Dataset file")->required();
  c_fine->add_option("--out", fine.out_dir, "Output directory")->required();
  c_fine->add_option("--player", fine.player_id, "Player id")->required();
  c_fine->add_option("--subset", subset, "Which samples count as the player's")
      ->check(CLI::IsMember({"player_of_interest", "possession"}))
      ->capture_default_str();
  c_fine->add_option("--seed", fine.train.seed, "Shuffling seed")->capture_default_str();
  add_train_flags(c_fine, fine.train, fine_flags);
  c_fine->callback([&] {
    fine.subset = mbt::finetune_subset_from_string(subset);
    apply_train_flags(fine.train, fine_flags);
    run = [&] { mbt::cmd_finetune(fine, log); };
  });

  // evaluate
  mbt::EvaluateOptions eval;
  std::string mse_mode = "chosen";
  std::string realism = "all";
  auto* c_eval = app.add_subcommand("evaluate", "Score checkpoints and baselines");
  c_eval->add_option("--dataset", eval.dataset, "Dataset file")->required();
  c_eval->add_option("--checkpoint", eval.checkpoints, "Checkpoint(s) to score");
  c_eval->add_option("--baselines", eval.baselines, "Baselines to score (CL, CV)")->capture_default_str();
  c_eval->add_flag("--no-baselines", [&](std::int64_t) { eval.baselines.clear(); }, "Skip the baselines");
  c_eval->add_option("--split", eval.split, "train or test")->capture_default_str();
  c_eval->add_option("--mse-mode", mse_mode, "Mode the MSE is taken from")
      ->check(CLI::IsMember({"chosen", "most_probable"}))
      ->capture_default_str();
  c_eval->add_option("--realism-modes", realism, "Modes used for acceleration statistics")
      ->check(CLI::IsMember({"all", "chosen", "most_probable"}))
      ->capture_default_str();
  c_eval->add_option("--player", eval.player_id, "Evaluate one player of interest (0 keeps all)");
  c_eval->add_option("--out", eval.out_dir, "Output directory")->required();
  c_eval->callback([&] {
    eval.mse_mode = mbt::mse_mode_from_string(mse_mode);
    eval.realism_modes = mbt::realism_modes_from_string(realism);
    run = [&] { mbt::cmd_evaluate(eval, log); };
  });

  // predict
  mbt::PredictOptions pred;
  auto* c_pred = app.add_subcommand("predict", "Write per-sample predicted trajectories");
  c_pred->add_option("--dataset", pred.dataset, "Dataset file")->required();
  c_pred->add_option("--checkpoint", pred.checkpoint, "Checkpoint");
  c_pred->add_option("--baseline", pred.baseline, "CL or CV instead of a checkpoint");
  c_pred->add_option("--split", pred.split, "train or test")->capture_default_str();
  c_pred->add_option("--limit", pred.limit, "Keep the first n samples (0 keeps all)")->capture_default_str();
  c_pred->add_option("--player", pred.player_id, "Predict one player of interest (0 keeps all)");
  c_pred->add_option("--out", pred.out, "Output prediction file")->required();
  c_pred->callback([&] { run = [&] { mbt::cmd_predict(pred, log); }; });

  // plot
  mbt::PlotOptions plot;
  auto* c_plot = app.add_subcommand("plot", "Draw a predicted sample or a calibration diagram as SVG");
  c_plot->add_option("--predictions", plot.predictions, "Prediction file");
  c_plot->add_option("--sample", plot.sample_id, "Sample id in the prediction file")->capture_default_str();
  c_plot->add_option("--metrics", plot.metrics, "metrics.json from evaluate, draws calibration");
  c_plot->add_option("--model", plot.model_id, "Model id for the calibration diagram");
  c_plot->add_option("--out", plot.out, "Output SVG")->required();
  c_plot->callback([&] { run = [&] { mbt::cmd_plot(plot, log); }; });

  for (auto* sub : app.get_subcommands({})) sub->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fmt::print(stderr, "error[usage]: {}\n", one_line(e.what()));
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error[{}]: {}\n", mbt::error_code(e), one_line(e.what()));
    return 1;
  }

  try {
    if (run) run();
  } catch (const std::exception& e) {
    fmt::print(stderr, "error[{}]: {}\n", mbt::error_code(e), one_line(e.what()));
    return 1;
  }
  return 0;
}
