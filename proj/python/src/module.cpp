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

// Python bindings. Profiles and trajectories cross the boundary as (H, 2)
// float arrays; reports come back as plain dicts.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "mbt/commands.hpp"
#include "mbt/core.hpp"
#include "mbt/eval.hpp"
#include "mbt/loss.hpp"
#include "mbt/model.hpp"
#include "mbt/synth.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

void check_pairs(const Array& a, const char* name) {
  if (a.ndim() != 2 || a.shape(1) != 2)
    throw std::invalid_argument(std::string(name) + " must have shape (H, 2)");
}

mbt::VelocityProfile to_profile(const Array& a, double dt, const char* name = "profile") {
  check_pairs(a, name);
  auto r = a.unchecked<2>();
  mbt::VelocityProfile p;
  p.dt = dt;
  for (py::ssize_t i = 0; i < r.shape(0); ++i) p.velocities.push_back({r(i, 0), r(i, 1)});
  return p;
}

mbt::Trajectory to_trajectory(const Array& a, double dt, const char* name = "trajectory") {
  check_pairs(a, name);
  auto r = a.unchecked<2>();
  mbt::Trajectory t;
  t.dt = dt;
  for (py::ssize_t i = 0; i < r.shape(0); ++i) t.locations.push_back({r(i, 0), r(i, 1)});
  return t;
}

mbt::ModePrediction to_prediction(const std::vector<Array>& modes, const std::vector<double>& probs,
                                  double dt) {
  mbt::ModePrediction p;
  for (const auto& m : modes) p.modes.push_back(to_profile(m, dt, "mode"));
  p.probs = probs;
  return p;
}

py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

mbt::LossConfig loss_config(int M, double alpha, const std::string& distance) {
  mbt::LossConfig cfg;
  cfg.M = M;
  cfg.alpha = alpha;
  cfg.distance = mbt::distance_kind_from_string(distance);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-modal player trajectory prediction";
  m.attr("__version__") = mbt::kToolVersion;
  m.attr("DEFAULT_DT") = mbt::kDefaultDt;

  py::register_exception<mbt::CommandError>(m, "CommandError", PyExc_RuntimeError);
  py::register_exception<mbt::DataQualityError>(m, "DataQualityError", PyExc_ValueError);

  // loss
  m.def(
      "mse_loss",
      [](const Array& truth, const Array& pred, double dt) {
        return mbt::mse_loss(to_profile(truth, dt), to_profile(pred, dt));
      },
      py::arg("truth"), py::arg("pred"), py::arg("dt") = mbt::kDefaultDt);
  m.def(
      "distance",
      [](const Array& truth, const Array& pred, const std::string& kind, double dt) {
        return mbt::distance(to_profile(truth, dt), to_profile(pred, dt),
                             mbt::distance_kind_from_string(kind));
      },
      py::arg("truth"), py::arg("pred"), py::arg("kind") = "l", py::arg("dt") = mbt::kDefaultDt,
      "Distance between velocity profiles; kind is 'MSE', 'l' or 'v'.");
  m.def(
      "winning_mode",
      [](const Array& truth, const std::vector<Array>& modes, const std::string& kind, double dt) {
        std::vector<mbt::VelocityProfile> ms;
        for (const auto& a : modes) ms.push_back(to_profile(a, dt, "mode"));
        return mbt::winning_mode(to_profile(truth, dt), ms, mbt::distance_kind_from_string(kind));
      },
      py::arg("truth"), py::arg("modes"), py::arg("kind") = "l", py::arg("dt") = mbt::kDefaultDt);
  m.def("relaxed_delta", &mbt::relaxed_delta, py::arg("m"), py::arg("m_star"), py::arg("epsilon"),
        py::arg("M"));
  m.def(
      "mtp_loss",
      [](const Array& truth, const std::vector<Array>& modes, const std::vector<double>& probs,
         double epsilon, double alpha, const std::string& kind, double dt) {
        auto pred = to_prediction(modes, probs, dt);
        auto r = mbt::mtp_loss(to_profile(truth, dt), pred, loss_config(pred.M(), alpha, kind), epsilon);
        py::dict d;
        d["total"] = r.total;
        d["classification"] = r.classification;
        d["trajectory"] = r.trajectory;
        d["winning_mode"] = r.winning_mode;
        d["delta_weights"] = r.delta_weights;
        d["clamped_probabilities"] = r.clamped_probabilities;
        return d;
      },
      py::arg("truth"), py::arg("modes"), py::arg("probs"), py::arg("epsilon") = 0.0,
      py::arg("alpha") = 1.0, py::arg("kind") = "l", py::arg("dt") = mbt::kDefaultDt);
  m.def(
      "epsilon_at_epoch",
      [](int epoch, double epsilon0, double decrement, const std::string& schedule) {
        mbt::LossConfig cfg;
        cfg.epsilon0 = epsilon0;
        cfg.epsilon_decrement = decrement;
        cfg.schedule = mbt::epsilon_schedule_from_string(schedule);
        return mbt::epsilon_at_epoch(cfg, epoch);
      },
      py::arg("epoch"), py::arg("epsilon0") = 0.25, py::arg("decrement") = 0.05,
      py::arg("schedule") = "linear");

  // eval
  m.def(
      "ade_fde",
      [](const Array& truth, const Array& pred, double dt) {
        auto e = mbt::ade_fde(to_trajectory(truth, dt), to_trajectory(pred, dt));
        return py::make_tuple(e.ade, e.fde);
      },
      py::arg("truth"), py::arg("pred"), py::arg("dt") = mbt::kDefaultDt);
  m.def(
      "best_of_m",
      [](const Array& truth, const std::vector<Array>& modes, const std::vector<double>& probs,
         std::pair<double, double> anchor, double dt) {
        auto r = mbt::best_of_m(to_trajectory(truth, dt), to_prediction(modes, probs, dt),
                                {anchor.first, anchor.second});
        py::dict d;
        d["chosen_mode"] = r.chosen_mode;
        d["ade"] = r.ade;
        d["fde"] = r.fde;
        d["mse"] = r.mse;
        return d;
      },
      py::arg("truth_locations"), py::arg("modes"), py::arg("probs"), py::arg("anchor"),
      py::arg("dt") = mbt::kDefaultDt,
      "Best mode by final displacement; modes are velocity profiles integrated from anchor.");
  m.def("calibration_bin", &mbt::calibration_bin, py::arg("probability"));
  m.def(
      "acceleration_profile",
      [](const Array& vel, std::pair<double, double> v0, double dt) {
        return mbt::acceleration_profile(to_profile(vel, dt), {v0.first, v0.second});
      },
      py::arg("velocities"), py::arg("v0"), py::arg("dt") = mbt::kDefaultDt);
  m.def("percentile", &mbt::percentile, py::arg("values"), py::arg("q"));

  // model
  m.def(
      "parameter_count",
      [](int L, int H, int M, int layers, int width) {
        mbt::ModelConfig cfg;
        cfg.L = L;
        cfg.H = H;
        cfg.M = M;
        cfg.recurrent_layers = layers;
        cfg.recurrent_width = width;
        return mbt::parameter_count(cfg);
      },
      py::arg("L") = 10, py::arg("H") = 10, py::arg("M") = 4, py::arg("layers") = 2,
      py::arg("width") = 128);

  // commands
  m.def(
      "synth",
      [](const std::filesystem::path& out, const std::string& scenario, int n, std::uint64_t seed,
         std::vector<double> probs, double noise) {
        mbt::SynthOptions o;
        o.out_dir = out;
        o.spec.scenario = mbt::synthetic_scenario_from_string(scenario);
        o.spec.n_possessions = n;
        o.spec.seed = seed;
        o.spec.fork_probabilities = std::move(probs);
        o.spec.noise_std_ft = noise;
        return mbt::cmd_synth(o);
      },
      py::arg("out"), py::arg("scenario") = "fork", py::arg("n") = 2000, py::arg("seed") = 0,
      py::arg("probs") = std::vector<double>{0.5, 0.5}, py::arg("noise") = 0.02,
      "Writes a synthetic possession archive and returns its path.");
  m.def(
      "build_dataset",
      [](const std::filesystem::path& archives, const std::filesystem::path& out, int L, int H,
         double split_ratio, std::uint64_t seed, int player) {
        mbt::BuildDatasetOptions o;
        o.archives = archives;
        o.out = out;
        o.L = L;
        o.H = H;
        o.split_ratio = split_ratio;
        o.seed = seed;
        o.player_id = player;
        auto ds = mbt::cmd_build_dataset(o);
        return py::make_tuple(ds.split.train.size(), ds.split.test.size());
      },
      py::arg("archives"), py::arg("out"), py::arg("L") = 10, py::arg("H") = 10,
      py::arg("split_ratio") = 0.9, py::arg("seed") = 0, py::arg("player") = 0,
      "Returns (train_samples, test_samples).");
  m.def(
      "train",
      [](const std::filesystem::path& dataset, const std::filesystem::path& out, int M, int width,
         int epochs, int batch_size, double learning_rate, std::uint64_t seed,
         const std::string& distance) {
        mbt::TrainOptions o;
        o.dataset = dataset;
        o.out_dir = out;
        o.model.M = M;
        o.model.recurrent_width = width;
        o.model.seed = seed;
        o.train = mbt::TrainConfig::base(M);
        o.train.max_epochs = epochs;
        o.train.batch_size = batch_size;
        o.train.learning_rate = learning_rate;
        o.train.seed = seed;
        o.train.loss.distance = mbt::distance_kind_from_string(distance);
        return to_py(mbt::to_json(mbt::cmd_train(o).report));
      },
      py::arg("dataset"), py::arg("out"), py::arg("M") = 4, py::arg("width") = 128,
      py::arg("epochs") = 50, py::arg("batch_size") = 1024, py::arg("learning_rate") = 5e-4,
      py::arg("seed") = 0, py::arg("distance") = "l", "Trains a model and returns its report.");
  m.def(
      "evaluate",
      [](const std::filesystem::path& dataset, const std::filesystem::path& out,
         const std::vector<std::filesystem::path>& checkpoints, const std::vector<std::string>& baselines) {
        mbt::EvaluateOptions o;
        o.dataset = dataset;
        o.checkpoints = checkpoints;
        o.baselines = baselines;
        o.out_dir = out;
        py::list rows;
        for (const auto& e : mbt::cmd_evaluate(o).evaluations) rows.append(to_py(mbt::to_json(e.metrics)));
        return rows;
      },
      py::arg("dataset"), py::arg("out"), py::arg("checkpoints") = std::vector<std::filesystem::path>{},
      py::arg("baselines") = std::vector<std::string>{"CL", "CV"},
      "Writes metrics.json and metrics.txt and returns one metrics dict per model.");
}
