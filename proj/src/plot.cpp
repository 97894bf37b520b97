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

#include "mbt/plot.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mbt {
namespace {

constexpr double kScale = 10.0;  // px per ft
constexpr double kMargin = 20.0;

constexpr const char* kAttackerColor = "#d62728";
constexpr const char* kDefenderColor = "#1f5fbf";
constexpr const char* kBallColor = "#ff8c00";
constexpr const char* kHistoryColor = "#808080";
constexpr const char* kTruthColor = "#2ca02c";
constexpr const char* kPredictionColor = "#e6c200";

double px(double ft) { return kMargin + kScale * ft; }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

nlohmann::json point(const Location2D& l) { return nlohmann::json::array({l.x, l.y}); }

Location2D point_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw DataQualityError("expected an [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

nlohmann::json points(const std::vector<Location2D>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& l : v) a.push_back(point(l));
  return a;
}

std::vector<Location2D> points_from(const nlohmann::json& j) {
  std::vector<Location2D> out;
  for (const auto& p : j) out.push_back(point_from(p));
  return out;
}

std::string polyline(const std::vector<Location2D>& pts, const char* cls) {
  std::string s = fmt::format(R"(<polyline class="{}" fill="none" stroke="#444" stroke-width="1.5" points=")", cls);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px(pts[i].x), px(pts[i].y));
  }
  return s + "\"/>\n";
}

std::vector<Location2D> arc(Location2D c, double r, double from, double to, int n = 48) {
  std::vector<Location2D> out;
  for (int i = 0; i <= n; ++i) {
    const double a = from + (to - from) * i / n;
    out.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return out;
}

std::string court() {
  constexpr double pi = std::numbers::pi;
  std::string s;
  s += fmt::format(R"(<rect class="court" x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="#f4e7cf" stroke="#444" stroke-width="2"/>)",
                   px(0), px(0), 94 * kScale, 50 * kScale);
  s += "\n";
  s += fmt::format(R"(<line class="court" x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="#444" stroke-width="2"/>)",
                   px(47), px(0), px(50));
  s += "\n";
  s += polyline(arc({47, 25}, 6, 0, 2 * pi), "court");
  for (int side = 0; side < 2; ++side) {
    const double base = side == 0 ? 0.0 : 94.0;
    const double dir = side == 0 ? 1.0 : -1.0;
    const Location2D rim{base + dir * 5.25, 25};
    // Lane and free throw circle.
    s += polyline({{base, 17}, {base + dir * 19, 17}, {base + dir * 19, 33}, {base, 33}}, "court");
    s += polyline(arc({base + dir * 19, 25}, 6, 0, 2 * pi), "court");
    // Three point line: corner segments joined by the arc.
    const double a = std::asin(22.0 / 23.75);
    std::vector<Location2D> three = {{base, 3}};
    const auto curve = side == 0 ? arc(rim, 23.75, -a, a) : arc(rim, 23.75, pi + a, pi - a);
    three.insert(three.end(), curve.begin(), curve.end());
    three.push_back({base, 47});
    s += polyline(three, "court");
    // Backboard and rim.
    s += polyline({{base + dir * 4, 22}, {base + dir * 4, 28}}, "court");
    s += polyline(arc(rim, 0.75, 0, 2 * pi, 16), "court");
  }
  return s;
}

std::string path(const std::vector<Location2D>& pts, const char* cls, const char* color, double width,
                  const char* dash = nullptr) {
  std::string d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    d += fmt::format("{}{} {:.2f} {:.2f}", i ? " " : "", i ? "L" : "M", px(pts[i].x), px(pts[i].y));
  }
  std::string extra = dash ? fmt::format(R"( stroke-dasharray="{}")", dash) : std::string();
  return fmt::format(R"(<path class="{}" d="{}" fill="none" stroke="{}" stroke-width="{}"{}/>)", cls, d, color,
                     width, extra) +
         "\n";
}

}  // namespace

const char* to_string(EntityRole r) {
  switch (r) {
    case EntityRole::kAttacker: return "attacker";
    case EntityRole::kDefender: return "defender";
    case EntityRole::kBall: return "ball";
  }
  return "?";
}

EntityRole entity_role_from_string(const std::string& name) {
  if (name == "attacker") return EntityRole::kAttacker;
  if (name == "defender") return EntityRole::kDefender;
  if (name == "ball") return EntityRole::kBall;
  throw DataQualityError("unknown entity role '" + name + "'");
}

PredictionRecord make_prediction_record(std::size_t sample_id, const Sample& s,
                                        const ModePrediction& p, std::string possession_id) {
  PredictionRecord r;
  r.sample_id = sample_id;
  r.possession_id = std::move(possession_id);
  r.anchor_index = s.anchor_index;
  r.player_id = s.player_of_interest_id;
  r.anchor = s.anchor_location;
  r.history = s.history_self;
  r.ground_truth = s.target_locations.locations;
  r.entities[0] = {s.ordered_ids[0], EntityRole::kAttacker, s.history_self.back()};
  for (std::size_t k = 0; k < 9; ++k) {
    r.entities[k + 1] = {s.ordered_ids[k + 1], k < 4 ? EntityRole::kAttacker : EntityRole::kDefender,
                         s.history_others[k].back()};
  }
  r.entities[10] = {-1, EntityRole::kBall, s.history_ball.back()};
  r.probabilities = p.probs;
  for (const auto& mode : p.modes) r.modes.push_back(locations_from_velocities(s.anchor_location, mode).locations);
  return r;
}

nlohmann::json to_json(const PredictionFile& f) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : f.records) {
    nlohmann::json entities = nlohmann::json::array();
    for (const auto& e : r.entities) {
      entities.push_back({{"id", e.id}, {"role", to_string(e.role)}, {"location", point(e.location)}});
    }
    nlohmann::json modes = nlohmann::json::array();
    for (std::size_t m = 0; m < r.modes.size(); ++m) {
      modes.push_back({{"probability", r.probabilities[m]}, {"trajectory", points(r.modes[m])}});
    }
    records.push_back({{"sample_id", r.sample_id},
                       {"possession_id", r.possession_id},
                       {"anchor_index", r.anchor_index},
                       {"player_id", r.player_id},
                       {"anchor", point(r.anchor)},
                       {"history", points(r.history)},
                       {"ground_truth", points(r.ground_truth)},
                       {"entities", entities},
                       {"modes", modes}});
  }
  return {{"format", "mbt-predictions"},
          {"version", kPredictionFileVersion},
          {"model_id", f.model_id},
          {"H", f.H},
          {"M", f.M},
          {"dt", f.dt},
          {"provenance", f.provenance},
          {"records", records}};
}

PredictionFile prediction_file_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "mbt-predictions") throw DataQualityError("not a prediction file");
  if (j.at("version").get<int>() != kPredictionFileVersion) {
    throw DataQualityError("unsupported prediction file version");
  }
  PredictionFile f;
  f.model_id = j.at("model_id").get<std::string>();
  f.H = j.at("H").get<int>();
  f.M = j.at("M").get<int>();
  f.dt = j.at("dt").get<double>();
  f.provenance = j.value("provenance", nlohmann::json::object());
  for (const auto& jr : j.at("records")) {
    PredictionRecord r;
    r.sample_id = jr.at("sample_id").get<std::size_t>();
    r.possession_id = jr.at("possession_id").get<std::string>();
    r.anchor_index = jr.at("anchor_index").get<int>();
    r.player_id = jr.at("player_id").get<int>();
    r.anchor = point_from(jr.at("anchor"));
    r.history = points_from(jr.at("history"));
    r.ground_truth = points_from(jr.at("ground_truth"));
    const auto& ents = jr.at("entities");
    if (ents.size() != r.entities.size()) throw DataQualityError("expected 11 entities");
    for (std::size_t k = 0; k < ents.size(); ++k) {
      r.entities[k] = {ents[k].at("id").get<int>(), entity_role_from_string(ents[k].at("role").get<std::string>()),
                       point_from(ents[k].at("location"))};
    }
    for (const auto& m : jr.at("modes")) {
      r.probabilities.push_back(m.at("probability").get<double>());
      r.modes.push_back(points_from(m.at("trajectory")));
    }
    f.records.push_back(std::move(r));
  }
  return f;
}

void write_prediction_file(const std::filesystem::path& path, const PredictionFile& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(f).dump(1) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

PredictionFile read_prediction_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataQualityError("malformed prediction file: " + std::string(e.what()));
  }
  return prediction_file_from_json(j);
}

std::string possession_svg(const PredictionRecord& r) {
  const double w = 94 * kScale + 2 * kMargin;
  const double h = 50 * kScale + 2 * kMargin;
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">)", w, h);
  s += "\n";
  s += fmt::format("<title>{} sample {} player {} anchor {}</title>\n", escape(r.possession_id), r.sample_id,
                   r.player_id, r.anchor_index);
  s += court();

  std::vector<Location2D> truth = {r.anchor};
  truth.insert(truth.end(), r.ground_truth.begin(), r.ground_truth.end());
  s += path(r.history, "history", kHistoryColor, 3);
  s += path(truth, "truth", kTruthColor, 3);
  for (std::size_t m = 0; m < r.modes.size(); ++m) {
    std::vector<Location2D> pts = {r.anchor};
    pts.insert(pts.end(), r.modes[m].begin(), r.modes[m].end());
    s += path(pts, "prediction", kPredictionColor, 2.5, "6 3");
    const Location2D end = pts.back();
    s += fmt::format(R"(<text class="probability" x="{:.2f}" y="{:.2f}" font-family="sans-serif" font-size="13" fill="#000">{:.0f}%</text>)",
                     px(end.x) + 5, px(end.y) - 5, 100.0 * r.probabilities[m]);
    s += "\n";
  }
  for (const auto& e : r.entities) {
    const char* color = e.role == EntityRole::kAttacker   ? kAttackerColor
                        : e.role == EntityRole::kDefender ? kDefenderColor
                                                          : kBallColor;
    const double radius = e.role == EntityRole::kBall ? 5.0 : 8.0;
    s += fmt::format(R"(<circle class="entity" data-role="{}" data-id="{}" cx="{:.2f}" cy="{:.2f}" r="{}" fill="{}" stroke="#000" stroke-width="1"/>)",
                     to_string(e.role), e.id, px(e.location.x), px(e.location.y), radius, color);
    s += "\n";
  }
  s += "</svg>\n";
  return s;
}

std::string calibration_svg(const CalibrationTable& t, const std::string& title) {
  constexpr double size = 400.0;
  constexpr double left = 60.0, top = 40.0;
  auto X = [&](double p) { return left + size * p; };
  auto Y = [&](double p) { return top + size * (1.0 - p); };
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">)",
                   left + size + 30, top + size + 60);
  s += "\n";
  s += fmt::format("<title>{}</title>\n", escape(title));
  s += fmt::format(R"(<text x="{:.1f}" y="24" font-family="sans-serif" font-size="15">{}</text>)", left, escape(title));
  s += "\n";
  s += fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="#fff" stroke="#000"/>)", left, top, size, size);
  s += "\n";
  for (int k = 0; k <= 10; ++k) {
    const double p = k / 10.0;
    s += fmt::format(R"(<line x1="{0:.1f}" y1="{1:.1f}" x2="{0:.1f}" y2="{2:.1f}" stroke="#ddd"/>)", X(p), Y(0), Y(1));
    s += fmt::format(R"(<line x1="{0:.1f}" y1="{1:.1f}" x2="{2:.1f}" y2="{1:.1f}" stroke="#ddd"/>)", X(0), Y(p), X(1));
    s += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="10" text-anchor="middle">{:.1f}</text>)",
                     X(p), Y(0) + 14, p);
    s += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="10" text-anchor="end">{:.1f}</text>)",
                     X(0) - 4, Y(p) + 3, p);
    s += "\n";
  }
  s += fmt::format(R"(<line class="identity" x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="#888" stroke-dasharray="4 3"/>)",
                   X(0), Y(0), X(1), Y(1));
  s += "\n";
  std::string pts;
  for (const auto& b : t.bins) {
    if (b.count == 0) continue;
    pts += fmt::format("{}{:.2f},{:.2f}", pts.empty() ? "" : " ", X(b.mean_predicted()), Y(b.frequency()));
  }
  if (!pts.empty()) {
    s += fmt::format(R"(<polyline class="reliability" points="{}" fill="none" stroke="#1f5fbf" stroke-width="2"/>)", pts);
    s += "\n";
  }
  for (std::size_t k = 0; k < t.bins.size(); ++k) {
    const auto& b = t.bins[k];
    if (b.count == 0) continue;
    s += fmt::format(R"(<circle class="bin" data-bin="{}" data-count="{}" cx="{:.2f}" cy="{:.2f}" r="4" fill="#1f5fbf"/>)",
                     k, b.count, X(b.mean_predicted()), Y(b.frequency()));
    s += "\n";
  }
  s += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="12" text-anchor="middle">predicted probability</text>)",
                   X(0.5), Y(0) + 34);
  s += fmt::format(R"svg(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 {:.1f} {:.1f})">empirical frequency</text>)svg",
                   X(0) - 40, Y(0.5), X(0) - 40, Y(0.5));
  s += "\n</svg>\n";
  return s;
}

}  // namespace mbt
