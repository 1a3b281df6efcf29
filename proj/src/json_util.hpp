// Copyright 2026 The Authors.
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

// Internal JSON glue shared by the exporters and the CLI config.

#ifndef GEOSPOT_SRC_JSON_UTIL_HPP_
#define GEOSPOT_SRC_JSON_UTIL_HPP_

#include <fstream>

#include "geospot/cost.hpp"
#include "geospot/errors.hpp"
#include "geospot/ot.hpp"
#include "json.hpp"

namespace geospot::detail {

inline nlohmann::json ground_to_json(const GroundCostConfig& g) {
  nlohmann::json j;
  j["feature_space"] = g.feature_space ? nlohmann::json(*g.feature_space) : nlohmann::json();
  j["location_mode"] = to_string(g.location_mode);
  j["location_space"] = g.location_space;
  j["lambda"] = g.lambda;
  j["p"] = g.p;
  j["normalization"] = to_string(g.normalization);
  return j;
}

inline nlohmann::json solver_to_json(const SinkhornConfig& s) {
  nlohmann::json j;
  j["epsilon"] = s.epsilon;
  j["max_iterations"] = s.max_iterations;
  j["tolerance"] = s.tolerance;
  j["log_stabilized"] = s.log_stabilized;
  j["epsilon_annealing"] = s.epsilon_annealing;
  return j;
}

inline void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
}

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace geospot::detail

#endif  // GEOSPOT_SRC_JSON_UTIL_HPP_
