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

#include "geospot/run_config.hpp"

#include "geospot/errors.hpp"
#include "json_util.hpp"

namespace geospot {

double RunConfig::resolved_lambda() const {
  if (lambda) return *lambda;
  const bool has_feature = feature_space && !feature_space->empty();
  const bool has_location = location != "none";
  if (has_feature && has_location) return 0.5;
  return has_feature ? 1.0 : 0.0;
}

GroundCostConfig RunConfig::ground() const {
  GroundCostConfig g;
  if (feature_space && !feature_space->empty()) g.feature_space = *feature_space;
  if (location == "none") {
    g.location_mode = LocationMode::kNone;
  } else if (location == "arc") {
    g.location_mode = LocationMode::kArc;
  } else {
    g.location_mode = LocationMode::kEmbedding;
    g.location_space = location;
  }
  g.lambda = resolved_lambda();
  g.p = p;
  g.normalization = parse_normalization(normalization);
  g.validate();
  return g;
}

SinkhornConfig RunConfig::solver() const {
  SinkhornConfig s;
  s.epsilon = epsilon;
  s.max_iterations = max_iterations;
  s.tolerance = tolerance;
  s.log_stabilized = log_stabilized;
  s.epsilon_annealing = epsilon_annealing;
  s.validate();
  if (n_max == 0) throw ConfigError("n_max must be >= 1");
  return s;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["manifest"] = manifest.string();
  j["feature"] = feature_space ? nlohmann::json(*feature_space) : nlohmann::json();
  j["location"] = location;
  j["lambda"] = resolved_lambda();
  j["p"] = p;
  j["normalization"] = normalization;
  j["epsilon"] = epsilon;
  j["max_iterations"] = max_iterations;
  j["tolerance"] = tolerance;
  j["log_stabilized"] = log_stabilized;
  j["epsilon_annealing"] = epsilon_annealing;
  j["n_max"] = n_max;
  j["seed"] = seed;
  j["out"] = out_dir.string();
  j["jobs"] = jobs;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    if (j.contains("manifest")) c.manifest = j["manifest"].get<std::string>();
    if (j.contains("feature") && !j["feature"].is_null())
      c.feature_space = j["feature"].get<std::string>();
    if (j.contains("location")) c.location = j["location"].get<std::string>();
    if (j.contains("lambda") && !j["lambda"].is_null()) c.lambda = j["lambda"].get<double>();
    if (j.contains("p")) c.p = j["p"].get<double>();
    if (j.contains("normalization")) c.normalization = j["normalization"].get<std::string>();
    if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
    if (j.contains("max_iterations")) c.max_iterations = j["max_iterations"].get<int>();
    if (j.contains("tolerance")) c.tolerance = j["tolerance"].get<double>();
    if (j.contains("log_stabilized")) c.log_stabilized = j["log_stabilized"].get<bool>();
    if (j.contains("epsilon_annealing"))
      c.epsilon_annealing = j["epsilon_annealing"].get<bool>();
    if (j.contains("n_max")) c.n_max = j["n_max"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  return from_json(detail::parse_json_file(path));
}

}  // namespace geospot
