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

// The flat run configuration shared by every CLI command. A run writes the
// effective config next to its outputs; feeding that file back through
// --config replays the run.

#ifndef GEOSPOT_RUN_CONFIG_HPP_
#define GEOSPOT_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "geospot/cost.hpp"
#include "geospot/ot.hpp"
#include "json.hpp"

namespace geospot {

struct RunConfig {
  std::filesystem::path manifest;
  std::optional<std::string> feature_space;
  std::string location = "none";  // "none", "arc", or a location-embedding space name
  std::optional<double> lambda;   // resolved by ground(): 0.5 with two modalities, else pinned
  double p = 2.0;
  std::string normalization = "per_component_max";
  double epsilon = 0.01;
  int max_iterations = 10000;
  double tolerance = 1e-9;
  bool log_stabilized = true;
  bool epsilon_annealing = true;
  std::size_t n_max = 1000;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  int jobs = 0;  // 0 = hardware concurrency

  double resolved_lambda() const;
  GroundCostConfig ground() const;  // validates
  SinkhornConfig solver() const;    // validates

  nlohmann::json to_json() const;  // flat, keys mirror the CLI flags
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::filesystem::path& path);
};

}  // namespace geospot

#endif  // GEOSPOT_RUN_CONFIG_HPP_
