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

// Ground costs between points of two measures: cosine distance on feature
// embeddings, great-circle arc distance on coordinates (or cosine distance on
// location embeddings), blended as
//
//   cost = lambda * d_feature^p + (1 - lambda) * d_location^p
//
// and assembled into dense cost matrices with max normalization. A divergence
// needs three matrices (cross, self-src, self-tgt) under one shared
// normalizer; PairCostBuilder produces that triplet.

#ifndef GEOSPOT_COST_HPP_
#define GEOSPOT_COST_HPP_

#include <Eigen/Core>
#include <optional>
#include <string>

#include "geospot/measures.hpp"

namespace geospot {

enum class LocationMode { kNone, kArc, kEmbedding };
enum class Normalization { kPerComponentMax, kJointMax, kNone };

std::string to_string(LocationMode m);
std::string to_string(Normalization n);
LocationMode parse_location_mode(const std::string& s);
Normalization parse_normalization(const std::string& s);

struct GroundCostConfig {
  std::optional<std::string> feature_space;
  LocationMode location_mode = LocationMode::kNone;
  std::string location_space;  // set when location_mode == kEmbedding
  double lambda = 1.0;
  double p = 2.0;
  Normalization normalization = Normalization::kPerComponentMax;

  bool feature_active() const { return feature_space.has_value(); }
  bool location_active() const { return location_mode != LocationMode::kNone; }

  // Throws ConfigError unless the config is coherent: at least one modality,
  // lambda in [0,1] (and pinned to 1 or 0 when only one modality is active),
  // p >= 1, and a space name whenever location embeddings are requested.
  void validate() const;
};

struct CostMatrix {
  Eigen::MatrixXd values;  // entries are combined d^p costs, >= 0 and finite
  // Normalizers actually applied (1.0 when skipped or not applicable).
  double normalizer = 1.0;           // joint_max divisor
  double feature_normalizer = 1.0;   // per_component_max divisors
  double location_normalizer = 1.0;
  GroundCostConfig config;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

struct CostTriplet {
  CostMatrix cross;
  CostMatrix self_src;
  CostMatrix self_tgt;
};

// 1 - cos(u, v), in [0, 2]. Throws on dimension mismatch or a zero vector.
double cosine_distance(const Eigen::Ref<const Eigen::VectorXd>& u,
                       const Eigen::Ref<const Eigen::VectorXd>& v);

// Central angle in radians between two (lat, lon) points in degrees, by the
// atan2 form that stays accurate near 0 and near antipodes.
double arc_distance(double lat_a_deg, double lon_a_deg, double lat_b_deg, double lon_b_deg);

// lambda * d_x^p + (1 - lambda) * d_l^p
double combine(double d_x, double d_l, double lambda, double p);

// Cost matrix for one source/target pair, normalized over that pair alone.
CostMatrix build_cost_matrix(const EmpiricalMeasure& src, const EmpiricalMeasure& tgt,
                             const GroundCostConfig& config);

// Builds the cross and both self matrices under a single normalizer taken
// over the union of all three, which keeps the divergence terms on one scale
// and preserves S(alpha, alpha) = 0.
class PairCostBuilder {
 public:
  explicit PairCostBuilder(GroundCostConfig config);
  CostTriplet build(const EmpiricalMeasure& src, const EmpiricalMeasure& tgt) const;
  const GroundCostConfig& config() const { return config_; }

 private:
  GroundCostConfig config_;
};

// Debug dump of the raw cost values in the binary matrix format.
void dump_cost_matrix(const CostMatrix& cost, const std::filesystem::path& path);

}  // namespace geospot

#endif  // GEOSPOT_COST_HPP_
