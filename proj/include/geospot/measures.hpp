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

#ifndef GEOSPOT_MEASURES_HPP_
#define GEOSPOT_MEASURES_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geospot/ingest.hpp"

namespace geospot {

// A uniform-weighted point cloud in joint feature-location space. Every
// construction path keeps weights uniform and summing to one; the struct owns
// its rows, so measures stay valid independently of the datasets they came
// from and are safe to share between threads.
struct EmpiricalMeasure {
  Eigen::MatrixX2d coords;                          // lat, lon in degrees
  std::map<std::string, Eigen::MatrixXd> embeddings;  // row-aligned with coords
  Eigen::VectorXd weights;

  Eigen::Index size() const { return coords.rows(); }
  const Eigen::MatrixXd& embedding(const std::string& space) const;
  bool has_space(const std::string& space) const { return embeddings.count(space) > 0; }
};

// One point per sample, weight 1/n. Throws DataError on an empty dataset.
EmpiricalMeasure to_measure(const DomainDataset& dataset);

// Uniform sample without replacement of at most n_max points, reweighted
// uniformly. Identity when the measure already has <= n_max points. Pure in
// (measure, n_max, seed).
EmpiricalMeasure subsample(const EmpiricalMeasure& measure, std::size_t n_max,
                           std::uint64_t seed);

// Concatenates all points and reweights uniformly over the union, so a large
// domain contributes proportionally more mass than a small one. Measures must
// carry identical embedding spaces.
EmpiricalMeasure pool(const std::vector<EmpiricalMeasure>& measures);

}  // namespace geospot

#endif  // GEOSPOT_MEASURES_HPP_
