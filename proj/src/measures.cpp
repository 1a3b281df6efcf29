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

#include "geospot/measures.hpp"

#include "geospot/errors.hpp"
#include "geospot/rng.hpp"

namespace geospot {

const Eigen::MatrixXd& EmpiricalMeasure::embedding(const std::string& space) const {
  const auto it = embeddings.find(space);
  if (it == embeddings.end()) throw DataError("measure has no embedding space '" + space + "'");
  return it->second;
}

EmpiricalMeasure to_measure(const DomainDataset& dataset) {
  if (dataset.size() == 0) throw DataError("empty domain: " + dataset.id);
  EmpiricalMeasure m;
  m.coords = dataset.coords;
  m.embeddings = dataset.embeddings;
  m.weights = Eigen::VectorXd::Constant(dataset.size(), 1.0 / static_cast<double>(dataset.size()));
  return m;
}

EmpiricalMeasure subsample(const EmpiricalMeasure& measure, std::size_t n_max,
                           std::uint64_t seed) {
  if (n_max == 0) throw ConfigError("subsample n_max must be >= 1");
  const auto n = static_cast<std::size_t>(measure.size());
  if (n <= n_max) return measure;

  const auto keep = sample_without_replacement(n, n_max, seed);
  EmpiricalMeasure out;
  out.coords.resize(static_cast<Eigen::Index>(n_max), 2);
  for (std::size_t i = 0; i < n_max; ++i)
    out.coords.row(static_cast<Eigen::Index>(i)) =
        measure.coords.row(static_cast<Eigen::Index>(keep[i]));
  for (const auto& [space, mat] : measure.embeddings) {
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(n_max), mat.cols());
    for (std::size_t i = 0; i < n_max; ++i)
      sub.row(static_cast<Eigen::Index>(i)) = mat.row(static_cast<Eigen::Index>(keep[i]));
    out.embeddings.emplace(space, std::move(sub));
  }
  out.weights =
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_max), 1.0 / static_cast<double>(n_max));
  return out;
}

EmpiricalMeasure pool(const std::vector<EmpiricalMeasure>& measures) {
  if (measures.empty()) throw DataError("cannot pool an empty list of measures");
  if (measures.size() == 1) return measures.front();

  Eigen::Index total = 0;
  for (const auto& m : measures) {
    total += m.size();
    if (m.embeddings.size() != measures.front().embeddings.size())
      throw DataError("pooled measures must carry identical embedding spaces");
    for (const auto& [space, mat] : m.embeddings) {
      const auto it = measures.front().embeddings.find(space);
      if (it == measures.front().embeddings.end() || it->second.cols() != mat.cols())
        throw DataError("pooled measures must carry identical embedding spaces");
    }
  }

  EmpiricalMeasure out;
  out.coords.resize(total, 2);
  for (const auto& [space, mat] : measures.front().embeddings)
    out.embeddings.emplace(space, Eigen::MatrixXd(total, mat.cols()));

  Eigen::Index at = 0;
  for (const auto& m : measures) {
    out.coords.middleRows(at, m.size()) = m.coords;
    for (const auto& [space, mat] : m.embeddings)
      out.embeddings.at(space).middleRows(at, m.size()) = mat;
    at += m.size();
  }
  out.weights = Eigen::VectorXd::Constant(total, 1.0 / static_cast<double>(total));
  return out;
}

}  // namespace geospot
