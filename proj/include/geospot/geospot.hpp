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

// End-to-end distance computation for domain pairs and full pairwise tables:
// subsample each domain once (seeded per domain id), build the three cost
// matrices under a shared normalizer, and take the debiased Sinkhorn
// divergence. Tables compute each unordered pair once and mirror it, so they
// are symmetric by construction; per-pair failures become NaN cells plus a
// warning instead of aborting the batch.

#ifndef GEOSPOT_GEOSPOT_HPP_
#define GEOSPOT_GEOSPOT_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "geospot/ot.hpp"

namespace geospot {

struct PairwiseDistanceTable {
  std::vector<std::string> domain_ids;
  Eigen::MatrixXd values;  // NaN marks a failed cell
  GroundCostConfig ground;
  SinkhornConfig solver;
  std::size_t n_max = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;  // one entry per failed cell or skipped domain
  int non_converged_solves = 0;

  Eigen::Index index_of(const std::string& id) const;  // -1 when absent
};

// A domain slot for table building. data == nullptr marks a domain that
// failed to load; its row and column become NaN.
struct DomainInput {
  std::string id;
  std::shared_ptr<const DomainDataset> data;
  std::string load_error;
};

// Divergence between two domains under the given configs. The subsample seed
// for each side derives from (seed, domain id), so a domain always
// contributes the same rows regardless of which pair it appears in.
DistanceResult geospot_distance(const DomainDataset& src, const DomainDataset& tgt,
                                const GroundCostConfig& gcfg, const SinkhornConfig& scfg,
                                std::size_t n_max, std::uint64_t seed);

// Full symmetric table over >= 2 domains. jobs <= 0 means one worker per
// hardware thread; results do not depend on the worker count.
PairwiseDistanceTable pairwise_matrix(const std::vector<DomainInput>& domains,
                                      const GroundCostConfig& gcfg, const SinkhornConfig& scfg,
                                      std::size_t n_max, std::uint64_t seed, int jobs = 0);

PairwiseDistanceTable pairwise_matrix(const std::vector<DomainDataset>& domains,
                                      const GroundCostConfig& gcfg, const SinkhornConfig& scfg,
                                      std::size_t n_max, std::uint64_t seed, int jobs = 0);

void write_table_csv(const PairwiseDistanceTable& table, const std::filesystem::path& path);
void write_table_json(const PairwiseDistanceTable& table, const std::filesystem::path& path);

// Reads the CSV layout written above: ids and values only, configs default.
PairwiseDistanceTable read_table_csv(const std::filesystem::path& path);

}  // namespace geospot

#endif  // GEOSPOT_GEOSPOT_HPP_
