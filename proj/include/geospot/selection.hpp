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

// Greedy source-domain selection: at each step every remaining candidate is
// pooled with the domains already chosen, scored by the divergence of that
// pool against the target, and the argmin joins the pool. Ties break toward
// the earlier candidate in the input list. Each domain is subsampled once for
// the whole run, so a K'-trace is always a prefix of the K-trace.

#ifndef GEOSPOT_SELECTION_HPP_
#define GEOSPOT_SELECTION_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "geospot/geospot.hpp"

namespace geospot {

struct SelectionStep {
  std::string chosen_id;
  double score = 0.0;  // pooled divergence to the target after adding chosen_id
  std::map<std::string, double> candidate_scores;  // every remaining candidate this step
};

struct SelectionTrace {
  std::string target_id;
  std::vector<SelectionStep> steps;  // length K, greedy order
  GroundCostConfig ground;
  SinkhornConfig solver;
  std::size_t n_max = 0;
  std::uint64_t seed = 0;

  std::vector<std::string> chosen_ids() const;
};

SelectionTrace greedy_select(const std::vector<DomainDataset>& sources,
                             const DomainDataset& target, std::size_t k,
                             const GroundCostConfig& gcfg, const SinkhornConfig& scfg,
                             std::size_t n_max, std::uint64_t seed, int jobs = 0);

// Rows drawn from the chosen domains under a total budget: floor(N/K) per
// domain, the remainder going one extra to the earliest picks, uniformly
// without replacement within each domain. Throws DataError with the shortfall
// when a chosen domain cannot fill its quota.
struct BudgetSample {
  std::vector<std::pair<std::string, Eigen::Index>> rows;  // (domain_id, row index)
};

BudgetSample budget_sample(const SelectionTrace& trace,
                           const std::vector<DomainDataset>& sources, std::size_t budget,
                           std::uint64_t seed);

void write_trace_json(const SelectionTrace& trace, const std::filesystem::path& path);
void write_samples_csv(const BudgetSample& sample, const std::filesystem::path& path);

}  // namespace geospot

#endif  // GEOSPOT_SELECTION_HPP_
