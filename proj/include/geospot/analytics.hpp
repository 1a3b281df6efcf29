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

// How well do distances explain transfer difficulty: the relative accuracy
// change of a transferred model, Spearman rank correlation (average ranks on
// ties), and an ordinary least-squares fit with R^2.

#ifndef GEOSPOT_ANALYTICS_HPP_
#define GEOSPOT_ANALYTICS_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "geospot/geospot.hpp"

namespace geospot {

// Accuracy of the model trained on the row domain, evaluated on the column
// domain. NaN marks a missing entry; the diagonal is in-domain accuracy.
struct AccuracyTable {
  std::vector<std::string> domain_ids;
  Eigen::MatrixXd acc;

  Eigen::Index index_of(const std::string& id) const;
};

AccuracyTable read_accuracy_csv(const std::filesystem::path& path);

// Relative accuracy change in percent when transferring src -> tgt:
//   (acc_tgt(model_src) - acc_tgt(model_tgt)) / acc_tgt(model_tgt) * 100
double transfer_delta(double acc_src_on_tgt, double acc_tgt_on_tgt);
double transfer_delta(const AccuracyTable& table, const std::string& src, const std::string& tgt);

// Spearman rank correlation with average (fractional) ranks on ties.
double spearman(std::span<const double> x, std::span<const double> y);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares line of y on x, with R^2 = 1 - SS_res/SS_tot. For simple OLS
// with intercept this R^2 equals the squared Pearson correlation.
OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

struct PairRecord {
  std::string src, tgt;
  double distance = 0.0;
  double delta = 0.0;
};

struct CorrelationReport {
  std::size_t n_pairs = 0;
  double spearman_rho = 0.0;
  double r_squared = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<PairRecord> pairs;
};

// All ordered src != tgt pairs present in both tables and with a computable
// delta (finite distance, both accuracies present, positive in-domain
// accuracy) feed the correlation of delta against distance.
CorrelationReport correlate(const PairwiseDistanceTable& distances, const AccuracyTable& acc);

void write_report_json(const CorrelationReport& report, const std::filesystem::path& path);
void write_pairs_csv(const CorrelationReport& report, const std::filesystem::path& path);

}  // namespace geospot

#endif  // GEOSPOT_ANALYTICS_HPP_
