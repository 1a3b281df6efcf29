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

#include "geospot/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "geospot/ingest.hpp"
#include "json_util.hpp"

namespace geospot {

namespace {

// Average (fractional) ranks, 1-based; tied values share the mean of the
// ranks they occupy.
std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("correlation undefined for a constant vector");
  // One sqrt over the product keeps perfect correlations exactly +-1.
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

Eigen::Index AccuracyTable::index_of(const std::string& id) const {
  for (std::size_t k = 0; k < domain_ids.size(); ++k)
    if (domain_ids[k] == id) return static_cast<Eigen::Index>(k);
  return -1;
}

AccuracyTable read_accuracy_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty accuracy file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();

  AccuracyTable table;
  std::size_t start = line.find(',');
  if (start == std::string::npos) throw DataError("malformed accuracy header in " + path.string());
  while (start != std::string::npos) {
    const std::size_t end = line.find(',', start + 1);
    table.domain_ids.push_back(
        line.substr(start + 1, end == std::string::npos ? std::string::npos : end - start - 1));
    start = end;
  }

  const auto n = static_cast<Eigen::Index>(table.domain_ids.size());
  table.acc = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= n) throw DataError("too many rows in accuracy table " + path.string());
    std::size_t pos = line.find(',');
    if (pos == std::string::npos) throw DataError("malformed accuracy row in " + path.string());
    if (line.substr(0, pos) != table.domain_ids[static_cast<std::size_t>(row)])
      throw DataError("accuracy row order does not match header in " + path.string());
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::size_t end = line.find(',', pos + 1);
      const std::string tok =
          line.substr(pos + 1, end == std::string::npos ? std::string::npos : end - pos - 1);
      if (!tok.empty() && tok != "nan" && tok != "NaN") {
        double v = 0.0;
        try {
          v = std::stod(tok);
        } catch (const std::exception&) {
          throw DataError("malformed number '" + tok + "' in " + path.string());
        }
        if (v < 0.0 || v > 1.0)
          throw DataError("accuracy outside [0, 1] in " + path.string() + ": " + tok);
        table.acc(row, j) = v;
      }
      pos = end;
      if (pos == std::string::npos && j + 1 < n)
        throw DataError("short row in accuracy table " + path.string());
    }
    ++row;
  }
  if (row != n) throw DataError("accuracy row count does not match header in " + path.string());
  return table;
}

double transfer_delta(double acc_src_on_tgt, double acc_tgt_on_tgt) {
  if (std::isnan(acc_src_on_tgt) || std::isnan(acc_tgt_on_tgt))
    throw DataError("missing accuracy entry");
  if (acc_tgt_on_tgt <= 0.0) throw DataError("degenerate in-domain accuracy");
  return (acc_src_on_tgt - acc_tgt_on_tgt) / acc_tgt_on_tgt * 100.0;
}

double transfer_delta(const AccuracyTable& table, const std::string& src,
                      const std::string& tgt) {
  const Eigen::Index s = table.index_of(src);
  const Eigen::Index t = table.index_of(tgt);
  if (s < 0) throw DataError("unknown domain in accuracy table: " + src);
  if (t < 0) throw DataError("unknown domain in accuracy table: " + tgt);
  return transfer_delta(table.acc(s, t), table.acc(t, t));
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("spearman inputs differ in length");
  if (x.size() < 2) throw DataError("spearman needs at least 2 observations");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("ols inputs differ in length");
  if (x.size() < 2) throw DataError("ols needs at least 2 observations");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DataError("ols undefined for constant x");
  if (syy == 0.0) throw DataError("degenerate variance: constant y");

  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = 1.0 - ss_res / syy;
  return fit;
}

CorrelationReport correlate(const PairwiseDistanceTable& distances, const AccuracyTable& acc) {
  CorrelationReport report;
  for (std::size_t si = 0; si < distances.domain_ids.size(); ++si) {
    const auto& src = distances.domain_ids[si];
    const Eigen::Index as = acc.index_of(src);
    if (as < 0) continue;
    for (std::size_t ti = 0; ti < distances.domain_ids.size(); ++ti) {
      if (si == ti) continue;
      const auto& tgt = distances.domain_ids[ti];
      const Eigen::Index at = acc.index_of(tgt);
      if (at < 0) continue;
      const double d = distances.values(static_cast<Eigen::Index>(si),
                                        static_cast<Eigen::Index>(ti));
      const double a_st = acc.acc(as, at);
      const double a_tt = acc.acc(at, at);
      if (std::isnan(d) || std::isnan(a_st) || std::isnan(a_tt) || a_tt <= 0.0) continue;
      report.pairs.push_back({src, tgt, d, transfer_delta(a_st, a_tt)});
    }
  }
  report.n_pairs = report.pairs.size();
  if (report.n_pairs < 2)
    throw DataError("no overlapping pairs: need at least 2 valid (distance, delta) pairs");

  std::vector<double> xs, ys;
  xs.reserve(report.n_pairs);
  ys.reserve(report.n_pairs);
  for (const auto& p : report.pairs) {
    xs.push_back(p.distance);
    ys.push_back(p.delta);
  }
  report.spearman_rho = spearman(xs, ys);
  const OlsFit fit = ols_fit(xs, ys);
  report.slope = fit.slope;
  report.intercept = fit.intercept;
  report.r_squared = fit.r_squared;
  return report;
}

void write_report_json(const CorrelationReport& report, const std::filesystem::path& path) {
  nlohmann::json j;
  j["n_pairs"] = report.n_pairs;
  j["spearman_rho"] = report.spearman_rho;
  j["r_squared"] = report.r_squared;
  j["slope"] = report.slope;
  j["intercept"] = report.intercept;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : report.pairs) {
    nlohmann::json jp;
    jp["src"] = p.src;
    jp["tgt"] = p.tgt;
    jp["distance"] = p.distance;
    jp["delta"] = p.delta;
    pairs.push_back(std::move(jp));
  }
  j["pairs"] = std::move(pairs);
  detail::write_json_file(j, path);
}

void write_pairs_csv(const CorrelationReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "src,tgt,distance,delta\n";
  for (const auto& p : report.pairs)
    out << p.src << ',' << p.tgt << ',' << format_double(p.distance) << ','
        << format_double(p.delta) << '\n';
}

}  // namespace geospot
