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

#include "geospot/geospot.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "geospot/measures.hpp"
#include "geospot/rng.hpp"
#include "json_util.hpp"

namespace geospot {

namespace {

EmpiricalMeasure cached_subsample(const DomainDataset& ds, std::size_t n_max,
                                  std::uint64_t seed) {
  return subsample(to_measure(ds), n_max, domain_seed(seed, ds.id));
}

// Divergence of a measure with itself: the three cost matrices coincide, so
// one solve supplies all three terms (identical to solving them separately,
// since the solver is deterministic).
DistanceResult self_divergence(const EmpiricalMeasure& m, const PairCostBuilder& builder,
                               const SinkhornConfig& scfg) {
  const CostTriplet t = builder.build(m, m);
  const TransportPlan plan = sinkhorn(t.cross, m.weights, m.weights, scfg);
  DistanceResult r;
  r.cross_cost = r.self_cost_src = r.self_cost_tgt = plan.cost_value;
  r.value = r.cross_cost - 0.5 * r.self_cost_src - 0.5 * r.self_cost_tgt;
  r.ground = builder.config();
  r.solver = scfg;
  r.diagnostics.cross = r.diagnostics.self_src = r.diagnostics.self_tgt = {
      plan.iterations_used, plan.converged};
  return r;
}

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

Eigen::Index PairwiseDistanceTable::index_of(const std::string& id) const {
  for (std::size_t k = 0; k < domain_ids.size(); ++k)
    if (domain_ids[k] == id) return static_cast<Eigen::Index>(k);
  return -1;
}

DistanceResult geospot_distance(const DomainDataset& src, const DomainDataset& tgt,
                                const GroundCostConfig& gcfg, const SinkhornConfig& scfg,
                                std::size_t n_max, std::uint64_t seed) {
  const PairCostBuilder builder(gcfg);
  const EmpiricalMeasure ms = cached_subsample(src, n_max, seed);
  const EmpiricalMeasure mt = cached_subsample(tgt, n_max, seed);
  return sinkhorn_divergence(ms, mt, builder, scfg);
}

PairwiseDistanceTable pairwise_matrix(const std::vector<DomainInput>& domains,
                                      const GroundCostConfig& gcfg, const SinkhornConfig& scfg,
                                      std::size_t n_max, std::uint64_t seed, int jobs) {
  if (domains.size() < 2) throw DataError("pairwise matrix needs at least 2 domains");
  for (std::size_t i = 0; i < domains.size(); ++i)
    for (std::size_t j = i + 1; j < domains.size(); ++j)
      if (domains[i].id == domains[j].id)
        throw DataError("duplicate domain id: " + domains[i].id);

  const PairCostBuilder builder(gcfg);
  scfg.validate();

  const auto n = static_cast<Eigen::Index>(domains.size());
  PairwiseDistanceTable table;
  for (const auto& d : domains) table.domain_ids.push_back(d.id);
  table.values = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  table.ground = gcfg;
  table.solver = scfg;
  table.n_max = n_max;
  table.seed = seed;

  // One subsample per domain, reused by every cell involving it.
  std::vector<std::optional<EmpiricalMeasure>> measures(domains.size());
  for (std::size_t k = 0; k < domains.size(); ++k) {
    if (!domains[k].data) {
      table.warnings.push_back("domain '" + domains[k].id + "' unavailable: " +
                               (domains[k].load_error.empty() ? "no data" : domains[k].load_error));
      continue;
    }
    measures[k] = cached_subsample(*domains[k].data, n_max, seed);
  }

  struct Cell {
    Eigen::Index i, j;
  };
  std::vector<Cell> cells;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      if (measures[static_cast<std::size_t>(i)] && measures[static_cast<std::size_t>(j)])
        cells.push_back({i, j});

  std::mutex mu;  // guards warnings and the convergence counter
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cells.size()) return;
      const auto [i, j] = cells[k];
      try {
        const DistanceResult r =
            i == j ? self_divergence(*measures[static_cast<std::size_t>(i)], builder, scfg)
                   : sinkhorn_divergence(*measures[static_cast<std::size_t>(i)],
                                         *measures[static_cast<std::size_t>(j)], builder, scfg);
        table.values(i, j) = r.value;
        table.values(j, i) = r.value;
        if (!r.diagnostics.all_converged()) {
          std::lock_guard<std::mutex> lock(mu);
          ++table.non_converged_solves;
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        table.warnings.push_back("pair (" + table.domain_ids[static_cast<std::size_t>(i)] + ", " +
                                 table.domain_ids[static_cast<std::size_t>(j)] +
                                 ") failed: " + e.what());
      }
    }
  };

  const int workers = std::min<int>(resolve_jobs(jobs), static_cast<int>(cells.size()) + 1);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return table;
}

PairwiseDistanceTable pairwise_matrix(const std::vector<DomainDataset>& domains,
                                      const GroundCostConfig& gcfg, const SinkhornConfig& scfg,
                                      std::size_t n_max, std::uint64_t seed, int jobs) {
  std::vector<DomainInput> inputs;
  inputs.reserve(domains.size());
  for (const auto& d : domains)
    inputs.push_back({d.id, std::make_shared<const DomainDataset>(d), ""});
  return pairwise_matrix(inputs, gcfg, scfg, n_max, seed, jobs);
}

void write_table_csv(const PairwiseDistanceTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  for (const auto& id : table.domain_ids) out << ',' << id;
  out << '\n';
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    out << table.domain_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < table.values.cols(); ++j)
      out << ',' << format_double(table.values(i, j));
    out << '\n';
  }
}

void write_table_json(const PairwiseDistanceTable& table, const std::filesystem::path& path) {
  nlohmann::json j;
  j["domain_ids"] = table.domain_ids;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j2 = 0; j2 < table.values.cols(); ++j2) {
      const double v = table.values(i, j2);
      row.push_back(std::isnan(v) ? nlohmann::json() : nlohmann::json(v));
    }
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  j["config"]["ground_cost"] = detail::ground_to_json(table.ground);
  j["config"]["solver"] = detail::solver_to_json(table.solver);
  j["config"]["n_max"] = table.n_max;
  j["config"]["seed"] = table.seed;
  j["warnings"] = table.warnings;
  j["non_converged_solves"] = table.non_converged_solves;
  detail::write_json_file(j, path);
}

PairwiseDistanceTable read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty table file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();

  PairwiseDistanceTable table;
  std::size_t start = line.find(',');
  if (start == std::string::npos)
    throw DataError("malformed table header in " + path.string());
  while (start != std::string::npos) {
    const std::size_t end = line.find(',', start + 1);
    table.domain_ids.push_back(line.substr(start + 1, end == std::string::npos
                                                          ? std::string::npos
                                                          : end - start - 1));
    start = end;
  }

  const auto n = static_cast<Eigen::Index>(table.domain_ids.size());
  table.values = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= n) throw DataError("too many rows in table " + path.string());
    std::size_t pos = line.find(',');
    if (pos == std::string::npos) throw DataError("malformed table row in " + path.string());
    const std::string row_id = line.substr(0, pos);
    if (row_id != table.domain_ids[static_cast<std::size_t>(row)])
      throw DataError("table row order does not match header in " + path.string());
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::size_t end = line.find(',', pos + 1);
      const std::string tok = line.substr(pos + 1, end == std::string::npos
                                                       ? std::string::npos
                                                       : end - pos - 1);
      if (tok.empty() || tok == "nan" || tok == "NaN") {
        table.values(row, j) = std::numeric_limits<double>::quiet_NaN();
      } else {
        try {
          table.values(row, j) = std::stod(tok);
        } catch (const std::exception&) {
          throw DataError("malformed number '" + tok + "' in table " + path.string());
        }
      }
      pos = end;
      if (pos == std::string::npos && j + 1 < n)
        throw DataError("short row in table " + path.string());
    }
    ++row;
  }
  if (row != n) throw DataError("table row count does not match header in " + path.string());
  return table;
}

}  // namespace geospot
