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

#include "geospot/selection.hpp"

#include <atomic>
#include <fstream>
#include <thread>

#include "geospot/measures.hpp"
#include "geospot/rng.hpp"
#include "json_util.hpp"

namespace geospot {

namespace {

constexpr std::uint64_t kBudgetStream = 0x6275646765740000ull;  // distinct from subsampling

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

std::vector<std::string> SelectionTrace::chosen_ids() const {
  std::vector<std::string> ids;
  ids.reserve(steps.size());
  for (const auto& s : steps) ids.push_back(s.chosen_id);
  return ids;
}

SelectionTrace greedy_select(const std::vector<DomainDataset>& sources,
                             const DomainDataset& target, std::size_t k,
                             const GroundCostConfig& gcfg, const SinkhornConfig& scfg,
                             std::size_t n_max, std::uint64_t seed, int jobs) {
  if (sources.empty()) throw DataError("greedy selection needs at least one source domain");
  if (k < 1 || k > sources.size()) throw ConfigError("K out of range");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].id == target.id)
      throw DataError("target id collides with a source id: " + target.id);
    for (std::size_t j = i + 1; j < sources.size(); ++j)
      if (sources[i].id == sources[j].id)
        throw DataError("duplicate source id: " + sources[i].id);
  }

  const PairCostBuilder builder(gcfg);
  scfg.validate();

  // One subsample per domain for the whole run.
  const EmpiricalMeasure target_measure =
      subsample(to_measure(target), n_max, domain_seed(seed, target.id));
  std::vector<EmpiricalMeasure> source_measures;
  source_measures.reserve(sources.size());
  for (const auto& s : sources)
    source_measures.push_back(subsample(to_measure(s), n_max, domain_seed(seed, s.id)));

  SelectionTrace trace;
  trace.target_id = target.id;
  trace.ground = gcfg;
  trace.solver = scfg;
  trace.n_max = n_max;
  trace.seed = seed;

  std::vector<std::size_t> remaining(sources.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  std::vector<EmpiricalMeasure> chosen_measures;

  for (std::size_t step = 0; step < k; ++step) {
    std::vector<double> scores(remaining.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= remaining.size()) return;
        std::vector<EmpiricalMeasure> pool_input = chosen_measures;
        pool_input.push_back(source_measures[remaining[c]]);
        const EmpiricalMeasure pooled = pool(pool_input);
        scores[c] = sinkhorn_divergence(pooled, target_measure, builder, scfg).value;
      }
    };
    const int workers = std::min<int>(resolve_jobs(jobs), static_cast<int>(remaining.size()));
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      threads.reserve(static_cast<std::size_t>(workers));
      for (int t = 0; t < workers; ++t) threads.emplace_back(worker);
      for (auto& t : threads) t.join();
    }

    // argmin over candidates; strict '<' keeps the earliest on ties
    std::size_t best = 0;
    for (std::size_t c = 1; c < remaining.size(); ++c)
      if (scores[c] < scores[best]) best = c;

    SelectionStep rec;
    rec.chosen_id = sources[remaining[best]].id;
    rec.score = scores[best];
    for (std::size_t c = 0; c < remaining.size(); ++c)
      rec.candidate_scores[sources[remaining[c]].id] = scores[c];
    trace.steps.push_back(std::move(rec));

    chosen_measures.push_back(source_measures[remaining[best]]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return trace;
}

BudgetSample budget_sample(const SelectionTrace& trace,
                           const std::vector<DomainDataset>& sources, std::size_t budget,
                           std::uint64_t seed) {
  if (budget == 0) throw ConfigError("budget must be positive");
  const auto chosen = trace.chosen_ids();
  if (chosen.empty()) throw DataError("selection trace has no chosen domains");

  const std::size_t k = chosen.size();
  const std::size_t base = budget / k;
  const std::size_t remainder = budget % k;

  BudgetSample out;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t quota = base + (c < remainder ? 1 : 0);
    const DomainDataset* ds = nullptr;
    for (const auto& s : sources)
      if (s.id == chosen[c]) ds = &s;
    if (!ds) throw DataError("chosen domain '" + chosen[c] + "' not among sources");
    const auto avail = static_cast<std::size_t>(ds->size());
    if (avail < quota)
      throw DataError("insufficient data in domain '" + chosen[c] + "': need " +
                      std::to_string(quota) + ", have " + std::to_string(avail) +
                      " (shortfall " + std::to_string(quota - avail) + ")");
    const auto rows = sample_without_replacement(avail, quota,
                                                 domain_seed(seed, chosen[c], kBudgetStream));
    for (const auto r : rows)
      out.rows.emplace_back(chosen[c], static_cast<Eigen::Index>(r));
  }
  return out;
}

void write_trace_json(const SelectionTrace& trace, const std::filesystem::path& path) {
  nlohmann::json j;
  j["target_id"] = trace.target_id;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : trace.steps) {
    nlohmann::json js;
    js["chosen_id"] = s.chosen_id;
    js["score"] = s.score;
    js["candidate_scores"] = s.candidate_scores;
    steps.push_back(std::move(js));
  }
  j["steps"] = std::move(steps);
  j["config"]["ground_cost"] = detail::ground_to_json(trace.ground);
  j["config"]["solver"] = detail::solver_to_json(trace.solver);
  j["config"]["n_max"] = trace.n_max;
  j["config"]["seed"] = trace.seed;
  detail::write_json_file(j, path);
}

void write_samples_csv(const BudgetSample& sample, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "domain_id,row_index\n";
  for (const auto& [id, row] : sample.rows) out << id << ',' << row << '\n';
}

}  // namespace geospot
