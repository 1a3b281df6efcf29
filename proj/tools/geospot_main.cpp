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

// geospot CLI: dist, matrix, select, correlate, map.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
// Every command writes effective_config.json into --out; that file fed back
// through --config replays the run.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geospot/analytics.hpp"
#include "geospot/geospot.hpp"
#include "geospot/maps.hpp"
#include "geospot/run_config.hpp"
#include "geospot/selection.hpp"
#include "json.hpp"

namespace {

using geospot::RunConfig;

struct CommonOpts {
  std::string config_file;
  std::string manifest;
  std::string feature;
  std::string location;
  double lambda = 0.0;
  double p = 2.0;
  std::string normalization;
  double epsilon = 0.01;
  int max_iterations = 10000;
  double tolerance = 1e-9;
  bool no_log_stabilized = false;
  bool no_epsilon_annealing = false;
  std::size_t n_max = 1000;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int jobs = 0;

  CLI::Option* o_manifest = nullptr;
  CLI::Option* o_feature = nullptr;
  CLI::Option* o_location = nullptr;
  CLI::Option* o_lambda = nullptr;
  CLI::Option* o_p = nullptr;
  CLI::Option* o_normalization = nullptr;
  CLI::Option* o_epsilon = nullptr;
  CLI::Option* o_max_iterations = nullptr;
  CLI::Option* o_tolerance = nullptr;
  CLI::Option* o_n_max = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_jobs = nullptr;
};

void add_common(CLI::App* sub, CommonOpts& o, bool needs_manifest) {
  sub->add_option("--config", o.config_file, "JSON config file; flags override its values");
  o.o_manifest = sub->add_option("--manifest", o.manifest, "domain manifest (JSON)");
  if (needs_manifest) o.o_manifest->check(CLI::ExistingFile);
  o.o_feature = sub->add_option("--feature", o.feature, "feature embedding space name");
  o.o_location =
      sub->add_option("--location", o.location, "'none', 'arc', or a location space name");
  o.o_lambda = sub->add_option("--lambda", o.lambda, "feature weight in [0,1] (default: 0.5 "
                                                     "with two modalities, else pinned)");
  o.o_p = sub->add_option("--p", o.p, "ground-cost exponent (default 2)");
  o.o_normalization = sub->add_option("--normalization", o.normalization,
                                      "per_component_max | joint_max | none");
  o.o_epsilon = sub->add_option("--epsilon", o.epsilon, "entropic regularization (default 0.01)");
  o.o_max_iterations = sub->add_option("--max-iterations", o.max_iterations, "solver cap");
  o.o_tolerance = sub->add_option("--tolerance", o.tolerance, "marginal L1 tolerance");
  sub->add_flag("--no-log-stabilized", o.no_log_stabilized, "use plain scaling iterations");
  sub->add_flag("--no-epsilon-annealing", o.no_epsilon_annealing, "disable solver warm start");
  o.o_n_max = sub->add_option("--n-max", o.n_max, "subsample cap per domain (default 1000)");
  o.o_seed = sub->add_option("--seed", o.seed, "RNG seed (default 0)");
  o.o_out = sub->add_option("--out", o.out_dir, "output directory (default 'out')");
  o.o_jobs = sub->add_option("--jobs", o.jobs, "worker threads (0 = hardware)");
}

RunConfig resolve_config(const CommonOpts& o) {
  RunConfig cfg;
  if (!o.config_file.empty()) cfg = RunConfig::from_file(o.config_file);
  if (o.o_manifest->count()) cfg.manifest = o.manifest;
  if (o.o_feature->count()) cfg.feature_space = o.feature;
  if (o.o_location->count()) cfg.location = o.location;
  if (o.o_lambda->count()) cfg.lambda = o.lambda;
  if (o.o_p->count()) cfg.p = o.p;
  if (o.o_normalization->count()) cfg.normalization = o.normalization;
  if (o.o_epsilon->count()) cfg.epsilon = o.epsilon;
  if (o.o_max_iterations->count()) cfg.max_iterations = o.max_iterations;
  if (o.o_tolerance->count()) cfg.tolerance = o.tolerance;
  if (o.no_log_stabilized) cfg.log_stabilized = false;
  if (o.no_epsilon_annealing) cfg.epsilon_annealing = false;
  if (o.o_n_max->count()) cfg.n_max = o.n_max;
  if (o.o_seed->count()) cfg.seed = o.seed;
  if (o.o_out->count()) cfg.out_dir = o.out_dir;
  if (o.o_jobs->count()) cfg.jobs = o.jobs;
  return cfg;
}

void write_effective_config(const RunConfig& cfg, const nlohmann::json& command) {
  std::filesystem::create_directories(cfg.out_dir);
  nlohmann::json j = cfg.to_json();
  j["command"] = command;
  std::ofstream out(cfg.out_dir / "effective_config.json", std::ios::trunc);
  out << j.dump(2) << "\n";
}

// Checks declared kinds when the spaces exist in the manifest.
void check_space_kinds(const geospot::DomainManifest& manifest,
                       const geospot::GroundCostConfig& g) {
  if (g.feature_space) {
    const auto* s = manifest.find_space(*g.feature_space);
    if (!s) throw geospot::DataError("unknown embedding space: " + *g.feature_space);
    if (s->kind != geospot::SpaceKind::kFeature)
      throw geospot::DataError("space '" + *g.feature_space + "' is not a feature space");
  }
  if (g.location_mode == geospot::LocationMode::kEmbedding) {
    const auto* s = manifest.find_space(g.location_space);
    if (!s) throw geospot::DataError("unknown embedding space: " + g.location_space);
    if (s->kind != geospot::SpaceKind::kLocation)
      throw geospot::DataError("space '" + g.location_space + "' is not a location space");
  }
}

nlohmann::json diagnostics_json(const geospot::DistanceResult& r) {
  nlohmann::json j;
  j["cross"] = {{"iterations", r.diagnostics.cross.iterations},
                {"converged", r.diagnostics.cross.converged}};
  j["self_src"] = {{"iterations", r.diagnostics.self_src.iterations},
                   {"converged", r.diagnostics.self_src.converged}};
  j["self_tgt"] = {{"iterations", r.diagnostics.self_tgt.iterations},
                   {"converged", r.diagnostics.self_tgt.converged}};
  return j;
}

int run_dist(const RunConfig& cfg, const std::string& src_id, const std::string& tgt_id) {
  const auto manifest = geospot::load_manifest(cfg.manifest);
  const auto gcfg = cfg.ground();
  const auto scfg = cfg.solver();
  check_space_kinds(manifest, gcfg);

  const auto src = geospot::load_domain(manifest, src_id);
  const auto tgt = geospot::load_domain(manifest, tgt_id);
  const auto result = geospot::geospot_distance(src, tgt, gcfg, scfg, cfg.n_max, cfg.seed);

  write_effective_config(cfg, {{"name", "dist"}, {"src", src_id}, {"tgt", tgt_id}});
  nlohmann::json j;
  j["src"] = src_id;
  j["tgt"] = tgt_id;
  j["value"] = result.value;
  j["cross_cost"] = result.cross_cost;
  j["self_cost_src"] = result.self_cost_src;
  j["self_cost_tgt"] = result.self_cost_tgt;
  j["diagnostics"] = diagnostics_json(result);
  std::ofstream out(cfg.out_dir / "distance.json", std::ios::trunc);
  out << j.dump(2) << "\n";

  std::cout << "GeoSpOT(" << src_id << ", " << tgt_id
            << ") = " << geospot::format_double(result.value) << "\n"
            << "  cross=" << geospot::format_double(result.cross_cost)
            << " self_src=" << geospot::format_double(result.self_cost_src)
            << " self_tgt=" << geospot::format_double(result.self_cost_tgt) << "\n"
            << "  converged=" << (result.diagnostics.all_converged() ? "yes" : "no") << "\n";
  return 0;
}

std::vector<double> parse_lambda_grid(const std::string& spec) {
  double start = 0.0, stop = 0.0, step = 0.0;
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw geospot::ConfigError("lambda grid must look like start:stop:step");
  try {
    start = std::stod(spec.substr(0, c1));
    stop = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(spec.substr(c2 + 1));
  } catch (const std::exception&) {
    throw geospot::ConfigError("malformed lambda grid: " + spec);
  }
  if (!(step > 0.0) || stop < start || start < 0.0 || stop > 1.0)
    throw geospot::ConfigError("lambda grid must satisfy 0 <= start <= stop <= 1, step > 0");
  std::vector<double> grid;
  const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i)
    grid.push_back(std::round((start + i * step) * 1e9) / 1e9);
  return grid;
}

int run_matrix(const RunConfig& cfg, const std::string& lambda_grid) {
  const auto manifest = geospot::load_manifest(cfg.manifest);
  const auto scfg = cfg.solver();

  std::vector<geospot::DomainInput> inputs;
  for (const auto& entry : manifest.domains) {
    geospot::DomainInput in;
    in.id = entry.id;
    try {
      in.data = std::make_shared<const geospot::DomainDataset>(
          geospot::load_domain(manifest, entry.id));
    } catch (const std::exception& e) {
      in.load_error = e.what();
    }
    inputs.push_back(std::move(in));
  }

  write_effective_config(cfg, {{"name", "matrix"}, {"lambda_grid", lambda_grid}});

  std::vector<double> lambdas;
  if (lambda_grid.empty())
    lambdas.push_back(cfg.resolved_lambda());
  else
    lambdas = parse_lambda_grid(lambda_grid);

  bool any_valid_pair = false;
  std::size_t warning_count = 0;
  for (const double lam : lambdas) {
    RunConfig run = cfg;
    run.lambda = lam;
    const auto gcfg = run.ground();
    check_space_kinds(manifest, gcfg);
    const auto table =
        geospot::pairwise_matrix(inputs, gcfg, scfg, cfg.n_max, cfg.seed, cfg.jobs);

    std::string suffix;
    if (!lambda_grid.empty()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "_lambda_%g", lam);
      suffix = buf;
    }
    geospot::write_table_csv(table, cfg.out_dir / ("distances" + suffix + ".csv"));
    geospot::write_table_json(table, cfg.out_dir / ("distances" + suffix + ".json"));

    warning_count += table.warnings.size();
    for (const auto& w : table.warnings) std::cerr << "warning: " << w << "\n";
    for (Eigen::Index i = 0; i < table.values.rows(); ++i)
      for (Eigen::Index j = 0; j < table.values.cols(); ++j)
        if (i != j && !std::isnan(table.values(i, j))) any_valid_pair = true;
  }

  std::cout << "wrote " << lambdas.size() << " table(s) over " << inputs.size()
            << " domains to " << cfg.out_dir.string() << " (" << warning_count
            << " warnings)\n";
  if (!any_valid_pair) {
    std::cerr << "error: all pairs failed\n";
    return 3;
  }
  return 0;
}

int run_select(const RunConfig& cfg, const std::string& target_id, std::size_t k,
               std::size_t budget) {
  const auto manifest = geospot::load_manifest(cfg.manifest);
  const auto gcfg = cfg.ground();
  const auto scfg = cfg.solver();
  check_space_kinds(manifest, gcfg);

  if (!manifest.find_domain(target_id))
    throw geospot::DataError("unknown domain: " + target_id);
  const auto target = geospot::load_domain(manifest, target_id);
  std::vector<geospot::DomainDataset> sources;
  for (const auto& entry : manifest.domains)
    if (entry.id != target_id) sources.push_back(geospot::load_domain(manifest, entry.id));

  const auto trace = geospot::greedy_select(sources, target, k, gcfg, scfg, cfg.n_max,
                                            cfg.seed, cfg.jobs);

  write_effective_config(
      cfg, {{"name", "select"}, {"target", target_id}, {"k", k}, {"budget", budget}});
  geospot::write_trace_json(trace, cfg.out_dir / "selection.json");
  if (budget > 0) {
    const auto sample = geospot::budget_sample(trace, sources, budget, cfg.seed);
    geospot::write_samples_csv(sample, cfg.out_dir / "samples.csv");
  }

  std::cout << "selected for target " << target_id << ":";
  for (const auto& step : trace.steps)
    std::cout << " " << step.chosen_id << " (" << geospot::format_double(step.score) << ")";
  std::cout << "\n";
  return 0;
}

int run_correlate(const RunConfig& cfg, const std::string& table_path,
                  const std::string& acc_path) {
  const auto table = geospot::read_table_csv(table_path);
  const auto acc = geospot::read_accuracy_csv(acc_path);
  const auto report = geospot::correlate(table, acc);

  write_effective_config(cfg,
                         {{"name", "correlate"}, {"table", table_path}, {"acc", acc_path}});
  geospot::write_report_json(report, cfg.out_dir / "report.json");
  geospot::write_pairs_csv(report, cfg.out_dir / "pairs.csv");

  std::cout << "n_pairs=" << report.n_pairs
            << " spearman_rho=" << geospot::format_double(report.spearman_rho)
            << " r_squared=" << geospot::format_double(report.r_squared)
            << " slope=" << geospot::format_double(report.slope)
            << " intercept=" << geospot::format_double(report.intercept) << "\n";
  return 0;
}

int run_map(const RunConfig& cfg, const std::string& table_path, const std::string& reference,
            const std::string& format_name, const std::string& boundaries_path) {
  const auto table = geospot::read_table_csv(table_path);
  const auto format = geospot::parse_map_format(format_name);
  const auto map = geospot::build_map(table, reference);

  geospot::GeoJsonOptions options;
  if (format == geospot::MapFormat::kGeoJson) {
    if (!boundaries_path.empty()) options.boundaries = geospot::load_boundaries(boundaries_path);
    if (cfg.manifest.empty())
      throw geospot::ConfigError("map --format geojson needs --manifest for centroids");
    const auto manifest = geospot::load_manifest(cfg.manifest);
    for (const auto& e : map.entries) {
      if (options.boundaries.count(e.domain_id)) continue;
      if (!manifest.find_domain(e.domain_id))
        throw geospot::DataError("domain '" + e.domain_id +
                                 "' not in manifest; cannot place its centroid");
      options.centroids[e.domain_id] =
          geospot::domain_centroid(geospot::load_domain(manifest, e.domain_id));
    }
  }

  write_effective_config(cfg, {{"name", "map"},
                               {"table", table_path},
                               {"ref", reference},
                               {"format", format_name},
                               {"boundaries", boundaries_path}});
  const auto filename = format == geospot::MapFormat::kCsv ? "map.csv" : "map.geojson";
  const auto warnings = geospot::export_map(map, format, cfg.out_dir / filename, options);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  std::cout << "wrote " << (cfg.out_dir / filename).string() << " with " << map.entries.size()
            << " entries\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GeoSpOT distances between geospatial domains"};
  app.require_subcommand(1);

  CommonOpts dist_opts, matrix_opts, select_opts, correlate_opts, map_opts;

  auto* dist = app.add_subcommand("dist", "distance between two domains");
  add_common(dist, dist_opts, true);
  std::string src_id, tgt_id;
  dist->add_option("--src", src_id, "source domain id")->required();
  dist->add_option("--tgt", tgt_id, "target domain id")->required();

  auto* matrix = app.add_subcommand("matrix", "pairwise distance table over the manifest");
  add_common(matrix, matrix_opts, true);
  std::string lambda_grid;
  matrix->add_option("--lambda-grid", lambda_grid, "start:stop:step sweep over lambda");

  auto* select = app.add_subcommand("select", "greedy source-domain selection");
  add_common(select, select_opts, true);
  std::string target_id;
  std::size_t k = 0, budget = 0;
  select->add_option("--target", target_id, "target domain id")->required();
  select->add_option("--k", k, "number of source domains")->required();
  select->add_option("--budget", budget, "total sample budget (writes samples.csv)");

  auto* correlate = app.add_subcommand("correlate", "correlate distances with accuracy deltas");
  add_common(correlate, correlate_opts, false);
  std::string table_path, acc_path;
  correlate->add_option("--table", table_path, "pairwise distance CSV")
      ->required()
      ->check(CLI::ExistingFile);
  correlate->add_option("--acc", acc_path, "accuracy CSV")->required()->check(CLI::ExistingFile);

  auto* mapcmd = app.add_subcommand("map", "applicability map from a reference domain");
  add_common(mapcmd, map_opts, false);
  std::string map_table, reference, format_name = "csv", boundaries;
  mapcmd->add_option("--table", map_table, "pairwise distance CSV")
      ->required()
      ->check(CLI::ExistingFile);
  mapcmd->add_option("--ref", reference, "reference domain id")->required();
  mapcmd->add_option("--format", format_name, "csv | geojson");
  mapcmd->add_option("--boundaries", boundaries, "GeoJSON boundaries keyed by domain_id")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (dist->parsed()) return run_dist(resolve_config(dist_opts), src_id, tgt_id);
    if (matrix->parsed()) return run_matrix(resolve_config(matrix_opts), lambda_grid);
    if (select->parsed())
      return run_select(resolve_config(select_opts), target_id, k, budget);
    if (correlate->parsed())
      return run_correlate(resolve_config(correlate_opts), table_path, acc_path);
    if (mapcmd->parsed())
      return run_map(resolve_config(map_opts), map_table, reference, format_name, boundaries);
  } catch (const geospot::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const geospot::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
