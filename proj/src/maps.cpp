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

#include "geospot/maps.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "geospot/ingest.hpp"
#include "json_util.hpp"

namespace geospot {

ApplicabilityMap build_map(const PairwiseDistanceTable& table, const std::string& reference_id) {
  const Eigen::Index ref = table.index_of(reference_id);
  if (ref < 0) throw DataError("unknown reference domain: " + reference_id);

  ApplicabilityMap map;
  map.reference_id = reference_id;
  for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
    if (j == ref) continue;
    const double v = table.values(ref, j);
    if (std::isnan(v)) continue;
    map.entries.push_back({table.domain_ids[static_cast<std::size_t>(j)], v, 0.0});
  }
  if (map.entries.empty())
    throw DataError("no valid distances from reference domain: " + reference_id);

  double lo = map.entries.front().raw_distance, hi = lo;
  for (const auto& e : map.entries) {
    lo = std::min(lo, e.raw_distance);
    hi = std::max(hi, e.raw_distance);
  }
  // Degenerate range (single entry or all equal): everything maps to 0.
  const double span = hi - lo;
  for (auto& e : map.entries)
    e.normalized = span > 0.0 ? (e.raw_distance - lo) / span : 0.0;
  return map;
}

MapFormat parse_map_format(const std::string& s) {
  if (s == "csv") return MapFormat::kCsv;
  if (s == "geojson") return MapFormat::kGeoJson;
  throw ConfigError("unknown map format: " + s);
}

std::map<std::string, nlohmann::json> load_boundaries(const std::filesystem::path& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  if (j.value("type", "") != "FeatureCollection")
    throw DataError("boundary file is not a GeoJSON FeatureCollection: " + path.string());
  std::map<std::string, nlohmann::json> out;
  for (const auto& f : j.value("features", nlohmann::json::array())) {
    if (!f.contains("properties") || !f["properties"].contains("domain_id")) continue;
    out[f["properties"]["domain_id"].get<std::string>()] = f.value("geometry", nlohmann::json());
  }
  return out;
}

std::array<double, 2> domain_centroid(const DomainDataset& dataset) {
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  double x = 0.0, y = 0.0, z = 0.0;
  for (Eigen::Index r = 0; r < dataset.coords.rows(); ++r) {
    const double phi = dataset.coords(r, 0) * kDegToRad;
    const double lam = dataset.coords(r, 1) * kDegToRad;
    x += std::cos(phi) * std::cos(lam);
    y += std::cos(phi) * std::sin(lam);
    z += std::sin(phi);
  }
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (norm == 0.0) {
    // Antipodally balanced cloud; fall back to the plain mean.
    return {dataset.coords.col(0).mean(), dataset.coords.col(1).mean()};
  }
  const double lat = std::asin(z / norm) / kDegToRad;
  const double lon = std::atan2(y, x) / kDegToRad;
  return {lat, lon};
}

std::string map_to_csv(const ApplicabilityMap& map) {
  std::ostringstream out;
  out << "domain_id,raw_distance,normalized\n";
  for (const auto& e : map.entries)
    out << e.domain_id << ',' << format_double(e.raw_distance) << ','
        << format_double(e.normalized) << '\n';
  return out.str();
}

nlohmann::json map_to_geojson(const ApplicabilityMap& map, const GeoJsonOptions& options,
                              std::vector<std::string>* warnings) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& e : map.entries) {
    nlohmann::json feature;
    feature["type"] = "Feature";

    const auto boundary = options.boundaries.find(e.domain_id);
    if (boundary != options.boundaries.end() && !boundary->second.is_null()) {
      feature["geometry"] = boundary->second;
    } else {
      if (!options.boundaries.empty() && warnings)
        warnings->push_back("no boundary for domain '" + e.domain_id +
                            "', falling back to centroid point");
      const auto centroid = options.centroids.find(e.domain_id);
      if (centroid == options.centroids.end())
        throw DataError("no geometry or centroid available for domain '" + e.domain_id + "'");
      feature["geometry"]["type"] = "Point";
      // GeoJSON positions are [lon, lat]
      feature["geometry"]["coordinates"] = {centroid->second[1], centroid->second[0]};
    }
    feature["properties"]["domain_id"] = e.domain_id;
    feature["properties"]["raw_distance"] = e.raw_distance;
    feature["properties"]["normalized"] = e.normalized;
    features.push_back(std::move(feature));
  }

  nlohmann::json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = std::move(features);
  return fc;
}

std::vector<std::string> export_map(const ApplicabilityMap& map, MapFormat format,
                                    const std::filesystem::path& path,
                                    const GeoJsonOptions& options) {
  std::vector<std::string> warnings;
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  if (format == MapFormat::kCsv) {
    out << map_to_csv(map);
  } else {
    out << map_to_geojson(map, options, &warnings).dump(2) << "\n";
  }
  return warnings;
}

}  // namespace geospot
