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

// Applicability maps: the distances from one reference domain to every other
// domain, min-max normalized into [0, 1] (all zeros when the range is
// degenerate), exported as plot-ready CSV or a GeoJSON FeatureCollection.

#ifndef GEOSPOT_MAPS_HPP_
#define GEOSPOT_MAPS_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "geospot/geospot.hpp"
#include "json.hpp"

namespace geospot {

struct MapEntry {
  std::string domain_id;
  double raw_distance = 0.0;
  double normalized = 0.0;
};

struct ApplicabilityMap {
  std::string reference_id;
  std::vector<MapEntry> entries;  // reference itself and NaN cells excluded
};

ApplicabilityMap build_map(const PairwiseDistanceTable& table, const std::string& reference_id);

enum class MapFormat { kCsv, kGeoJson };
MapFormat parse_map_format(const std::string& s);

struct GeoJsonOptions {
  // Geometry per domain id, taken from a user boundary file. Domains without
  // one fall back to a Point at their sample centroid.
  std::map<std::string, nlohmann::json> boundaries;
  std::map<std::string, std::array<double, 2>> centroids;  // id -> (lat, lon)
};

// Loads a GeoJSON FeatureCollection whose features carry a domain_id property.
std::map<std::string, nlohmann::json> load_boundaries(const std::filesystem::path& path);

// Unit-sphere mean of the sample coordinates, back-projected to (lat, lon).
std::array<double, 2> domain_centroid(const DomainDataset& dataset);

std::string map_to_csv(const ApplicabilityMap& map);
nlohmann::json map_to_geojson(const ApplicabilityMap& map, const GeoJsonOptions& options,
                              std::vector<std::string>* warnings);

// Writes the chosen format; returns warnings (missing boundaries).
std::vector<std::string> export_map(const ApplicabilityMap& map, MapFormat format,
                                    const std::filesystem::path& path,
                                    const GeoJsonOptions& options = {});

}  // namespace geospot

#endif  // GEOSPOT_MAPS_HPP_
