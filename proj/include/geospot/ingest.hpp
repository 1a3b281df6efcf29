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

// Loading of domain datasets: a JSON manifest names the domains, and each
// domain contributes a coordinate CSV plus one matrix file per embedding
// space. Matrices may be headerless CSV or the GSPT binary format (magic
// "GSPT", two little-endian u64 for rows/cols, then row-major little-endian
// f64 values). All validation happens at load time; a loaded DomainDataset is
// immutable and safe to share across threads.

#ifndef GEOSPOT_INGEST_HPP_
#define GEOSPOT_INGEST_HPP_

#include <Eigen/Core>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "geospot/errors.hpp"

namespace geospot {

enum class SpaceKind { kFeature, kLocation };

SpaceKind parse_space_kind(const std::string& s);
std::string to_string(SpaceKind kind);

struct EmbeddingSpace {
  std::string name;
  Eigen::Index dimension = 0;
  SpaceKind kind = SpaceKind::kFeature;
};

struct DomainEntry {
  std::string id;
  std::filesystem::path sample_file;
  std::size_t sample_count = 0;
  // embedding-space name -> matrix file
  std::map<std::string, std::filesystem::path> embeddings;
};

struct DomainManifest {
  int manifest_version = 1;
  std::vector<EmbeddingSpace> embedding_spaces;
  std::vector<DomainEntry> domains;

  const EmbeddingSpace* find_space(const std::string& name) const;
  const DomainEntry* find_domain(const std::string& id) const;
};

// One loaded domain: coordinates in degrees plus row-aligned embedding
// matrices. Invariants enforced at load time: lat in [-90, 90], lon in
// [-180, 180], no NaN, every embedding matrix has the same row count as the
// coordinates, and no embedding row is all-zero.
struct DomainDataset {
  std::string id;
  Eigen::MatrixX2d coords;  // column 0 = lat, column 1 = lon
  std::map<std::string, Eigen::MatrixXd> embeddings;

  Eigen::Index size() const { return coords.rows(); }
  const Eigen::MatrixXd& embedding(const std::string& space) const;
};

// Parses and validates the manifest. Referenced files must exist and matrix
// headers must match the declared dimensions.
DomainManifest load_manifest(const std::filesystem::path& path);

// Loads one domain and checks every DomainDataset invariant.
DomainDataset load_domain(const DomainManifest& manifest, const std::string& id);

// --- matrix and coordinate IO ---

// Reads either format; the GSPT magic is sniffed from the first bytes.
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

// Writes the GSPT binary format plus a "<path>.json" sidecar carrying
// rows/cols. The sidecar is validated against the header when present.
void write_matrix_binary(const std::filesystem::path& path, const Eigen::MatrixXd& m);

// Headerless CSV of doubles, round-trip exact (17 significant digits).
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

Eigen::MatrixX2d read_coords_csv(const std::filesystem::path& path);
void write_coords_csv(const std::filesystem::path& path, const Eigen::MatrixX2d& coords);

// Shortest-exact decimal formatting used by every CSV writer, so repeated
// exports are byte-identical.
std::string format_double(double x);

}  // namespace geospot

#endif  // GEOSPOT_INGEST_HPP_
