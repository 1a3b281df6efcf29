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

#include "geospot/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace geospot {

namespace {

constexpr char kMagic[4] = {'G', 'S', 'P', 'T'};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_double(std::string_view tok, const std::filesystem::path& path, std::size_t line) {
  // trim spaces and a possible trailing CR
  while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r'))
    tok.remove_suffix(1);
  double v = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw DataError("malformed number '" + std::string(tok) + "' in " + path.string() +
                    " line " + std::to_string(line));
  }
  return v;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::uint64_t read_u64_le(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

void write_u64_le(std::ofstream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

Eigen::MatrixXd read_matrix_binary(const std::string& bytes, const std::filesystem::path& path) {
  if (bytes.size() < 20) throw DataError("truncated matrix file: " + path.string());
  const std::uint64_t rows = read_u64_le(bytes.data() + 4);
  const std::uint64_t cols = read_u64_le(bytes.data() + 12);
  if (rows > 0 && cols > (std::numeric_limits<std::uint64_t>::max() - 20) / 8 / rows)
    throw DataError("matrix header overflow in " + path.string());
  if (bytes.size() != 20 + 8 * rows * cols)
    throw DataError("matrix payload size mismatch in " + path.string());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const char* p = bytes.data() + 20;
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c) {
      double v;
      std::memcpy(&v, p, 8);
      p += 8;
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  // sidecar, when present, must agree with the header
  const std::filesystem::path sidecar = path.string() + ".json";
  if (std::filesystem::exists(sidecar)) {
    const auto j = nlohmann::json::parse(read_file(sidecar), nullptr, true, true);
    if (j.value("rows", rows) != rows || j.value("cols", cols) != cols)
      throw DataError("dimension mismatch between sidecar and header: " + path.string());
  }
  return m;
}

Eigen::MatrixXd read_matrix_csv(const std::string& text, const std::filesystem::path& path) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (start > text.size()) break;
      continue;
    }
    const auto toks = split_csv_line(line);
    std::vector<double> vals;
    vals.reserve(toks.size());
    for (const auto& t : toks) vals.push_back(parse_double(t, path, line_no));
    if (!rows.empty() && vals.size() != rows.front().size())
      throw DataError("ragged row in " + path.string() + " line " + std::to_string(line_no));
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

// Peeks at a matrix file just deep enough to learn its column count.
Eigen::Index probe_matrix_cols(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file: " + path.string());
  char head[20];
  in.read(head, 20);
  const auto got = in.gcount();
  if (got >= 4 && std::memcmp(head, kMagic, 4) == 0) {
    if (got < 20) throw DataError("truncated matrix file: " + path.string());
    return static_cast<Eigen::Index>(read_u64_le(head + 12));
  }
  // CSV: count commas on the first line
  in.clear();
  in.seekg(0);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty matrix file: " + path.string());
  return static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
}

}  // namespace

SpaceKind parse_space_kind(const std::string& s) {
  if (s == "feature") return SpaceKind::kFeature;
  if (s == "location") return SpaceKind::kLocation;
  throw DataError("unknown embedding-space kind: " + s);
}

std::string to_string(SpaceKind kind) {
  return kind == SpaceKind::kFeature ? "feature" : "location";
}

const EmbeddingSpace* DomainManifest::find_space(const std::string& name) const {
  for (const auto& s : embedding_spaces)
    if (s.name == name) return &s;
  return nullptr;
}

const DomainEntry* DomainManifest::find_domain(const std::string& id) const {
  for (const auto& d : domains)
    if (d.id == id) return &d;
  return nullptr;
}

const Eigen::MatrixXd& DomainDataset::embedding(const std::string& space) const {
  const auto it = embeddings.find(space);
  if (it == embeddings.end())
    throw DataError("domain '" + id + "' has no embedding space '" + space + "'");
  return it->second;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0)
    return read_matrix_binary(bytes, path);
  return read_matrix_csv(bytes, path);
}

void write_matrix_binary(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out.write(kMagic, 4);
  write_u64_le(out, static_cast<std::uint64_t>(m.rows()));
  write_u64_le(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      char buf[8];
      std::memcpy(buf, &v, 8);
      out.write(buf, 8);
    }
  }
  if (!out) throw DataError("write failed: " + path.string());
  out.close();

  nlohmann::json sidecar;
  sidecar["rows"] = static_cast<std::uint64_t>(m.rows());
  sidecar["cols"] = static_cast<std::uint64_t>(m.cols());
  std::ofstream side(path.string() + ".json", std::ios::trunc);
  side << sidecar.dump(2) << "\n";
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixX2d read_coords_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::size_t start = 0;
  std::size_t end = text.find('\n');
  if (end == std::string::npos) throw DataError("empty coordinate file: " + path.string());
  std::string header = text.substr(0, end);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != "lat,lon")
    throw DataError("coordinate CSV must start with header 'lat,lon': " + path.string());
  start = end + 1;

  std::vector<std::array<double, 2>> rows;
  std::size_t line_no = 1;
  while (start <= text.size()) {
    end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (start > text.size()) break;
      continue;
    }
    const auto toks = split_csv_line(line);
    if (toks.size() != 2)
      throw DataError("coordinate row must have exactly lat,lon in " + path.string() +
                      " line " + std::to_string(line_no));
    const double lat = parse_double(toks[0], path, line_no);
    const double lon = parse_double(toks[1], path, line_no);
    if (std::isnan(lat) || std::isnan(lon))
      throw DataError("NaN coordinate in " + path.string() + " line " + std::to_string(line_no));
    if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0)
      throw DataError("coordinate out of range in " + path.string() + " line " +
                      std::to_string(line_no));
    rows.push_back({lat, lon});
  }
  Eigen::MatrixX2d coords(static_cast<Eigen::Index>(rows.size()), 2);
  for (Eigen::Index r = 0; r < coords.rows(); ++r) {
    coords(r, 0) = rows[static_cast<std::size_t>(r)][0];
    coords(r, 1) = rows[static_cast<std::size_t>(r)][1];
  }
  return coords;
}

void write_coords_csv(const std::filesystem::path& path, const Eigen::MatrixX2d& coords) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "lat,lon\n";
  for (Eigen::Index r = 0; r < coords.rows(); ++r)
    out << format_double(coords(r, 0)) << ',' << format_double(coords(r, 1)) << '\n';
}

DomainManifest load_manifest(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();

  DomainManifest mf;
  try {
    mf.manifest_version = j.at("manifest_version").get<int>();
    for (const auto& js : j.at("embedding_spaces")) {
      EmbeddingSpace s;
      s.name = js.at("name").get<std::string>();
      s.dimension = js.at("dimension").get<Eigen::Index>();
      s.kind = parse_space_kind(js.at("kind").get<std::string>());
      if (s.name.empty()) throw DataError("embedding space with empty name");
      if (s.dimension <= 0)
        throw DataError("embedding space '" + s.name + "' must have positive dimension");
      if (mf.find_space(s.name))
        throw DataError("duplicate embedding space: " + s.name);
      mf.embedding_spaces.push_back(std::move(s));
    }
    for (const auto& jd : j.at("domains")) {
      DomainEntry d;
      d.id = jd.at("id").get<std::string>();
      if (d.id.empty()) throw DataError("domain with empty id");
      if (mf.find_domain(d.id)) throw DataError("duplicate domain id: " + d.id);
      d.sample_file = base / jd.at("sample_file").get<std::string>();
      d.sample_count = jd.at("sample_count").get<std::size_t>();
      for (const auto& [space, file] : jd.at("embeddings").items())
        d.embeddings[space] = base / file.get<std::string>();
      mf.domains.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + path.string() + ": " + e.what());
  }

  // referenced files must exist; embedding widths must match declarations
  for (const auto& d : mf.domains) {
    if (!std::filesystem::exists(d.sample_file))
      throw DataError("missing file: " + d.sample_file.string());
    for (const auto& [space, file] : d.embeddings) {
      const auto* s = mf.find_space(space);
      if (!s)
        throw DataError("domain '" + d.id + "' references undeclared embedding space '" +
                        space + "'");
      if (!std::filesystem::exists(file)) throw DataError("missing file: " + file.string());
      const Eigen::Index cols = probe_matrix_cols(file);
      if (cols != s->dimension)
        throw DataError("dimension mismatch for '" + space + "' in domain '" + d.id +
                        "': declared " + std::to_string(s->dimension) + ", file has " +
                        std::to_string(cols));
    }
  }
  return mf;
}

DomainDataset load_domain(const DomainManifest& manifest, const std::string& id) {
  const DomainEntry* entry = manifest.find_domain(id);
  if (!entry) throw DataError("unknown domain: " + id);

  DomainDataset ds;
  ds.id = id;
  ds.coords = read_coords_csv(entry->sample_file);
  if (static_cast<std::size_t>(ds.coords.rows()) != entry->sample_count)
    throw DataError("row-count mismatch for domain '" + id + "': manifest declares " +
                    std::to_string(entry->sample_count) + " samples, file has " +
                    std::to_string(ds.coords.rows()));

  for (const auto& [space, file] : entry->embeddings) {
    Eigen::MatrixXd m = read_matrix(file);
    if (m.rows() != ds.coords.rows())
      throw DataError("row-count mismatch for '" + space + "' in domain '" + id + "': " +
                      std::to_string(m.rows()) + " embedding rows vs " +
                      std::to_string(ds.coords.rows()) + " coordinates");
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (!m.row(r).allFinite())
        throw DataError("non-finite embedding value in '" + space + "' of domain '" + id +
                        "' row " + std::to_string(r));
      if ((m.row(r).array() == 0.0).all())
        throw DataError("zero embedding row in '" + space + "' of domain '" + id + "' row " +
                        std::to_string(r));
    }
    ds.embeddings.emplace(space, std::move(m));
  }
  return ds;
}

}  // namespace geospot
