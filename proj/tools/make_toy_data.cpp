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

// Generates the bundled 5-domain toy dataset. Domains sit on a 1-D latent
// axis; feature embeddings drift with the latent, location embeddings are a
// smooth function of the coordinates, and the accuracy table encodes a
// transfer penalty that grows with latent separation. Deterministic: rerunning
// reproduces the files byte for byte.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "geospot/ingest.hpp"
#include "geospot/rng.hpp"
#include "json.hpp"

namespace {

struct ToyDomain {
  std::string id;
  double latent;
  double center_lat, center_lon;
  int samples;
};

const std::vector<ToyDomain> kDomains = {
    {"US", 0.00, 39.0, -98.0, 180}, {"FR", 0.25, 46.0, 2.0, 140},  {"CN", 0.50, 35.0, 104.0, 150},
    {"BR", 0.75, -10.0, -52.0, 160}, {"KE", 1.00, 0.5, 38.0, 170},
};

// Portable gaussian: Box-Muller over raw 53-bit uniforms.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : gen_(seed) {}
  double operator()() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_ = false;
};

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "data/toy";
  std::filesystem::create_directories(out);

  constexpr int kFeatureDim = 16;
  constexpr int kLocationDim = 8;
  constexpr double kDegToRad = std::numbers::pi / 180.0;

  // Fixed random Fourier weights for the location encoder stand-in.
  Gaussian wgen(12345);
  std::vector<std::array<double, 3>> fourier(kLocationDim);
  for (auto& w : fourier) w = {2.0 * wgen(), 2.0 * wgen(), 2.0 * std::numbers::pi * wgen()};

  nlohmann::json manifest;
  manifest["manifest_version"] = 1;
  manifest["embedding_spaces"] = {
      {{"name", "resnet50"}, {"dimension", kFeatureDim}, {"kind", "feature"}},
      {{"name", "geoclip"}, {"dimension", kLocationDim}, {"kind", "location"}},
  };
  manifest["domains"] = nlohmann::json::array();

  for (const auto& d : kDomains) {
    Gaussian g(geospot::domain_seed(7, d.id));
    const double angle = d.latent * std::numbers::pi / 3.0;

    Eigen::MatrixX2d coords(d.samples, 2);
    Eigen::MatrixXd features(d.samples, kFeatureDim);
    Eigen::MatrixXd locations(d.samples, kLocationDim);
    for (int i = 0; i < d.samples; ++i) {
      const double lat = std::clamp(d.center_lat + 3.0 * g(), -89.0, 89.0);
      const double lon = std::clamp(d.center_lon + 3.0 * g(), -179.0, 179.0);
      coords(i, 0) = lat;
      coords(i, 1) = lon;

      features(i, 0) = std::cos(angle) + 0.08 * g();
      features(i, 1) = std::sin(angle) + 0.08 * g();
      for (int c = 2; c < kFeatureDim; ++c) features(i, c) = 0.1 * g();

      for (int c = 0; c < kLocationDim; ++c) {
        const auto& w = fourier[static_cast<std::size_t>(c)];
        locations(i, c) =
            std::cos(w[0] * lat * kDegToRad + w[1] * lon * kDegToRad + w[2]) + 0.02 * g();
      }
      locations(i, 0) += 1.5;  // keep rows clear of the zero vector
    }

    const std::string coords_file = d.id + "_coords.csv";
    const std::string feat_file = d.id + "_resnet50.gspt";
    const std::string loc_file = d.id + "_geoclip.gspt";
    geospot::write_coords_csv(out / coords_file, coords);
    geospot::write_matrix_binary(out / feat_file, features);
    geospot::write_matrix_binary(out / loc_file, locations);

    nlohmann::json entry;
    entry["id"] = d.id;
    entry["sample_file"] = coords_file;
    entry["sample_count"] = d.samples;
    entry["embeddings"] = {{"resnet50", feat_file}, {"geoclip", loc_file}};
    manifest["domains"].push_back(std::move(entry));
  }

  {
    std::ofstream mf(out / "manifest.json", std::ios::trunc);
    mf << manifest.dump(2) << "\n";
  }

  // Accuracy table: in-domain accuracies on the diagonal, transfer accuracy
  // decaying with latent separation plus a little noise.
  {
    const std::vector<double> in_domain = {0.85, 0.80, 0.78, 0.83, 0.76};
    Gaussian g(999);
    std::ofstream acc(out / "accuracies.csv", std::ios::trunc);
    for (const auto& d : kDomains) acc << ',' << d.id;
    acc << '\n';
    for (std::size_t s = 0; s < kDomains.size(); ++s) {
      acc << kDomains[s].id;
      for (std::size_t t = 0; t < kDomains.size(); ++t) {
        double value = in_domain[t];
        if (s != t) {
          const double gap = std::abs(kDomains[s].latent - kDomains[t].latent);
          value *= std::max(0.3, 1.0 - 0.45 * gap + 0.02 * g());
        }
        acc << ',' << geospot::format_double(std::round(value * 1e4) / 1e4);
      }
      acc << '\n';
    }
  }

  // Rectangle boundaries for three of the five domains, so geojson export
  // exercises both the boundary path and the centroid fallback.
  {
    nlohmann::json fc;
    fc["type"] = "FeatureCollection";
    fc["features"] = nlohmann::json::array();
    const std::vector<std::pair<std::string, std::array<double, 4>>> boxes = {
        {"US", {-125.0, 25.0, -66.0, 49.0}},
        {"BR", {-74.0, -34.0, -34.0, 5.0}},
        {"CN", {73.0, 18.0, 135.0, 53.0}},
    };
    for (const auto& [id, b] : boxes) {
      nlohmann::json f;
      f["type"] = "Feature";
      f["properties"]["domain_id"] = id;
      f["geometry"]["type"] = "Polygon";
      f["geometry"]["coordinates"] = {{{b[0], b[1]}, {b[2], b[1]}, {b[2], b[3]},
                                       {b[0], b[3]}, {b[0], b[1]}}};
      fc["features"].push_back(std::move(f));
    }
    std::ofstream bf(out / "boundaries.geojson", std::ios::trunc);
    bf << fc.dump(2) << "\n";
  }

  std::cout << "wrote toy dataset to " << out.string() << "\n";
  return 0;
}
