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

#include "geospot/cost.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "geospot/errors.hpp"
#include "geospot/ingest.hpp"

namespace geospot {

namespace {

double pow_p(double d, double p) {
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

// Pairwise cosine distances. Norms and cross products use the same
// column-dot routine so that identical points give an exact zero.
Eigen::MatrixXd cosine_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) throw DataError("embedding dimension mismatch in cost matrix");
  const Eigen::MatrixXd at = a.transpose();
  const Eigen::MatrixXd bt = b.transpose();
  const Eigen::Index n = at.cols(), m = bt.cols();

  Eigen::VectorXd na(n), nb(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    na(i) = at.col(i).dot(at.col(i));
    if (na(i) == 0.0) throw DataError("zero embedding vector in cosine distance");
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    nb(j) = bt.col(j).dot(bt.col(j));
    if (nb(j) == 0.0) throw DataError("zero embedding vector in cosine distance");
  }

  Eigen::MatrixXd d(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = at.col(i).dot(bt.col(j)) / std::sqrt(na(i) * nb(j));
      d(i, j) = std::min(2.0, std::max(0.0, 1.0 - c));
    }
  }
  return d;
}

Eigen::MatrixXd arc_matrix(const Eigen::MatrixX2d& a, const Eigen::MatrixX2d& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      d(i, j) = arc_distance(a(i, 0), a(i, 1), b(j, 0), b(j, 1));
  return d;
}

struct RawPair {
  std::optional<Eigen::MatrixXd> feature;   // cosine distances, unit weight lambda
  std::optional<Eigen::MatrixXd> location;  // arc or cosine distances, weight 1-lambda
};

RawPair raw_distances(const EmpiricalMeasure& src, const EmpiricalMeasure& tgt,
                      const GroundCostConfig& cfg) {
  RawPair r;
  if (cfg.feature_active() && cfg.lambda > 0.0)
    r.feature = cosine_matrix(src.embedding(*cfg.feature_space), tgt.embedding(*cfg.feature_space));
  if (cfg.location_active() && cfg.lambda < 1.0) {
    if (cfg.location_mode == LocationMode::kArc)
      r.location = arc_matrix(src.coords, tgt.coords);
    else
      r.location =
          cosine_matrix(src.embedding(cfg.location_space), tgt.embedding(cfg.location_space));
  }
  return r;
}

Eigen::MatrixXd combine_pair(const RawPair& r, const Eigen::Index rows, const Eigen::Index cols,
                             const GroundCostConfig& cfg, double feat_norm, double loc_norm) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  if (r.feature) {
    const double s = feat_norm > 0.0 ? feat_norm : 1.0;
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i)
        out(i, j) += cfg.lambda * pow_p((*r.feature)(i, j) / s, cfg.p);
  }
  if (r.location) {
    const double s = loc_norm > 0.0 ? loc_norm : 1.0;
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i)
        out(i, j) += (1.0 - cfg.lambda) * pow_p((*r.location)(i, j) / s, cfg.p);
  }
  if (!out.allFinite()) throw SolverError("non-finite entry in cost matrix");
  return out;
}

void check_spaces(const EmpiricalMeasure& m, const GroundCostConfig& cfg) {
  if (cfg.feature_active() && !m.has_space(*cfg.feature_space))
    throw DataError("measure lacks required embedding space '" + *cfg.feature_space + "'");
  if (cfg.location_mode == LocationMode::kEmbedding && !m.has_space(cfg.location_space))
    throw DataError("measure lacks required embedding space '" + cfg.location_space + "'");
}

double matrix_max(const std::optional<Eigen::MatrixXd>& m) {
  return m && m->size() > 0 ? m->maxCoeff() : 0.0;
}

}  // namespace

std::string to_string(LocationMode m) {
  switch (m) {
    case LocationMode::kNone: return "none";
    case LocationMode::kArc: return "arc";
    case LocationMode::kEmbedding: return "embedding";
  }
  return "none";
}

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::kPerComponentMax: return "per_component_max";
    case Normalization::kJointMax: return "joint_max";
    case Normalization::kNone: return "none";
  }
  return "none";
}

LocationMode parse_location_mode(const std::string& s) {
  if (s == "none") return LocationMode::kNone;
  if (s == "arc") return LocationMode::kArc;
  if (s == "embedding") return LocationMode::kEmbedding;
  throw ConfigError("unknown location mode: " + s);
}

Normalization parse_normalization(const std::string& s) {
  if (s == "per_component_max") return Normalization::kPerComponentMax;
  if (s == "joint_max") return Normalization::kJointMax;
  if (s == "none") return Normalization::kNone;
  throw ConfigError("unknown normalization mode: " + s);
}

void GroundCostConfig::validate() const {
  if (!feature_active() && !location_active())
    throw ConfigError("ground cost needs at least one active modality");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  if (!(p >= 1.0)) throw ConfigError("p must be >= 1");
  if (!feature_active() && lambda != 0.0)
    throw ConfigError("lambda must be 0 when no feature space is configured");
  if (!location_active() && lambda != 1.0)
    throw ConfigError("lambda must be 1 when no location modality is configured");
  if (location_mode == LocationMode::kEmbedding && location_space.empty())
    throw ConfigError("location mode 'embedding' needs an embedding-space name");
  if (feature_active() && feature_space->empty())
    throw ConfigError("feature space name must be non-empty");
}

double cosine_distance(const Eigen::Ref<const Eigen::VectorXd>& u,
                       const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) throw DataError("cosine distance: dimension mismatch");
  const double nu = u.dot(u), nv = v.dot(v);
  if (nu == 0.0 || nv == 0.0) throw DataError("cosine distance undefined for a zero vector");
  const double c = u.dot(v) / std::sqrt(nu * nv);
  return std::min(2.0, std::max(0.0, 1.0 - c));
}

double arc_distance(double lat_a_deg, double lon_a_deg, double lat_b_deg, double lon_b_deg) {
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  const double phi1 = lat_a_deg * kDegToRad, phi2 = lat_b_deg * kDegToRad;
  const double dl = (lon_b_deg - lon_a_deg) * kDegToRad;
  const double sin_phi1 = std::sin(phi1), cos_phi1 = std::cos(phi1);
  const double sin_phi2 = std::sin(phi2), cos_phi2 = std::cos(phi2);
  const double sin_dl = std::sin(dl), cos_dl = std::cos(dl);

  const double y1 = cos_phi2 * sin_dl;
  const double y2 = cos_phi1 * sin_phi2 - sin_phi1 * cos_phi2 * cos_dl;
  const double x = sin_phi1 * sin_phi2 + cos_phi1 * cos_phi2 * cos_dl;
  return std::atan2(std::sqrt(y1 * y1 + y2 * y2), x);
}

double combine(double d_x, double d_l, double lambda, double p) {
  return lambda * pow_p(d_x, p) + (1.0 - lambda) * pow_p(d_l, p);
}

CostMatrix build_cost_matrix(const EmpiricalMeasure& src, const EmpiricalMeasure& tgt,
                             const GroundCostConfig& config) {
  config.validate();
  check_spaces(src, config);
  check_spaces(tgt, config);

  const RawPair raw = raw_distances(src, tgt, config);
  CostMatrix cm;
  cm.config = config;

  switch (config.normalization) {
    case Normalization::kPerComponentMax: {
      const double fn = matrix_max(raw.feature);
      const double ln = matrix_max(raw.location);
      cm.feature_normalizer = fn > 0.0 ? fn : 1.0;
      cm.location_normalizer = ln > 0.0 ? ln : 1.0;
      cm.values = combine_pair(raw, src.size(), tgt.size(), config, fn, ln);
      break;
    }
    case Normalization::kJointMax: {
      cm.values = combine_pair(raw, src.size(), tgt.size(), config, 0.0, 0.0);
      const double jm = cm.values.size() > 0 ? cm.values.maxCoeff() : 0.0;
      if (jm > 0.0) {
        cm.values /= jm;
        cm.normalizer = jm;
      }
      break;
    }
    case Normalization::kNone:
      cm.values = combine_pair(raw, src.size(), tgt.size(), config, 0.0, 0.0);
      break;
  }
  return cm;
}

PairCostBuilder::PairCostBuilder(GroundCostConfig config) : config_(std::move(config)) {
  config_.validate();
}

CostTriplet PairCostBuilder::build(const EmpiricalMeasure& src,
                                   const EmpiricalMeasure& tgt) const {
  check_spaces(src, config_);
  check_spaces(tgt, config_);

  const RawPair cross = raw_distances(src, tgt, config_);
  const RawPair self_s = raw_distances(src, src, config_);
  const RawPair self_t = raw_distances(tgt, tgt, config_);

  CostTriplet t;
  t.cross.config = t.self_src.config = t.self_tgt.config = config_;

  auto fill = [&](double feat_norm, double loc_norm) {
    t.cross.values = combine_pair(cross, src.size(), tgt.size(), config_, feat_norm, loc_norm);
    t.self_src.values = combine_pair(self_s, src.size(), src.size(), config_, feat_norm, loc_norm);
    t.self_tgt.values = combine_pair(self_t, tgt.size(), tgt.size(), config_, feat_norm, loc_norm);
  };

  switch (config_.normalization) {
    case Normalization::kPerComponentMax: {
      const double fn =
          std::max({matrix_max(cross.feature), matrix_max(self_s.feature), matrix_max(self_t.feature)});
      const double ln = std::max(
          {matrix_max(cross.location), matrix_max(self_s.location), matrix_max(self_t.location)});
      fill(fn, ln);
      for (auto* cm : {&t.cross, &t.self_src, &t.self_tgt}) {
        cm->feature_normalizer = fn > 0.0 ? fn : 1.0;
        cm->location_normalizer = ln > 0.0 ? ln : 1.0;
      }
      break;
    }
    case Normalization::kJointMax: {
      fill(0.0, 0.0);
      const double jm = std::max({t.cross.values.size() ? t.cross.values.maxCoeff() : 0.0,
                                  t.self_src.values.size() ? t.self_src.values.maxCoeff() : 0.0,
                                  t.self_tgt.values.size() ? t.self_tgt.values.maxCoeff() : 0.0});
      if (jm > 0.0) {
        t.cross.values /= jm;
        t.self_src.values /= jm;
        t.self_tgt.values /= jm;
        t.cross.normalizer = t.self_src.normalizer = t.self_tgt.normalizer = jm;
      }
      break;
    }
    case Normalization::kNone:
      fill(0.0, 0.0);
      break;
  }
  return t;
}

void dump_cost_matrix(const CostMatrix& cost, const std::filesystem::path& path) {
  write_matrix_binary(path, cost.values);
}

}  // namespace geospot
