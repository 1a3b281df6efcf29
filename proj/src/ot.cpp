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

#include "geospot/ot.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <vector>

#include "geospot/errors.hpp"

namespace geospot {

namespace {

void check_weights(const Eigen::VectorXd& w, Eigen::Index expected, const char* side) {
  if (w.size() != expected)
    throw DataError(std::string(side) + " weight vector does not match cost matrix shape");
  if ((w.array() <= 0.0).any())
    throw DataError(std::string(side) + " weights must be strictly positive");
  if (std::abs(w.sum() - 1.0) > 1e-9)
    throw DataError(std::string(side) + " weights not summing to 1");
}

// ---------------------------------------------------------------------------
// Exact solver: simplex pivots on the transportation polytope.
//
// The basis is a spanning tree over the n row nodes and m column nodes with
// exactly n+m-1 basic cells. Entering and leaving arcs follow Bland's rule
// (first eligible in row-major order, lexicographic tie-break on the leaving
// flow), which rules out cycling on the degenerate bases that equal uniform
// marginals produce.
// ---------------------------------------------------------------------------

struct BasicCell {
  Eigen::Index i, j;
  double flow;
};

class TransportSimplex {
 public:
  TransportSimplex(const Eigen::MatrixXd& c, const Eigen::VectorXd& a, const Eigen::VectorXd& b)
      : c_(c), n_(c.rows()), m_(c.cols()), is_basic_(c.rows(), c.cols()) {
    is_basic_.setConstant(false);
    northwest_corner(a, b);
  }

  TransportPlan solve() {
    const double tol = 1e-12 * (1.0 + c_.cwiseAbs().maxCoeff());
    const long cap = 2000 + 20L * static_cast<long>(n_ * m_);
    long pivots = 0;
    Eigen::VectorXd u(n_), v(m_);
    for (;;) {
      compute_duals(u, v);
      const auto entering = find_entering(u, v, tol);
      if (!entering) break;
      if (++pivots > cap) throw SolverError("transport simplex pivot limit exceeded");
      pivot(entering->first, entering->second);
    }

    TransportPlan plan;
    plan.matrix = Eigen::MatrixXd::Zero(n_, m_);
    double value = 0.0;
    for (const auto& cell : basis_) {
      plan.matrix(cell.i, cell.j) = cell.flow;
      value += cell.flow * c_(cell.i, cell.j);
    }
    plan.cost_value = value;
    plan.iterations_used = static_cast<int>(pivots);
    plan.converged = true;
    return plan;
  }

 private:
  // Node ids: rows are [0, n), columns are [n, n+m).
  Eigen::Index col_node(Eigen::Index j) const { return n_ + j; }

  void northwest_corner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd ra = a, rb = b;
    Eigen::Index i = 0, j = 0;
    for (;;) {
      const double f = std::min(ra(i), rb(j));
      add_basic(i, j, f);
      ra(i) -= f;
      rb(j) -= f;
      if (i == n_ - 1 && j == m_ - 1) break;
      // On simultaneous exhaustion advance the row only; the next cell enters
      // the basis with zero flow, keeping the basis a spanning tree.
      if (ra(i) == 0.0 && i < n_ - 1)
        ++i;
      else
        ++j;
    }
  }

  void add_basic(Eigen::Index i, Eigen::Index j, double flow) {
    basis_.push_back({i, j, flow});
    is_basic_(i, j) = true;
  }

  void remove_basic(std::size_t k) {
    is_basic_(basis_[k].i, basis_[k].j) = false;
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(k));
  }

  std::vector<std::vector<std::pair<Eigen::Index, std::size_t>>> adjacency() const {
    std::vector<std::vector<std::pair<Eigen::Index, std::size_t>>> adj(
        static_cast<std::size_t>(n_ + m_));
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      const auto& cell = basis_[k];
      adj[static_cast<std::size_t>(cell.i)].push_back({col_node(cell.j), k});
      adj[static_cast<std::size_t>(col_node(cell.j))].push_back({cell.i, k});
    }
    return adj;
  }

  void compute_duals(Eigen::VectorXd& u, Eigen::VectorXd& v) const {
    const auto adj = adjacency();
    std::vector<char> seen(static_cast<std::size_t>(n_ + m_), 0);
    std::deque<Eigen::Index> queue;
    u(0) = 0.0;
    seen[0] = 1;
    queue.push_back(0);
    while (!queue.empty()) {
      const Eigen::Index node = queue.front();
      queue.pop_front();
      for (const auto& [next, k] : adj[static_cast<std::size_t>(node)]) {
        if (seen[static_cast<std::size_t>(next)]) continue;
        seen[static_cast<std::size_t>(next)] = 1;
        const auto& cell = basis_[k];
        if (next >= n_)
          v(next - n_) = c_(cell.i, cell.j) - u(cell.i);
        else
          u(next) = c_(cell.i, cell.j) - v(cell.j);
        queue.push_back(next);
      }
    }
  }

  std::optional<std::pair<Eigen::Index, Eigen::Index>> find_entering(const Eigen::VectorXd& u,
                                                                     const Eigen::VectorXd& v,
                                                                     double tol) const {
    for (Eigen::Index i = 0; i < n_; ++i)
      for (Eigen::Index j = 0; j < m_; ++j)
        if (!is_basic_(i, j) && c_(i, j) - u(i) - v(j) < -tol) return std::make_pair(i, j);
    return std::nullopt;
  }

  void pivot(Eigen::Index enter_i, Eigen::Index enter_j) {
    // Unique tree path from row enter_i to column enter_j; together with the
    // entering cell it closes the pivot cycle.
    const auto adj = adjacency();
    std::vector<std::pair<Eigen::Index, std::size_t>> parent(
        static_cast<std::size_t>(n_ + m_), {-1, 0});
    std::vector<char> seen(static_cast<std::size_t>(n_ + m_), 0);
    std::deque<Eigen::Index> queue;
    seen[static_cast<std::size_t>(enter_i)] = 1;
    queue.push_back(enter_i);
    const Eigen::Index target = col_node(enter_j);
    while (!queue.empty()) {
      const Eigen::Index node = queue.front();
      queue.pop_front();
      if (node == target) break;
      for (const auto& [next, k] : adj[static_cast<std::size_t>(node)]) {
        if (seen[static_cast<std::size_t>(next)]) continue;
        seen[static_cast<std::size_t>(next)] = 1;
        parent[static_cast<std::size_t>(next)] = {node, k};
        queue.push_back(next);
      }
    }

    // Walk back from the column node; cells at odd distance from the entering
    // cell carry '-' signs, even distance '+'.
    std::vector<std::size_t> path;
    for (Eigen::Index node = target; node != enter_i;) {
      const auto& [prev, k] = parent[static_cast<std::size_t>(node)];
      path.push_back(k);
      node = prev;
    }
    std::reverse(path.begin(), path.end());  // now ordered from enter_i to enter_j

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = 0;
    bool have_leaving = false;
    for (std::size_t step = 0; step < path.size(); ++step) {
      if (step % 2 != 0) continue;  // '+' cells
      const auto& cell = basis_[path[step]];
      const bool better =
          cell.flow < theta ||
          (cell.flow == theta && have_leaving &&
           std::make_pair(cell.i, cell.j) <
               std::make_pair(basis_[leaving].i, basis_[leaving].j));
      if (better) {
        theta = cell.flow;
        leaving = path[step];
        have_leaving = true;
      }
    }
    if (!have_leaving) throw SolverError("degenerate pivot cycle in transport simplex");

    for (std::size_t step = 0; step < path.size(); ++step) {
      if (step % 2 == 0)
        basis_[path[step]].flow -= theta;
      else
        basis_[path[step]].flow += theta;
    }
    basis_[leaving].flow = 0.0;
    remove_basic(leaving);
    add_basic(enter_i, enter_j, theta);
  }

  const Eigen::MatrixXd& c_;
  Eigen::Index n_, m_;
  std::vector<BasicCell> basis_;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> is_basic_;
};

// ---------------------------------------------------------------------------
// Entropic solver.
// ---------------------------------------------------------------------------

// One pass of alternating updates on scaled potentials fs = f/eps, gs = g/eps
// against the scaled cost cs = C/eps, i.e.
//   fs_i = log a_i - LSE_j(gs_j - cs_ij)
//   gs_j = log b_j - LSE_i(fs_i - cs_ij)
// cs comes in twice (column-major and transposed) so both reductions run down
// contiguous columns.
void scaling_pass(const Eigen::MatrixXd& cs, const Eigen::MatrixXd& cst,
                  const Eigen::VectorXd& loga, const Eigen::VectorXd& logb, Eigen::VectorXd& fs,
                  Eigen::VectorXd& gs) {
  const Eigen::Index n = cs.rows(), m = cs.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto x = (gs - cst.col(i)).array();
    const double mx = x.maxCoeff();
    fs(i) = loga(i) - (mx + std::log((x - mx).exp().sum()));
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto x = (fs - cs.col(j)).array();
    const double mx = x.maxCoeff();
    gs(j) = logb(j) - (mx + std::log((x - mx).exp().sum()));
  }
}

// L1 violation of both marginals for the plan implied by (fs, gs).
double marginal_violation(const Eigen::MatrixXd& cs, const Eigen::VectorXd& fs,
                          const Eigen::VectorXd& gs, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b) {
  const Eigen::Index m = cs.cols();
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(cs.rows());
  double col_viol = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::ArrayXd col = (fs.array() + gs(j) - cs.col(j).array()).exp();
    row_sums += col.matrix();
    col_viol += std::abs(col.sum() - b(j));
  }
  return (row_sums - a).cwiseAbs().sum() + col_viol;
}

TransportPlan finish_plan(const Eigen::MatrixXd& c, const Eigen::MatrixXd& cs,
                          const Eigen::VectorXd& fs, const Eigen::VectorXd& gs, int iterations,
                          bool converged) {
  TransportPlan plan;
  plan.matrix.resize(cs.rows(), cs.cols());
  for (Eigen::Index j = 0; j < cs.cols(); ++j)
    plan.matrix.col(j) = (fs.array() + gs(j) - cs.col(j).array()).exp();
  plan.cost_value = (plan.matrix.array() * c.array()).sum();
  plan.iterations_used = iterations;
  plan.converged = converged;
  return plan;
}

TransportPlan sinkhorn_log_domain(const Eigen::MatrixXd& c, const Eigen::VectorXd& a,
                                  const Eigen::VectorXd& b, const SinkhornConfig& cfg) {
  const Eigen::VectorXd loga = a.array().log();
  const Eigen::VectorXd logb = b.array().log();
  Eigen::VectorXd fs = Eigen::VectorXd::Zero(c.rows());
  Eigen::VectorXd gs = Eigen::VectorXd::Zero(c.cols());
  const Eigen::MatrixXd ct = c.transpose();
  int iterations = 0;

  if (cfg.epsilon_annealing && cfg.epsilon < 1.0) {
    // Fixed schedule: a handful of passes while halving epsilon from 1.0.
    // Potentials carry over between levels after unscaling.
    double level = 1.0;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(c.rows());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(c.cols());
    while (level > cfg.epsilon) {
      const Eigen::MatrixXd cs = c / level;
      const Eigen::MatrixXd cst = ct / level;
      fs = f / level;
      gs = g / level;
      for (int k = 0; k < 5; ++k) {
        scaling_pass(cs, cst, loga, logb, fs, gs);
        ++iterations;
      }
      f = fs * level;
      g = gs * level;
      level = std::max(cfg.epsilon, level * 0.5);
    }
    fs = f / cfg.epsilon;
    gs = g / cfg.epsilon;
  }

  const Eigen::MatrixXd cs = c / cfg.epsilon;
  const Eigen::MatrixXd cst = ct / cfg.epsilon;
  constexpr int kCheckEvery = 10;
  bool converged = false;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    scaling_pass(cs, cst, loga, logb, fs, gs);
    ++iterations;
    if ((it + 1) % kCheckEvery == 0 || it + 1 == cfg.max_iterations) {
      if (marginal_violation(cs, fs, gs, a, b) <= cfg.tolerance) {
        converged = true;
        break;
      }
    }
  }
  return finish_plan(c, cs, fs, gs, iterations, converged);
}

TransportPlan sinkhorn_plain(const Eigen::MatrixXd& c, const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b, const SinkhornConfig& cfg) {
  const Eigen::MatrixXd k = (-c / cfg.epsilon).array().exp();
  Eigen::VectorXd u = Eigen::VectorXd::Ones(c.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(c.cols());
  int iterations = 0;
  bool converged = false;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    u = a.array() / (k * v).array();
    v = b.array() / (k.transpose() * u).array();
    ++iterations;
    if (!u.allFinite() || !v.allFinite())
      throw SolverError("scaling overflow; use log_stabilized sinkhorn");
    const Eigen::MatrixXd plan = u.asDiagonal() * k * v.asDiagonal();
    if ((plan.rowwise().sum() - a).cwiseAbs().sum() +
            (plan.colwise().sum().transpose() - b).cwiseAbs().sum() <=
        cfg.tolerance) {
      converged = true;
      break;
    }
  }
  TransportPlan plan;
  plan.matrix = u.asDiagonal() * k * v.asDiagonal();
  plan.cost_value = (plan.matrix.array() * c.array()).sum();
  plan.iterations_used = iterations;
  plan.converged = converged;
  return plan;
}

}  // namespace

void SinkhornConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (max_iterations <= 0) throw ConfigError("max_iterations must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
}

TransportPlan exact_ot(const CostMatrix& cost, const Eigen::VectorXd& src_weights,
                       const Eigen::VectorXd& tgt_weights) {
  const auto& c = cost.values;
  if (c.rows() == 0 || c.cols() == 0) throw DataError("empty cost matrix");
  if (c.rows() * c.cols() > 10000)
    throw DataError("instance too large for the exact solver (rows*cols > 10000)");
  if (!c.allFinite()) throw DataError("cost matrix has non-finite entries");
  check_weights(src_weights, c.rows(), "source");
  check_weights(tgt_weights, c.cols(), "target");

  TransportSimplex solver(c, src_weights, tgt_weights);
  return solver.solve();
}

double exact_ot_enumerated(const CostMatrix& cost) {
  const auto& c = cost.values;
  const Eigen::Index n = c.rows();
  if (n != c.cols()) throw DataError("enumeration oracle needs a square instance");
  if (n < 1 || n > 8) throw DataError("enumeration oracle supports 1 <= n <= 8");

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += c(i, perm[static_cast<std::size_t>(i)]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

TransportPlan sinkhorn(const CostMatrix& cost, const Eigen::VectorXd& src_weights,
                       const Eigen::VectorXd& tgt_weights, const SinkhornConfig& config) {
  config.validate();
  const auto& c = cost.values;
  if (c.rows() == 0 || c.cols() == 0) throw DataError("empty cost matrix");
  if (!c.allFinite()) throw DataError("cost matrix has non-finite entries");
  check_weights(src_weights, c.rows(), "source");
  check_weights(tgt_weights, c.cols(), "target");

  return config.log_stabilized ? sinkhorn_log_domain(c, src_weights, tgt_weights, config)
                               : sinkhorn_plain(c, src_weights, tgt_weights, config);
}

DistanceResult sinkhorn_divergence(const EmpiricalMeasure& src, const EmpiricalMeasure& tgt,
                                   const PairCostBuilder& cost_builder,
                                   const SinkhornConfig& config) {
  const CostTriplet t = cost_builder.build(src, tgt);
  const TransportPlan cross = sinkhorn(t.cross, src.weights, tgt.weights, config);
  const TransportPlan self_s = sinkhorn(t.self_src, src.weights, src.weights, config);
  const TransportPlan self_t = sinkhorn(t.self_tgt, tgt.weights, tgt.weights, config);

  DistanceResult r;
  r.cross_cost = cross.cost_value;
  r.self_cost_src = self_s.cost_value;
  r.self_cost_tgt = self_t.cost_value;
  r.value = r.cross_cost - 0.5 * r.self_cost_src - 0.5 * r.self_cost_tgt;
  r.ground = cost_builder.config();
  r.solver = config;
  r.diagnostics.cross = {cross.iterations_used, cross.converged};
  r.diagnostics.self_src = {self_s.iterations_used, self_s.converged};
  r.diagnostics.self_tgt = {self_t.iterations_used, self_t.converged};
  return r;
}

}  // namespace geospot
