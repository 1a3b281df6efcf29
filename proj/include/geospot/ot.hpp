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

// Optimal transport solvers.
//
// exact_ot solves the transportation LP with a network-simplex pivot scheme
// on the bipartite basis tree; it exists as the reference oracle for the
// entropic solver and is cross-checked by brute-force permutation
// enumeration on tiny uniform instances. sinkhorn runs alternating scaling
// iterations, in the log domain by default, and reports the sharp transport
// cost <plan, cost> of the entropic plan. sinkhorn_divergence debiases it:
//
//   S(a, b) = OT_eps(a, b) - 1/2 OT_eps(a, a) - 1/2 OT_eps(b, b)
//
// with the three cost matrices built under one shared normalizer so that
// S(a, a) vanishes identically.

#ifndef GEOSPOT_OT_HPP_
#define GEOSPOT_OT_HPP_

#include <Eigen/Core>

#include "geospot/cost.hpp"

namespace geospot {

struct SinkhornConfig {
  double epsilon = 0.01;
  int max_iterations = 10000;  // cap on iterations at the target epsilon
  double tolerance = 1e-9;     // L1 marginal violation at convergence
  bool log_stabilized = true;
  // Warm-start the potentials by halving epsilon from 1.0 down to the target
  // (a fixed, deterministic schedule; log-stabilized mode only). Without it,
  // small epsilon values need orders of magnitude more iterations.
  bool epsilon_annealing = true;

  void validate() const;
};

struct TransportPlan {
  Eigen::MatrixXd matrix;  // n_s x n_t coupling, rows sum to a, cols to b
  double cost_value = 0.0;
  int iterations_used = 0;
  bool converged = false;
};

struct SolveDiagnostics {
  int iterations = 0;
  bool converged = false;
};

struct DivergenceDiagnostics {
  SolveDiagnostics cross, self_src, self_tgt;
  bool all_converged() const {
    return cross.converged && self_src.converged && self_tgt.converged;
  }
};

struct DistanceResult {
  double value = 0.0;  // = cross_cost - 0.5*self_cost_src - 0.5*self_cost_tgt
  double cross_cost = 0.0;
  double self_cost_src = 0.0;
  double self_cost_tgt = 0.0;
  GroundCostConfig ground;
  SinkhornConfig solver;
  DivergenceDiagnostics diagnostics;
};

// Exact LP optimum. Instances are capped at rows*cols <= 10000; weights must
// each sum to 1. The returned plan is an optimal basic solution.
TransportPlan exact_ot(const CostMatrix& cost, const Eigen::VectorXd& src_weights,
                       const Eigen::VectorXd& tgt_weights);

// Independent oracle for square instances with equal uniform marginals and
// n <= 8: minimum over all n! permutation couplings of the mean matched cost.
double exact_ot_enumerated(const CostMatrix& cost);

// Entropic OT by alternating scaling. Returns the last iterate with
// converged=false when the iteration cap is hit; throws SolverError only on
// numerical overflow (possible with log_stabilized=false). iterations_used
// counts all scaling updates, warm start included.
TransportPlan sinkhorn(const CostMatrix& cost, const Eigen::VectorXd& src_weights,
                       const Eigen::VectorXd& tgt_weights, const SinkhornConfig& config);

// Debiased divergence of two measures under the builder's ground cost.
DistanceResult sinkhorn_divergence(const EmpiricalMeasure& src, const EmpiricalMeasure& tgt,
                                   const PairCostBuilder& cost_builder,
                                   const SinkhornConfig& config);

}  // namespace geospot

#endif  // GEOSPOT_OT_HPP_
