#pragma once

#include <Eigen/SparseCore>

#include <set>
#include <string>
#include <vector>

#include "hpgo/pose_graph.hpp"

namespace hpgo {

struct OptConfig {
  int max_iterations = 20;
  // Relative objective decrease below which the run counts as converged.
  double convergence_tol = 1e-6;
  // Levenberg-Marquardt damping start value; 0 gives plain Gauss-Newton
  // steps until a step is rejected.
  double initial_lambda = 1e-4;
  // Multiplier applied to lambda on rejection, divisor on acceptance.
  double lambda_factor = 10.0;
  // Poses to hold constant. When empty, the lowest id of every connected
  // component is anchored to pin the gauge.
  std::set<NodeId> fixed_nodes;
};

struct OptReport {
  int iterations_run = 0;
  double chi2_initial = 0.0;
  double chi2_final = 0.0;
  bool converged = false;
  double wall_time_ms = 0.0;
  // Which stage of a larger schedule produced this report.
  std::string label;
};

// Normal equations accumulated over the free nodes, in the block order given
// by `free`: h is 6n x 6n with one 6x6 block per node pair sharing an edge,
// b stacks the gradient blocks J^T Omega e.
struct LinearSystem {
  std::vector<NodeId> free;
  Eigen::SparseMatrix<double> h;
  Eigen::VectorXd b;
};

// Constraint error e = log(zij^-1 * (xi^-1 * xj)).
Twist edge_error(const Pose& xi, const Pose& xj, const Pose& zij);

// Sum of e^T Omega e over all edges.
double chi2(const PoseGraph& g);

// Accumulates H = sum J^T Omega J and b = sum J^T Omega e over all edges
// with at least one endpoint in `free` (edges between two fixed nodes
// contribute nothing). Every id in `free` must be a node of the graph.
LinearSystem build_system(const PoseGraph& g, const std::vector<NodeId>& free);

// Solves (H + lambda * diag(H)) dx = -b by sparse Cholesky with a
// fill-reducing ordering. Throws NotPositiveDefiniteError when the damped
// matrix has no Cholesky factor.
Eigen::VectorXd solve_system(const LinearSystem& s, double lambda);

// Right-multiplies each free pose by exp of its 6-row increment slice.
void apply_increment(PoseGraph& g, const std::vector<NodeId>& free,
                     const Eigen::VectorXd& dx);

// Levenberg-Marquardt loop: build, solve, tentatively apply; accept when the
// objective decreases (lambda shrinks), otherwise revert (lambda grows).
// Accepted objectives are monotone and fixed poses are left bit-identical.
// Throws NoFixedGaugeError when some free component has no anchor.
OptReport optimize(PoseGraph& g, const OptConfig& cfg = {});

}  // namespace hpgo
