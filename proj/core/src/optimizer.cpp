#include "hpgo/optimizer.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <chrono>
#include <map>
#include <string>

namespace hpgo {
namespace {

void validate_config(const OptConfig& cfg) {
  if (cfg.max_iterations < 1) throw Error("max_iterations must be >= 1");
  if (cfg.convergence_tol < 0) throw Error("convergence_tol must be >= 0");
  if (cfg.initial_lambda < 0) throw Error("initial_lambda must be >= 0");
  if (cfg.lambda_factor <= 1) throw Error("lambda_factor must be > 1");
}

// Resolves the fixed set: the caller's choice verbatim, or one anchor (the
// lowest id) per connected component when none was given.
std::set<NodeId> resolve_fixed(const PoseGraph& g, const OptConfig& cfg) {
  if (cfg.fixed_nodes.empty()) {
    std::set<NodeId> anchors;
    for (const auto& component : g.connected_components()) {
      anchors.insert(component.front());
    }
    return anchors;
  }
  for (NodeId id : cfg.fixed_nodes) {
    if (!g.has_node(id)) {
      throw Error("fixed node " + std::to_string(id) + " is not in the graph");
    }
  }
  return cfg.fixed_nodes;
}

// Every connected component of the free subgraph must touch a fixed node,
// otherwise its gauge is unconstrained and H is singular.
void check_gauge(const PoseGraph& g, const std::set<NodeId>& fixed) {
  std::map<NodeId, bool> seen;
  for (const auto& [start, pose] : g.nodes()) {
    if (fixed.count(start) || seen[start]) continue;
    bool anchored = false;
    std::vector<NodeId> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      const NodeId id = stack.back();
      stack.pop_back();
      for (std::size_t index : g.edges_of(id)) {
        const Edge& e = g.edges()[index];
        const NodeId other = e.from == id ? e.to : e.from;
        if (fixed.count(other)) {
          anchored = true;
        } else if (!seen[other]) {
          seen[other] = true;
          stack.push_back(other);
        }
      }
    }
    if (!anchored) {
      throw NoFixedGaugeError("free component containing node " +
                              std::to_string(start) + " has no fixed anchor");
    }
  }
}

// Reorders the free nodes by approximate minimum degree on the block
// adjacency pattern, so the scalar factorization below fills in less.
std::vector<NodeId> amd_block_order(const PoseGraph& g,
                                    const std::vector<NodeId>& free) {
  const int n = static_cast<int>(free.size());
  if (n <= 2) return free;
  std::map<NodeId, int> index;
  for (int i = 0; i < n; ++i) index[free[i]] = i;
  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, 1.0);
  for (const Edge& e : g.edges()) {
    auto a = index.find(e.from);
    auto b = index.find(e.to);
    if (a == index.end() || b == index.end()) continue;
    triplets.emplace_back(a->second, b->second, 1.0);
    triplets.emplace_back(b->second, a->second, 1.0);
  }
  Eigen::SparseMatrix<double> pattern(n, n);
  pattern.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::AMDOrdering<int> amd;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
  amd(pattern, perm);
  std::vector<NodeId> ordered(free.size());
  for (int i = 0; i < n; ++i) ordered[perm.indices()(i)] = free[i];
  return ordered;
}

}  // namespace

Twist edge_error(const Pose& xi, const Pose& xj, const Pose& zij) {
  return (zij.inverse() * (xi.inverse() * xj)).log();
}

double chi2(const PoseGraph& g) {
  double sum = 0.0;
  for (const Edge& e : g.edges()) {
    const Vector6d err =
        edge_error(g.pose(e.from), g.pose(e.to), e.measurement).vector();
    sum += err.dot(e.information * err);
  }
  return sum;
}

LinearSystem build_system(const PoseGraph& g, const std::vector<NodeId>& free) {
  LinearSystem sys;
  sys.free = free;
  std::map<NodeId, int> index;
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (!g.has_node(free[i])) {
      throw Error("free node " + std::to_string(free[i]) +
                  " is not in the graph");
    }
    if (!index.emplace(free[i], static_cast<int>(i)).second) {
      throw Error("free node " + std::to_string(free[i]) + " listed twice");
    }
  }
  const int dim = static_cast<int>(6 * free.size());
  sys.b = Eigen::VectorXd::Zero(dim);
  std::vector<Eigen::Triplet<double>> triplets;
  auto add_block = [&triplets](int row, int col, const Matrix6d& block) {
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) {
        triplets.emplace_back(6 * row + r, 6 * col + c, block(r, c));
      }
    }
  };
  for (const Edge& e : g.edges()) {
    const auto ia = index.find(e.from);
    const auto ib = index.find(e.to);
    const bool free_a = ia != index.end();
    const bool free_b = ib != index.end();
    if (!free_a && !free_b) continue;
    const auto [ji, jj] =
        error_jacobians(g.pose(e.from), g.pose(e.to), e.measurement);
    const Vector6d err =
        edge_error(g.pose(e.from), g.pose(e.to), e.measurement).vector();
    const Vector6d omega_e = e.information * err;
    if (free_a) {
      add_block(ia->second, ia->second, ji.transpose() * e.information * ji);
      sys.b.segment<6>(6 * ia->second) += ji.transpose() * omega_e;
    }
    if (free_b) {
      add_block(ib->second, ib->second, jj.transpose() * e.information * jj);
      sys.b.segment<6>(6 * ib->second) += jj.transpose() * omega_e;
    }
    if (free_a && free_b) {
      const Matrix6d off = ji.transpose() * e.information * jj;
      add_block(ia->second, ib->second, off);
      add_block(ib->second, ia->second, off.transpose());
    }
  }
  sys.h.resize(dim, dim);
  sys.h.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

Eigen::VectorXd solve_system(const LinearSystem& s, double lambda) {
  if (lambda < 0) throw Error("lambda must be >= 0");
  Eigen::SparseMatrix<double> damped = s.h;
  for (int k = 0; k < damped.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(damped, k); it; ++it) {
      if (it.row() == it.col()) it.valueRef() *= (1.0 + lambda);
    }
  }
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(damped);
  if (solver.info() != Eigen::Success) {
    throw NotPositiveDefiniteError(
        "damped normal-equation matrix has no Cholesky factor");
  }
  Eigen::VectorXd dx = solver.solve(-s.b);
  // One refinement pass keeps the residual well under tolerance even on
  // badly scaled problems.
  dx += solver.solve(-s.b - damped * dx);
  return dx;
}

void apply_increment(PoseGraph& g, const std::vector<NodeId>& free,
                     const Eigen::VectorXd& dx) {
  if (dx.size() != static_cast<Eigen::Index>(6 * free.size())) {
    throw Error("increment size does not match the free set");
  }
  for (std::size_t i = 0; i < free.size(); ++i) {
    const Twist step(Vector6d(dx.segment<6>(static_cast<Eigen::Index>(6 * i))));
    g.set_pose(free[i], g.pose(free[i]) * Pose::exp(step));
  }
}

OptReport optimize(PoseGraph& g, const OptConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  validate_config(cfg);
  const std::set<NodeId> fixed = resolve_fixed(g, cfg);
  check_gauge(g, fixed);

  std::vector<NodeId> free;
  for (const auto& [id, pose] : g.nodes()) {
    if (!fixed.count(id)) free.push_back(id);
  }

  OptReport report;
  report.chi2_initial = chi2(g);
  report.chi2_final = report.chi2_initial;
  if (free.empty()) {
    report.converged = true;
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start)
            .count();
    return report;
  }
  free = amd_block_order(g, free);

  double lambda = cfg.initial_lambda;
  double chi2_cur = report.chi2_initial;
  LinearSystem sys;
  bool needs_build = true;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    report.iterations_run = iter;
    if (needs_build) {
      sys = build_system(g, free);
      needs_build = false;
    }
    if (sys.b.lpNorm<Eigen::Infinity>() <= 1e-13 * (1.0 + chi2_cur)) {
      report.converged = true;
      break;
    }
    Eigen::VectorXd dx;
    bool solved = false;
    for (int attempt = 0; attempt < 64 && !solved; ++attempt) {
      try {
        dx = solve_system(sys, lambda);
        solved = true;
      } catch (const NotPositiveDefiniteError&) {
        lambda = std::max(lambda * cfg.lambda_factor, 1e-10);
        if (lambda > 1e32) throw;
      }
    }
    if (!solved) {
      throw NotPositiveDefiniteError("damping failed to recover a factorable system");
    }

    std::vector<Pose> backup;
    backup.reserve(free.size());
    for (NodeId id : free) backup.push_back(g.pose(id));
    bool step_ok = false;
    double chi2_new = chi2_cur;
    try {
      apply_increment(g, free, dx);
      chi2_new = chi2(g);
      step_ok = chi2_new < chi2_cur;
    } catch (const AngleAtPiError&) {
      // Tentative step left the stable domain; treat it as rejected.
      step_ok = false;
    }
    if (step_ok) {
      const double decrease = (chi2_cur - chi2_new) / chi2_cur;
      chi2_cur = chi2_new;
      lambda /= cfg.lambda_factor;
      needs_build = true;
      if (decrease < cfg.convergence_tol) {
        report.converged = true;
        break;
      }
    } else {
      for (std::size_t i = 0; i < free.size(); ++i) {
        g.set_pose(free[i], backup[i]);
      }
      lambda = std::max(lambda * cfg.lambda_factor, 1e-10);
    }
  }

  report.chi2_final = chi2_cur;
  report.wall_time_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return report;
}

}  // namespace hpgo
