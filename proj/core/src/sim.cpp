#include "hpgo/sim.hpp"

#include <cmath>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "hpgo/errors.hpp"

namespace hpgo {
namespace {

// Headings on the grid: +x, +y, -x, -y.
constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

Pose yaw_pose(double x, double y, int heading) {
  const double yaw = heading * M_PI / 2.0;
  return Pose(Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ())),
              Eigen::Vector3d(x, y, 0.0));
}

Matrix6d noise_information(double sigma_t, double sigma_r) {
  const double st = std::max(sigma_t, 1e-6);
  const double sr = std::max(sigma_r, 1e-6);
  Matrix6d info = Matrix6d::Zero();
  info.diagonal().head<3>().setConstant(1.0 / (st * st));
  info.diagonal().tail<3>().setConstant(1.0 / (sr * sr));
  return info;
}

void validate(const SimConfig& cfg) {
  if (cfg.nodes < 1) throw Error("need at least one node");
  if (cfg.step <= 0.0) throw Error("step must be positive");
  if (cfg.turn_prob < 0.0 || cfg.turn_prob > 1.0) throw Error("turn_prob out of range");
  if (cfg.loop_prob < 0.0 || cfg.loop_prob > 1.0) throw Error("loop_prob out of range");
  if (cfg.loop_min_gap < 1) throw Error("loop_min_gap must be positive");
  if (cfg.sigma_t < 0.0 || cfg.sigma_r < 0.0) throw Error("sigmas must be nonnegative");
}

}  // namespace

SimResult simulate(const SimConfig& cfg) {
  validate(cfg);
  std::mt19937_64 gen(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Matrix6d info = noise_information(cfg.sigma_t, cfg.sigma_r);

  auto noisy = [&](const Pose& true_rel) {
    Eigen::Vector3d nt, nr;
    for (int k = 0; k < 3; ++k) nt[k] = cfg.sigma_t * gauss(gen);
    for (int k = 0; k < 3; ++k) nr[k] = cfg.sigma_r * gauss(gen);
    return true_rel * Pose::exp(Twist(nt, nr));
  };

  const double radius =
      cfg.step * std::sqrt(static_cast<double>(cfg.nodes)) * 0.75;

  SimResult out;
  std::vector<int> heading_of(static_cast<std::size_t>(cfg.nodes), 0);
  std::map<std::pair<int, int>, std::vector<int>> cells;

  int ix = 0, iy = 0, heading = 0;
  Pose gt_prev = yaw_pose(0.0, 0.0, heading);
  Pose est_prev = gt_prev;
  out.ground_truth.emplace(0, gt_prev);
  out.graph.add_node(0, est_prev);
  heading_of[0] = heading;
  cells[{0, 0}].push_back(0);

  for (int i = 1; i < cfg.nodes; ++i) {
    const double x = ix * cfg.step;
    const double y = iy * cfg.step;
    const double u_turn = unif(gen);
    if (std::sqrt(x * x + y * y) > radius) {
      // Steer back in: face the axis direction that shrinks the distance most.
      if (std::abs(x) >= std::abs(y)) {
        heading = x > 0.0 ? 2 : 0;
      } else {
        heading = y > 0.0 ? 3 : 1;
      }
    } else if (u_turn < cfg.turn_prob) {
      heading = (heading + (unif(gen) < 0.5 ? 1 : 3)) % 4;
    }
    ix += kDx[heading];
    iy += kDy[heading];

    const Pose gt = yaw_pose(ix * cfg.step, iy * cfg.step, heading);
    out.ground_truth.emplace(i, gt);
    heading_of[static_cast<std::size_t>(i)] = heading;

    Edge odo;
    odo.from = i - 1;
    odo.to = i;
    odo.measurement = noisy(gt_prev.inverse() * gt);
    odo.information = info;
    est_prev = est_prev * odo.measurement;
    out.graph.add_node(i, est_prev);
    out.graph.add_edge(odo);

    if (unif(gen) < cfg.loop_prob) {
      const auto it = cells.find({ix, iy});
      if (it != cells.end()) {
        int match = -1;
        for (int j : it->second) {
          if (i - j < cfg.loop_min_gap) continue;
          const int diff = (heading - heading_of[static_cast<std::size_t>(j)] + 4) % 4;
          if (diff == 2) continue;  // opposing headings sit on the cut locus
          match = j;  // latest valid revisit wins
        }
        if (match >= 0) {
          Edge loop;
          loop.from = match;
          loop.to = i;
          loop.measurement =
              noisy(out.ground_truth.at(match).inverse() * gt);
          loop.information = info;
          out.graph.add_edge(loop);
        }
      }
    }

    cells[{ix, iy}].push_back(i);
    gt_prev = gt;
  }
  return out;
}

}  // namespace hpgo
