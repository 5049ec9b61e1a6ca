#pragma once

#include <cstdint>

#include "hpgo/metrics.hpp"
#include "hpgo/pose_graph.hpp"

namespace hpgo {

// Planar grid-walk world. The robot moves on a unit grid, turning now and
// then, steered back when it strays too far out; revisiting a grid cell may
// close a loop. Odometry and loop measurements carry Gaussian noise on the
// tangent space; loop candidates with opposing headings are skipped so that
// relative rotations stay away from the logarithm's cut locus.
struct SimConfig {
  int nodes = 1000;
  double step = 1.0;
  double turn_prob = 0.1;
  double loop_prob = 0.1;
  int loop_min_gap = 50;   // nodes that must pass before a cell can close a loop
  double sigma_t = 0.02;   // translation noise, per axis
  double sigma_r = 0.002;  // rotation noise, per axis, radians
  std::uint64_t seed = 1;
};

struct SimResult {
  // Noisy measurements with matching information matrices; node poses hold
  // the odometry-integrated initial guess.
  PoseGraph graph;
  Trajectory ground_truth;
};

SimResult simulate(const SimConfig& cfg);

}  // namespace hpgo
