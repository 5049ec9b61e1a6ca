#include "hpgo/sim.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "hpgo/errors.hpp"
#include "hpgo/g2o_io.hpp"
#include "hpgo/optimizer.hpp"

namespace hpgo {
namespace {

TEST(Sim, DeterministicForASeed) {
  SimConfig cfg;
  cfg.nodes = 300;
  cfg.seed = 77;
  const SimResult a = simulate(cfg);
  const SimResult b = simulate(cfg);
  EXPECT_EQ(write_g2o(a.graph), write_g2o(b.graph));
  EXPECT_EQ(write_trajectory(a.ground_truth), write_trajectory(b.ground_truth));
  cfg.seed = 78;
  const SimResult c = simulate(cfg);
  EXPECT_NE(write_g2o(a.graph), write_g2o(c.graph));
}

TEST(Sim, NodeAndIdSetsMatch) {
  SimConfig cfg;
  cfg.nodes = 150;
  const SimResult r = simulate(cfg);
  EXPECT_EQ(r.graph.node_count(), 150u);
  ASSERT_EQ(r.ground_truth.size(), 150u);
  for (const auto& [id, pose] : r.ground_truth) {
    EXPECT_TRUE(r.graph.has_node(id));
  }
}

TEST(Sim, ZeroNoiseIsExactlyConsistent) {
  SimConfig cfg;
  cfg.nodes = 400;
  cfg.sigma_t = 0.0;
  cfg.sigma_r = 0.0;
  cfg.seed = 3;
  const SimResult r = simulate(cfg);
  // Zero sigma is floored at 1e-6 when forming the information matrix, so
  // rounding dust in the exact measurements gets scaled by 1e12. The residual
  // itself is at machine precision; the objective just is not literally zero.
  EXPECT_LT(chi2(r.graph), 1e-12);
  for (const auto& [id, pose] : r.ground_truth) {
    EXPECT_LT(Pose::component_distance(r.graph.pose(id), pose), 1e-10);
  }
}

TEST(Sim, GroundTruthIsPlanarYawOnly) {
  SimConfig cfg;
  cfg.nodes = 250;
  cfg.seed = 4;
  const SimResult r = simulate(cfg);
  for (const auto& [id, pose] : r.ground_truth) {
    EXPECT_EQ(pose.translation().z(), 0.0);
    EXPECT_LT(std::abs(pose.rotation().x()), 1e-15);
    EXPECT_LT(std::abs(pose.rotation().y()), 1e-15);
  }
}

TEST(Sim, OdometryChainComplete) {
  SimConfig cfg;
  cfg.nodes = 200;
  cfg.seed = 5;
  const SimResult r = simulate(cfg);
  std::vector<bool> seen(200, false);
  for (const Edge& e : r.graph.edges()) {
    if (e.to == e.from + 1) seen[static_cast<std::size_t>(e.to)] = true;
  }
  for (int i = 1; i < 200; ++i) EXPECT_TRUE(seen[static_cast<std::size_t>(i)]);
}

TEST(Sim, LoopClosuresRespectMinimumGap) {
  SimConfig cfg;
  cfg.nodes = 1200;
  cfg.seed = 6;
  const SimResult r = simulate(cfg);
  int loops = 0;
  for (const Edge& e : r.graph.edges()) {
    if (e.to != e.from + 1) {
      ++loops;
      EXPECT_GE(e.to - e.from, cfg.loop_min_gap);
    }
  }
  EXPECT_GT(loops, 0);
}

TEST(Sim, InformationMatchesNoiseSigmas) {
  SimConfig cfg;
  cfg.nodes = 50;
  const SimResult r = simulate(cfg);
  for (const Edge& e : r.graph.edges()) {
    Matrix6d expect = Matrix6d::Zero();
    expect.diagonal().head<3>().setConstant(1.0 / (cfg.sigma_t * cfg.sigma_t));
    expect.diagonal().tail<3>().setConstant(1.0 / (cfg.sigma_r * cfg.sigma_r));
    EXPECT_EQ((e.information - expect).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Sim, OptimizationImprovesOnIntegratedOdometry) {
  SimConfig cfg;
  cfg.nodes = 600;
  cfg.seed = 12;
  const SimResult r = simulate(cfg);
  const MetricReport before =
      relative_errors(r.ground_truth, trajectory_of(r.graph));
  PoseGraph g = r.graph;
  optimize(g);
  const MetricReport after = relative_errors(r.ground_truth, trajectory_of(g));
  EXPECT_LT(after.ate, before.ate);
}

TEST(Sim, ConfigValidated) {
  SimConfig cfg;
  cfg.nodes = 0;
  EXPECT_THROW(simulate(cfg), Error);
  cfg = SimConfig();
  cfg.loop_prob = 1.5;
  EXPECT_THROW(simulate(cfg), Error);
  cfg = SimConfig();
  cfg.sigma_t = -0.1;
  EXPECT_THROW(simulate(cfg), Error);
}

}  // namespace
}  // namespace hpgo
