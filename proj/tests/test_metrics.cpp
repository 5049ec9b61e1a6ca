#include "hpgo/metrics.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hpgo/errors.hpp"

namespace hpgo {
namespace {

Pose tx(double x) {
  return Pose(Eigen::Quaterniond::Identity(), Eigen::Vector3d(x, 0.0, 0.0));
}

Trajectory straight_line(int n, double scale) {
  Trajectory t;
  for (int i = 0; i < n; ++i) t.emplace(i, tx(scale * i));
  return t;
}

TEST(Metrics, IdenticalTrajectoriesScoreExactlyZero) {
  const Trajectory gt = straight_line(50, 1.0);
  const MetricReport r = relative_errors(gt, gt, {10.0});
  EXPECT_EQ(r.ate, 0.0);
  EXPECT_EQ(r.are, 0.0);
  EXPECT_GT(r.n_pairs, 0);
}

TEST(Metrics, InvariantUnderGlobalRigidTransform) {
  std::mt19937_64 gen(51);
  std::normal_distribution<double> g(0.0, 1.0);
  Trajectory gt;
  Pose cur = Pose::identity();
  for (int i = 0; i < 60; ++i) {
    gt.emplace(i, cur);
    cur = cur * Pose::exp(Twist(
              Eigen::Vector3d(1.0, 0.1 * g(gen), 0.0),
              Eigen::Vector3d(0.0, 0.0, 0.05 * g(gen))));
  }
  const Pose shift(Eigen::Quaterniond(Eigen::AngleAxisd(
                       1.2, Eigen::Vector3d::UnitZ())),
                   Eigen::Vector3d(5.0, -3.0, 2.0));
  Trajectory moved;
  for (const auto& [id, pose] : gt) moved.emplace(id, shift * pose);
  const MetricReport r = relative_errors(gt, moved, {7.0});
  EXPECT_LT(r.ate, 1e-12);
  EXPECT_LT(r.are, 1e-12);
}

TEST(Metrics, ScaledStraightLineGivesExactAte) {
  const Trajectory gt = straight_line(101, 1.0);
  const Trajectory est = straight_line(101, 1.01);
  const MetricReport r = relative_errors(gt, est, {10.0});
  EXPECT_NEAR(r.ate, 0.01, 1e-9);
  EXPECT_LT(r.are, 1e-12);
  EXPECT_EQ(r.n_pairs, 91);
}

TEST(Metrics, SinglePairClosedForms) {
  Trajectory gt;
  gt.emplace(0, Pose::identity());
  gt.emplace(1, tx(10.0));
  {
    Trajectory est;
    est.emplace(0, Pose::identity());
    est.emplace(1, tx(10.5));
    const MetricReport r = relative_errors(gt, est, {10.0});
    EXPECT_EQ(r.n_pairs, 1);
    EXPECT_NEAR(r.ate, 0.05, 1e-12);
    EXPECT_LT(r.are, 1e-12);
  }
  {
    Trajectory est;
    est.emplace(0, Pose::identity());
    est.emplace(1, Pose(Eigen::Quaterniond(Eigen::AngleAxisd(
                            0.05, Eigen::Vector3d::UnitZ())),
                        Eigen::Vector3d(10.0, 0.0, 0.0)));
    const MetricReport r = relative_errors(gt, est, {10.0});
    EXPECT_EQ(r.n_pairs, 1);
    EXPECT_LT(r.ate, 1e-12);
    EXPECT_NEAR(r.are, 0.005, 1e-12);
  }
}

TEST(Metrics, MismatchedIdsRejected) {
  Trajectory a = straight_line(5, 1.0);
  Trajectory b = straight_line(5, 1.0);
  b.erase(4);
  b.emplace(9, tx(9.0));
  EXPECT_THROW(relative_errors(a, b, {1.0}), MismatchedIdsError);
  b.erase(9);
  EXPECT_THROW(relative_errors(a, b, {1.0}), MismatchedIdsError);
}

TEST(Metrics, PathTooShortRejected) {
  Trajectory stacked;
  stacked.emplace(0, Pose::identity());
  stacked.emplace(1, Pose::identity());  // zero path length
  EXPECT_THROW(relative_errors(stacked, stacked), PathTooShortError);
  const Trajectory gt = straight_line(3, 1.0);  // length 2
  EXPECT_THROW(relative_errors(gt, gt, {100.0}), PathTooShortError);
  Trajectory one;
  one.emplace(0, Pose::identity());
  EXPECT_THROW(relative_errors(one, one), PathTooShortError);
}

TEST(Metrics, DefaultSegmentsFollowPathLength) {
  const Trajectory long_path = straight_line(901, 1.0);  // length 900
  const std::vector<double> a = default_segments(long_path);
  ASSERT_EQ(a.size(), 8u);
  EXPECT_DOUBLE_EQ(a.front(), 100.0);
  EXPECT_DOUBLE_EQ(a.back(), 800.0);
  const Trajectory short_path = straight_line(11, 1.0);  // length 10
  const std::vector<double> b = default_segments(short_path);
  ASSERT_EQ(b.size(), 8u);
  EXPECT_DOUBLE_EQ(b.front(), 1.0);
  EXPECT_DOUBLE_EQ(b.back(), 8.0);
}

TEST(Metrics, TrajectoryTextRoundTrip) {
  std::mt19937_64 gen(52);
  std::normal_distribution<double> g(0.0, 1.0);
  Trajectory t;
  for (int i = 0; i < 20; ++i) {
    t.emplace(3 * i, Pose::exp(Twist(
                         Eigen::Vector3d(g(gen), g(gen), g(gen)),
                         0.4 * Eigen::Vector3d(g(gen), g(gen), g(gen)))));
  }
  const Trajectory back = parse_trajectory(write_trajectory(t));
  ASSERT_EQ(back.size(), t.size());
  for (const auto& [id, pose] : t) {
    ASSERT_TRUE(back.count(id));
    EXPECT_LT(Pose::component_distance(back.at(id), pose), 1e-12);
  }
}

TEST(Metrics, ParsesHandWrittenLine) {
  const Trajectory t = parse_trajectory("3 1 2 3 0 0 0 1\n");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.at(3).translation(), Eigen::Vector3d(1, 2, 3));
  EXPECT_THROW(parse_trajectory("4 1 2\n"), MalformedLineError);
  EXPECT_THROW(load_trajectory("/definitely/not/here.tum"), Error);
}

TEST(Metrics, TrajectoryOfReadsGraphPoses) {
  PoseGraph g;
  g.add_node(2, tx(2.0));
  g.add_node(1, tx(1.0));
  const Trajectory t = trajectory_of(g);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(Pose::component_distance(t.at(1), g.pose(1)), 0.0);
  EXPECT_EQ(Pose::component_distance(t.at(2), g.pose(2)), 0.0);
}

TEST(Metrics, FileRoundTrip) {
  const Trajectory t = straight_line(7, 2.0);
  const std::string path = testing::TempDir() + "hpgo_traj.tum";
  save_trajectory(t, path);
  const Trajectory back = load_trajectory(path);
  ASSERT_EQ(back.size(), t.size());
  for (const auto& [id, pose] : t) {
    EXPECT_LT(Pose::component_distance(back.at(id), pose), 1e-12);
  }
}

}  // namespace
}  // namespace hpgo
