#include "hpgo/pose_graph.hpp"

#include <random>

#include <gtest/gtest.h>

#include "hpgo/errors.hpp"

namespace hpgo {
namespace {

Pose translated(double x, double y, double z) {
  return Pose(Eigen::Quaterniond::Identity(), Eigen::Vector3d(x, y, z));
}

Edge make_edge(NodeId a, NodeId b) {
  Edge e;
  e.from = a;
  e.to = b;
  return e;
}

TEST(PoseGraph, NodesIterateAscending) {
  PoseGraph g;
  g.add_node(5, translated(5, 0, 0));
  g.add_node(1, translated(1, 0, 0));
  g.add_node(3, translated(3, 0, 0));
  ASSERT_EQ(g.node_count(), 3u);
  std::vector<NodeId> seen;
  for (const auto& [id, pose] : g.nodes()) seen.push_back(id);
  EXPECT_EQ(seen, (std::vector<NodeId>{1, 3, 5}));
  EXPECT_TRUE(g.has_node(3));
  EXPECT_FALSE(g.has_node(2));
  EXPECT_EQ(g.pose(5).translation().x(), 5.0);
}

TEST(PoseGraph, DuplicateAndNegativeIdsRejected) {
  PoseGraph g;
  g.add_node(0, Pose::identity());
  EXPECT_THROW(g.add_node(0, Pose::identity()), DuplicateNodeError);
  EXPECT_THROW(g.add_node(-1, Pose::identity()), Error);
}

TEST(PoseGraph, EdgeNeedsBothEndpoints) {
  PoseGraph g;
  g.add_node(0, Pose::identity());
  EXPECT_THROW(g.add_edge(make_edge(0, 1)), MissingEndpointError);
  EXPECT_THROW(g.add_edge(make_edge(2, 0)), MissingEndpointError);
  EXPECT_THROW(g.add_edge(make_edge(0, 0)), Error);
}

TEST(PoseGraph, InformationMustBeSymmetricPsd) {
  PoseGraph g;
  g.add_node(0, Pose::identity());
  g.add_node(1, translated(1, 0, 0));
  Edge e = make_edge(0, 1);
  e.information(0, 1) = 0.5;  // asymmetric
  EXPECT_THROW(g.add_edge(e), InvalidInformationError);
  e.information = Matrix6d::Identity();
  e.information(3, 3) = -1.0;  // indefinite
  EXPECT_THROW(g.add_edge(e), InvalidInformationError);
  e.information = Matrix6d::Zero();  // semidefinite boundary is allowed
  EXPECT_NO_THROW(g.add_edge(e));
}

TEST(PoseGraph, AdjacencyIndexFollowsInsertions) {
  PoseGraph g;
  for (int i = 0; i < 4; ++i) g.add_node(i, translated(i, 0, 0));
  g.add_edge(make_edge(0, 1));
  g.add_edge(make_edge(1, 2));
  g.add_edge(make_edge(0, 2));
  g.add_edge(make_edge(2, 3));
  EXPECT_EQ(g.edges_of(0), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(g.edges_of(2), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(g.neighbor_ids(2), (std::vector<NodeId>{0, 1, 3}));
  EXPECT_TRUE(g.edges_of(3).size() == 1);
  EXPECT_TRUE(g.adjacency_consistent());
}

TEST(PoseGraph, NeighborIdsDeduplicateParallelEdges) {
  PoseGraph g;
  g.add_node(0, Pose::identity());
  g.add_node(1, translated(1, 0, 0));
  g.add_edge(make_edge(0, 1));
  g.add_edge(make_edge(1, 0));
  EXPECT_EQ(g.neighbor_ids(0), (std::vector<NodeId>{1}));
  EXPECT_EQ(g.edges_of(0).size(), 2u);
}

TEST(PoseGraph, ReplaceEdgeKeepsPairEitherOrientation) {
  PoseGraph g;
  for (int i = 0; i < 3; ++i) g.add_node(i, translated(i, 0, 0));
  g.add_edge(make_edge(0, 1));
  Edge swapped = make_edge(1, 0);
  swapped.information = 2.0 * Matrix6d::Identity();
  g.replace_edge(0, swapped);
  EXPECT_EQ(g.edges()[0].from, 1);
  EXPECT_EQ(g.edges()[0].information(0, 0), 2.0);
  EXPECT_TRUE(g.adjacency_consistent());
  EXPECT_THROW(g.replace_edge(0, make_edge(1, 2)), Error);
  EXPECT_THROW(g.replace_edge(7, make_edge(0, 1)), Error);
}

TEST(PoseGraph, SetPoseUpdatesAndChecksId) {
  PoseGraph g;
  g.add_node(4, Pose::identity());
  g.set_pose(4, translated(0, 7, 0));
  EXPECT_EQ(g.pose(4).translation().y(), 7.0);
  EXPECT_THROW(g.set_pose(5, Pose::identity()), Error);
  EXPECT_THROW(g.pose(5), Error);
}

TEST(PoseGraph, ConnectedComponentsSortedBySmallestMember) {
  PoseGraph g;
  for (int i = 0; i < 7; ++i) g.add_node(i, translated(i, 0, 0));
  g.add_edge(make_edge(5, 6));
  g.add_edge(make_edge(0, 2));
  g.add_edge(make_edge(2, 1));
  const auto comps = g.connected_components();
  ASSERT_EQ(comps.size(), 4u);
  EXPECT_EQ(comps[0], (std::vector<NodeId>{0, 1, 2}));
  EXPECT_EQ(comps[1], (std::vector<NodeId>{3}));
  EXPECT_EQ(comps[2], (std::vector<NodeId>{4}));
  EXPECT_EQ(comps[3], (std::vector<NodeId>{5, 6}));
}

TEST(PoseGraph, RandomGraphAdjacencyStaysConsistent) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> pick(0, 29);
  PoseGraph g;
  for (int i = 0; i < 30; ++i) g.add_node(i, translated(i, 0, 0));
  int added = 0;
  while (added < 60) {
    const int a = pick(gen);
    const int b = pick(gen);
    if (a == b) continue;
    g.add_edge(make_edge(a, b));
    ++added;
  }
  EXPECT_TRUE(g.adjacency_consistent());
  EXPECT_EQ(g.edge_count(), 60u);
}

}  // namespace
}  // namespace hpgo
