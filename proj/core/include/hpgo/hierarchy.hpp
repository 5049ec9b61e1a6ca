#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "hpgo/pose_graph.hpp"

namespace hpgo {

using GroupId = int;

// Grouping weight of a constraint: inverse Mahalanobis magnitude of its
// measurement, 1 / max(z^T Omega z, 1e-12) with z = log(measurement).
// Near-identity, tightly constrained measurements weigh the most.
double edge_weight(const Edge& e);

struct WeightedEdge {
  NodeId a = 0;
  NodeId b = 0;
  double weight = 0.0;
};

// Scalar-weighted, undirected reading of a pose graph. The edge list stays
// index-aligned with the source graph's edge list.
struct WeightedView {
  std::vector<WeightedEdge> edges;
  std::map<NodeId, double> degree;
  double total = 0.0;  // m, the sum of all edge weights

  static WeightedView of(const PoseGraph& g);

  void add_node(NodeId id);
  void append_edge(NodeId a, NodeId b, double weight);
  void update_edge(std::size_t index, double weight);
};

// Disjoint grouping of node ids with bounded group size.
struct Partition {
  int capacity = 3;
  GroupId next_group = 0;
  std::map<NodeId, GroupId> assignment;
  std::map<GroupId, std::set<NodeId>> group_members;

  bool has(NodeId id) const { return assignment.count(id) != 0; }
  GroupId group_of(NodeId id) const;  // UnassignedNodeError
  std::size_t group_size(GroupId g) const;
  GroupId add_singleton(NodeId id);
  // Moves a node between groups; the vacated group is dropped when empty.
  void move(NodeId id, GroupId target);
  bool consistent() const;
};

// Newman modularity of the grouping over the weighted view, diagonal terms
// included. Throws EmptyGraphError when the view has no edge weight and
// UnassignedNodeError when a node with nonzero degree has no group.
double modularity(const WeightedView& view, const Partition& p);

// Gain of moving a singleton node into `target_group`:
//   sigma_in / (2m) - sigma_group * k_node / (2 m^2)
// where sigma_in is the weight between the node and the target group and
// sigma_group the summed weighted degree of the target group's members.
// Removal terms vanish because the node leaves a singleton group. Throws
// NotSingletonError when the node is not alone in its group.
double modularity_gain(const WeightedView& view, const Partition& p,
                       NodeId node, GroupId target_group);

struct HierarchyConfig {
  // A new top level is built once the current top holds more nodes.
  int level_threshold = 300;
  // Largest allowed group size.
  int group_capacity = 3;
};

// Bookkeeping tying a pair of groups at one level to the single coarse edge
// representing it one level up.
struct CrossLink {
  std::size_t upper_edge = 0;
  std::map<std::size_t, double> underlying;  // this level's edge index -> weight
  std::size_t dominant = 0;
};

// One resolution of the pyramid: a pose graph, its weighted view, and the
// grouping of its nodes, plus links into the next coarser level.
class HierarchyLevel {
 public:
  HierarchyLevel() = default;
  explicit HierarchyLevel(int capacity) { partition.capacity = capacity; }

  PoseGraph graph;
  WeightedView view;
  Partition partition;
  std::map<GroupId, NodeId> representative;
  std::map<GroupId, NodeId> upper_of;  // group -> node id one level up
  std::map<std::pair<GroupId, GroupId>, CrossLink> cross;

  // Single pass over `new_nodes` in the given order. Unassigned nodes first
  // get singleton groups; each node still alone in its group then moves to
  // the neighbouring group with the largest positive gain among those whose
  // size stays within capacity. Nodes that already share a group are left
  // alone, so earlier assignments never change. The batch must cover every
  // graph node not yet in the partition.
  void assign_new_nodes(const std::vector<NodeId>& new_nodes);

  // Gain of moving `node` into `target` using the adjacency index; same
  // value as modularity_gain on this level's view. Every node in the graph
  // must already be assigned to some group.
  double gain_of(NodeId node, GroupId target) const;

  NodeId parent_of(NodeId id) const;

  std::size_t node_count() const { return graph.node_count(); }
};

// The group member with the largest weighted degree inside the group's
// induced subgraph; ties break toward the lowest id.
NodeId select_representative(const HierarchyLevel& level, GroupId group);

// Collapses every group to one coarse node (named after and placed at its
// representative) and every inter-group edge bundle to one coarse edge: the
// bundle's weight-maximal member supplies the information verbatim and its
// measurement is chained between the two representatives through
// within-group offsets taken from the current poses. Fills the level's
// representative, upper_of and cross maps. Throws UnassignedNodeError when
// some node has no group.
HierarchyLevel build_next_level(HierarchyLevel& level,
                                const HierarchyConfig& cfg);

// Multi-resolution grouping of a streamed pose graph.
class Hierarchy {
 public:
  explicit Hierarchy(const HierarchyConfig& cfg = HierarchyConfig());

  // Inserts one node and its incident edges at the base level and lets the
  // change ripple upward: the node joins (or founds) a group, coarse nodes
  // and edges are maintained, and a new top level is built whenever the
  // current top outgrows the threshold.
  void add_pose(NodeId id, const Pose& pose, const std::vector<Edge>& edges);

  // Streams a finished graph in ascending id order, handing each edge to
  // its later endpoint.
  static Hierarchy from_graph(const PoseGraph& g,
                              const HierarchyConfig& cfg = HierarchyConfig());

  int level_count() const { return static_cast<int>(levels_.size()); }
  HierarchyLevel& level(int l) { return levels_.at(static_cast<std::size_t>(l)); }
  const HierarchyLevel& level(int l) const {
    return levels_.at(static_cast<std::size_t>(l));
  }
  const HierarchyConfig& config() const { return cfg_; }

  // Ancestor of a base-level node at `target_level` (0 gives the node).
  NodeId ancestor_of(NodeId base_node, int target_level) const;

  // Copies each representative's current pose onto its coarse node, from
  // the bottom of the pyramid to the top.
  void refresh_upper_poses();

  // Node-count ratio of every adjacent level pair.
  std::vector<double> reduction_ratios() const;

 private:
  void insert_node(int l, NodeId id, const Pose& pose,
                   const std::vector<Edge>& edges);
  void insert_edge(int l, const Edge& e);
  void upsert_cross(int l, GroupId ga, GroupId gb, std::size_t edge_index);
  void rebuild_coarse_edge(int l, const std::pair<GroupId, GroupId>& key);
  void maybe_grow(int l);

  HierarchyConfig cfg_;
  std::vector<HierarchyLevel> levels_;
};

}  // namespace hpgo
