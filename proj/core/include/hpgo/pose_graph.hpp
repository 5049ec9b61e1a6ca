#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "hpgo/se3.hpp"

namespace hpgo {

using NodeId = int;

// Relative-pose constraint between two nodes. The information matrix is the
// inverse measurement covariance, rows/cols ordered like [rho; theta].
struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  Pose measurement;
  Matrix6d information = Matrix6d::Identity();
};

// Pose graph over integer node ids. Node iteration is always in ascending id
// order; edges keep insertion order. An adjacency index from node to incident
// edge positions is maintained on every insertion.
class PoseGraph {
 public:
  // Throws DuplicateNodeError if the id is already present.
  void add_node(NodeId id, const Pose& pose);

  // Throws MissingEndpointError if either endpoint is absent, Error on a
  // self loop, InvalidInformationError if the information matrix is not
  // symmetric positive semidefinite (tolerance 1e-9).
  void add_edge(const Edge& e);

  // Swaps the edge stored at `index` for one connecting the same node pair
  // (either orientation). Used when a coarse constraint is superseded.
  void replace_edge(std::size_t index, const Edge& e);

  bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
  const Pose& pose(NodeId id) const;
  void set_pose(NodeId id, const Pose& pose);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::map<NodeId, Pose>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Positions into edges() of all edges incident to `id`.
  const std::vector<std::size_t>& edges_of(NodeId id) const;

  // Distinct neighbor ids of `id`, ascending.
  std::vector<NodeId> neighbor_ids(NodeId id) const;

  // Verifies that the adjacency index matches the edge list exactly.
  bool adjacency_consistent() const;

  // Connected components under undirected edges, each sorted ascending,
  // ordered by their smallest member.
  std::vector<std::vector<NodeId>> connected_components() const;

 private:
  std::map<NodeId, Pose> nodes_;
  std::vector<Edge> edges_;
  std::map<NodeId, std::vector<std::size_t>> adjacency_;
};

}  // namespace hpgo
