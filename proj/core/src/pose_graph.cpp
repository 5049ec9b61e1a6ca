#include "hpgo/pose_graph.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <string>

namespace hpgo {
namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kEigenvalueTol = -1e-9;

void validate_information(const Matrix6d& info) {
  if (!info.allFinite()) {
    throw InvalidInformationError("information matrix has non-finite entries");
  }
  const double asym = (info - info.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol) {
    throw InvalidInformationError("information matrix asymmetry " +
                                  std::to_string(asym));
  }
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(info, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < kEigenvalueTol) {
    throw InvalidInformationError("information matrix has eigenvalue " +
                                  std::to_string(min_eig));
  }
}

}  // namespace

void PoseGraph::add_node(NodeId id, const Pose& pose) {
  if (id < 0) throw Error("node id must be non-negative");
  if (!nodes_.emplace(id, pose).second) {
    throw DuplicateNodeError("node " + std::to_string(id) + " already exists");
  }
  adjacency_.emplace(id, std::vector<std::size_t>());
}

void PoseGraph::add_edge(const Edge& e) {
  if (e.from == e.to) {
    throw Error("self loop on node " + std::to_string(e.from));
  }
  if (!has_node(e.from)) {
    throw MissingEndpointError("edge endpoint " + std::to_string(e.from) +
                               " is not in the graph");
  }
  if (!has_node(e.to)) {
    throw MissingEndpointError("edge endpoint " + std::to_string(e.to) +
                               " is not in the graph");
  }
  validate_information(e.information);
  const std::size_t index = edges_.size();
  edges_.push_back(e);
  adjacency_[e.from].push_back(index);
  adjacency_[e.to].push_back(index);
}

void PoseGraph::replace_edge(std::size_t index, const Edge& e) {
  if (index >= edges_.size()) throw Error("edge index out of range");
  const Edge& old = edges_[index];
  const bool same_pair = (old.from == e.from && old.to == e.to) ||
                         (old.from == e.to && old.to == e.from);
  if (!same_pair) throw Error("replacement edge must keep the node pair");
  validate_information(e.information);
  edges_[index] = e;
}

const Pose& PoseGraph::pose(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw Error("unknown node " + std::to_string(id));
  }
  return it->second;
}

void PoseGraph::set_pose(NodeId id, const Pose& pose) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw Error("unknown node " + std::to_string(id));
  }
  it->second = pose;
}

const std::vector<std::size_t>& PoseGraph::edges_of(NodeId id) const {
  auto it = adjacency_.find(id);
  if (it == adjacency_.end()) {
    throw Error("unknown node " + std::to_string(id));
  }
  return it->second;
}

std::vector<NodeId> PoseGraph::neighbor_ids(NodeId id) const {
  std::vector<NodeId> out;
  for (std::size_t index : edges_of(id)) {
    const Edge& e = edges_[index];
    out.push_back(e.from == id ? e.to : e.from);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool PoseGraph::adjacency_consistent() const {
  if (adjacency_.size() != nodes_.size()) return false;
  std::size_t total = 0;
  for (const auto& [id, incident] : adjacency_) {
    if (!has_node(id)) return false;
    for (std::size_t index : incident) {
      if (index >= edges_.size()) return false;
      const Edge& e = edges_[index];
      if (e.from != id && e.to != id) return false;
    }
    total += incident.size();
  }
  if (total != 2 * edges_.size()) return false;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& from_list = adjacency_.at(edges_[i].from);
    const auto& to_list = adjacency_.at(edges_[i].to);
    if (std::find(from_list.begin(), from_list.end(), i) == from_list.end())
      return false;
    if (std::find(to_list.begin(), to_list.end(), i) == to_list.end())
      return false;
  }
  return true;
}

std::vector<std::vector<NodeId>> PoseGraph::connected_components() const {
  std::map<NodeId, bool> seen;
  std::vector<std::vector<NodeId>> components;
  for (const auto& [start, pose] : nodes_) {
    if (seen[start]) continue;
    std::vector<NodeId> component;
    std::vector<NodeId> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      const NodeId id = stack.back();
      stack.pop_back();
      component.push_back(id);
      for (std::size_t index : adjacency_.at(id)) {
        const Edge& e = edges_[index];
        const NodeId other = e.from == id ? e.to : e.from;
        if (!seen[other]) {
          seen[other] = true;
          stack.push_back(other);
        }
      }
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  return components;
}

}  // namespace hpgo
