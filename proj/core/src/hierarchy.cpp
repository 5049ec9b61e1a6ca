#include "hpgo/hierarchy.hpp"

#include <algorithm>
#include <limits>

#include "hpgo/errors.hpp"

namespace hpgo {

namespace {

constexpr double kWeightFloor = 1e-12;

std::pair<GroupId, GroupId> norm_pair(GroupId a, GroupId b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

// Builds the coarse edge for one group pair from its weight-maximal
// underlying edge: the underlying measurement is chained between the two
// representatives through within-group offsets taken from the current
// poses. Offsets span at most a group, so they stay local; the measured
// constraint itself survives the coarsening. Under a singleton cover the
// offsets vanish and the coarse edge equals the underlying one.
Edge make_coarse_edge(const HierarchyLevel& level,
                      const std::pair<GroupId, GroupId>& key) {
  const CrossLink& link = level.cross.at(key);
  const Edge& under = level.graph.edges().at(link.dominant);
  const GroupId ga = level.partition.group_of(under.from);
  const GroupId gb = level.partition.group_of(under.to);

  Edge out;
  out.from = level.upper_of.at(ga);
  out.to = level.upper_of.at(gb);
  out.information = under.information;
  const Pose lead = level.graph.pose(level.representative.at(ga)).inverse() *
                    level.graph.pose(under.from);
  const Pose tail = level.graph.pose(under.to).inverse() *
                    level.graph.pose(level.representative.at(gb));
  out.measurement = lead * under.measurement * tail;
  return out;
}

std::size_t dominant_of(const CrossLink& link) {
  std::size_t best = 0;
  double best_w = -1.0;
  bool first = true;
  for (const auto& [idx, w] : link.underlying) {
    if (first || w > best_w) {
      best = idx;
      best_w = w;
      first = false;
    }
  }
  return best;
}

}  // namespace

double edge_weight(const Edge& e) {
  const Vector6d z = log_unchecked(e.measurement).vector();
  const double mag = z.dot(e.information * z);
  return 1.0 / std::max(mag, kWeightFloor);
}

WeightedView WeightedView::of(const PoseGraph& g) {
  WeightedView v;
  for (const auto& [id, pose] : g.nodes()) {
    (void)pose;
    v.add_node(id);
  }
  for (const Edge& e : g.edges()) {
    v.append_edge(e.from, e.to, edge_weight(e));
  }
  return v;
}

void WeightedView::add_node(NodeId id) { degree.emplace(id, 0.0); }

void WeightedView::append_edge(NodeId a, NodeId b, double weight) {
  edges.push_back({a, b, weight});
  degree[a] += weight;
  degree[b] += weight;
  total += weight;
}

void WeightedView::update_edge(std::size_t index, double weight) {
  WeightedEdge& e = edges.at(index);
  const double delta = weight - e.weight;
  e.weight = weight;
  degree[e.a] += delta;
  degree[e.b] += delta;
  total += delta;
}

GroupId Partition::group_of(NodeId id) const {
  auto it = assignment.find(id);
  if (it == assignment.end()) {
    throw UnassignedNodeError("node " + std::to_string(id) + " has no group");
  }
  return it->second;
}

std::size_t Partition::group_size(GroupId g) const {
  auto it = group_members.find(g);
  return it == group_members.end() ? 0 : it->second.size();
}

GroupId Partition::add_singleton(NodeId id) {
  if (has(id)) {
    throw Error("node " + std::to_string(id) + " is already assigned");
  }
  const GroupId g = next_group++;
  assignment[id] = g;
  group_members[g].insert(id);
  return g;
}

void Partition::move(NodeId id, GroupId target) {
  const GroupId from = group_of(id);
  if (from == target) {
    return;
  }
  auto it = group_members.find(target);
  if (it == group_members.end()) {
    throw Error("group " + std::to_string(target) + " does not exist");
  }
  if (static_cast<int>(it->second.size()) >= capacity) {
    throw Error("group " + std::to_string(target) + " is full");
  }
  group_members[from].erase(id);
  if (group_members[from].empty()) {
    group_members.erase(from);
  }
  it->second.insert(id);
  assignment[id] = target;
}

bool Partition::consistent() const {
  std::size_t counted = 0;
  for (const auto& [g, members] : group_members) {
    if (members.empty() || static_cast<int>(members.size()) > capacity) {
      return false;
    }
    for (NodeId id : members) {
      auto it = assignment.find(id);
      if (it == assignment.end() || it->second != g) {
        return false;
      }
      ++counted;
    }
  }
  return counted == assignment.size();
}

double modularity(const WeightedView& view, const Partition& p) {
  if (view.total <= 0.0) {
    throw EmptyGraphError("weighted view has no edge weight");
  }
  for (const auto& [id, k] : view.degree) {
    if (k != 0.0 && !p.has(id)) {
      throw UnassignedNodeError("node " + std::to_string(id) +
                                " has no group");
    }
  }
  const double m = view.total;
  std::map<GroupId, double> internal;
  for (const WeightedEdge& e : view.edges) {
    const GroupId ga = p.group_of(e.a);
    if (ga == p.group_of(e.b)) {
      internal[ga] += e.weight;
    }
  }
  double q = 0.0;
  for (const auto& [g, members] : p.group_members) {
    double deg = 0.0;
    for (NodeId id : members) {
      auto it = view.degree.find(id);
      if (it != view.degree.end()) {
        deg += it->second;
      }
    }
    auto it = internal.find(g);
    const double in = it == internal.end() ? 0.0 : it->second;
    q += (2.0 * in - deg * deg / (2.0 * m)) / (2.0 * m);
  }
  return q;
}

namespace {

double gain_from_parts(double sigma_in, double sigma_group, double k_node,
                       double m) {
  return sigma_in / (2.0 * m) - sigma_group * k_node / (2.0 * m * m);
}

double group_degree(const WeightedView& view, const Partition& p, GroupId g) {
  double deg = 0.0;
  for (NodeId id : p.group_members.at(g)) {
    auto it = view.degree.find(id);
    if (it != view.degree.end()) {
      deg += it->second;
    }
  }
  return deg;
}

}  // namespace

double modularity_gain(const WeightedView& view, const Partition& p,
                       NodeId node, GroupId target_group) {
  if (view.total <= 0.0) {
    throw EmptyGraphError("weighted view has no edge weight");
  }
  if (p.group_size(p.group_of(node)) != 1) {
    throw NotSingletonError("node " + std::to_string(node) +
                            " is not alone in its group");
  }
  if (p.group_members.count(target_group) == 0) {
    throw Error("group " + std::to_string(target_group) + " does not exist");
  }
  double sigma_in = 0.0;
  for (const WeightedEdge& e : view.edges) {
    NodeId other;
    if (e.a == node) {
      other = e.b;
    } else if (e.b == node) {
      other = e.a;
    } else {
      continue;
    }
    if (other != node && p.has(other) &&
        p.group_of(other) == target_group) {
      sigma_in += e.weight;
    }
  }
  auto it = view.degree.find(node);
  const double k_node = it == view.degree.end() ? 0.0 : it->second;
  return gain_from_parts(sigma_in, group_degree(view, p, target_group), k_node,
                         view.total);
}

double HierarchyLevel::gain_of(NodeId node, GroupId target) const {
  double sigma_in = 0.0;
  for (std::size_t idx : graph.edges_of(node)) {
    const Edge& e = graph.edges()[idx];
    const NodeId other = e.from == node ? e.to : e.from;
    if (partition.group_of(other) == target) {
      sigma_in += view.edges[idx].weight;
    }
  }
  const double k_node = view.degree.at(node);
  return gain_from_parts(sigma_in, group_degree(view, partition, target),
                         k_node, view.total);
}

void HierarchyLevel::assign_new_nodes(const std::vector<NodeId>& new_nodes) {
  for (NodeId id : new_nodes) {
    if (!partition.has(id)) {
      partition.add_singleton(id);
    }
  }
  for (NodeId id : new_nodes) {
    const GroupId own = partition.group_of(id);
    if (partition.group_size(own) > 1) {
      continue;
    }
    double max_gain = -std::numeric_limits<double>::infinity();
    GroupId best = -1;
    for (NodeId nb : graph.neighbor_ids(id)) {
      if (!partition.has(nb)) {
        continue;
      }
      const GroupId g = partition.group_of(nb);
      if (g == own) {
        continue;
      }
      if (static_cast<int>(partition.group_size(g)) >= partition.capacity) {
        continue;
      }
      const double gain = gain_of(id, g);
      if (gain > max_gain) {
        max_gain = gain;
        best = g;
      }
    }
    if (best >= 0 && max_gain > 0.0) {
      partition.move(id, best);
    }
  }
}

NodeId HierarchyLevel::parent_of(NodeId id) const {
  const GroupId g = partition.group_of(id);
  auto it = upper_of.find(g);
  if (it == upper_of.end()) {
    throw Error("group " + std::to_string(g) + " has no coarse node");
  }
  return it->second;
}

NodeId select_representative(const HierarchyLevel& level, GroupId group) {
  auto it = level.partition.group_members.find(group);
  if (it == level.partition.group_members.end() || it->second.empty()) {
    throw Error("group " + std::to_string(group) + " does not exist");
  }
  NodeId best = *it->second.begin();
  double best_deg = -1.0;
  for (NodeId id : it->second) {
    double internal = 0.0;
    for (std::size_t idx : level.graph.edges_of(id)) {
      const Edge& e = level.graph.edges()[idx];
      const NodeId other = e.from == id ? e.to : e.from;
      if (level.partition.has(other) &&
          level.partition.group_of(other) == group) {
        internal += level.view.edges[idx].weight;
      }
    }
    if (internal > best_deg) {
      best_deg = internal;
      best = id;
    }
  }
  return best;
}

HierarchyLevel build_next_level(HierarchyLevel& level,
                                const HierarchyConfig& cfg) {
  for (const auto& [id, pose] : level.graph.nodes()) {
    (void)pose;
    if (!level.partition.has(id)) {
      throw UnassignedNodeError("node " + std::to_string(id) +
                                " has no group");
    }
  }
  level.representative.clear();
  level.upper_of.clear();
  level.cross.clear();

  HierarchyLevel upper(cfg.group_capacity);
  for (const auto& [g, members] : level.partition.group_members) {
    (void)members;
    const NodeId rep = select_representative(level, g);
    level.representative[g] = rep;
    level.upper_of[g] = rep;
    upper.graph.add_node(rep, level.graph.pose(rep));
    upper.view.add_node(rep);
  }
  const auto& edges = level.graph.edges();
  for (std::size_t idx = 0; idx < edges.size(); ++idx) {
    const GroupId ga = level.partition.group_of(edges[idx].from);
    const GroupId gb = level.partition.group_of(edges[idx].to);
    if (ga == gb) {
      continue;
    }
    level.cross[norm_pair(ga, gb)].underlying[idx] = level.view.edges[idx].weight;
  }
  for (auto& [key, link] : level.cross) {
    link.dominant = dominant_of(link);
    link.upper_edge = upper.graph.edge_count();
    const Edge ue = make_coarse_edge(level, key);
    upper.graph.add_edge(ue);
    upper.view.append_edge(ue.from, ue.to, edge_weight(ue));
  }
  return upper;
}

Hierarchy::Hierarchy(const HierarchyConfig& cfg) : cfg_(cfg) {
  if (cfg.level_threshold < 1) {
    throw Error("level threshold must be positive");
  }
  if (cfg.group_capacity < 1) {
    throw Error("group capacity must be positive");
  }
}

void Hierarchy::add_pose(NodeId id, const Pose& pose,
                         const std::vector<Edge>& edges) {
  for (const Edge& e : edges) {
    if (e.from != id && e.to != id) {
      throw Error("edge " + std::to_string(e.from) + "-" +
                  std::to_string(e.to) + " is not incident to node " +
                  std::to_string(id));
    }
  }
  if (levels_.empty()) {
    levels_.emplace_back(cfg_.group_capacity);
  }
  insert_node(0, id, pose, edges);
}

void Hierarchy::insert_node(int l, NodeId id, const Pose& pose,
                            const std::vector<Edge>& edges) {
  HierarchyLevel& level = levels_[static_cast<std::size_t>(l)];
  level.graph.add_node(id, pose);
  level.view.add_node(id);
  std::vector<std::size_t> incident;
  incident.reserve(edges.size());
  for (const Edge& e : edges) {
    incident.push_back(level.graph.edge_count());
    level.graph.add_edge(e);
    level.view.append_edge(e.from, e.to, edge_weight(e));
  }

  level.assign_new_nodes({id});
  const GroupId gid = level.partition.group_of(id);
  // A group born here is represented by its founding node, and the choice is
  // frozen: coarse measurements snapshot the representative's pose, so a
  // later swap would silently shift their reference frames.
  if (level.representative.count(gid) == 0) {
    level.representative[gid] = id;
  }

  const bool has_upper = l + 1 < level_count();
  if (!has_upper) {
    maybe_grow(l);
    return;
  }

  if (level.upper_of.count(gid) == 0) {
    // The node stayed alone: it becomes its own coarse node one level up,
    // carrying one coarse edge per neighbouring group.
    const NodeId uid = id;
    level.upper_of[gid] = uid;
    std::vector<std::pair<GroupId, GroupId>> keys;
    for (std::size_t idx : incident) {
      const Edge& e = level.graph.edges()[idx];
      const NodeId other = e.from == id ? e.to : e.from;
      const GroupId og = level.partition.group_of(other);
      if (og == gid) {
        continue;
      }
      const auto key = norm_pair(gid, og);
      CrossLink& link = level.cross[key];
      if (link.underlying.empty()) {
        keys.push_back(key);
      }
      link.underlying[idx] = level.view.edges[idx].weight;
    }
    std::sort(keys.begin(), keys.end());
    std::vector<Edge> coarse;
    coarse.reserve(keys.size());
    const std::size_t base =
        levels_[static_cast<std::size_t>(l) + 1].graph.edge_count();
    for (std::size_t i = 0; i < keys.size(); ++i) {
      CrossLink& link = level.cross[keys[i]];
      link.dominant = dominant_of(link);
      link.upper_edge = base + i;
      coarse.push_back(make_coarse_edge(level, keys[i]));
    }
    insert_node(l + 1, uid, pose, coarse);
    return;
  }

  // The node joined an existing group: only the coarse edges around that
  // group can change.
  for (std::size_t idx : incident) {
    const Edge& e = level.graph.edges()[idx];
    const NodeId other = e.from == id ? e.to : e.from;
    const GroupId og = level.partition.group_of(other);
    if (og != gid) {
      upsert_cross(l, gid, og, idx);
    }
  }
}

void Hierarchy::insert_edge(int l, const Edge& e) {
  HierarchyLevel& level = levels_[static_cast<std::size_t>(l)];
  const std::size_t idx = level.graph.edge_count();
  level.graph.add_edge(e);
  level.view.append_edge(e.from, e.to, edge_weight(e));
  if (l + 1 >= level_count()) {
    return;
  }
  const GroupId ga = level.partition.group_of(e.from);
  const GroupId gb = level.partition.group_of(e.to);
  if (ga != gb) {
    upsert_cross(l, ga, gb, idx);
  }
}

void Hierarchy::upsert_cross(int l, GroupId ga, GroupId gb,
                             std::size_t edge_index) {
  HierarchyLevel& level = levels_[static_cast<std::size_t>(l)];
  const auto key = norm_pair(ga, gb);
  const double w = level.view.edges[edge_index].weight;
  auto it = level.cross.find(key);
  if (it == level.cross.end()) {
    CrossLink& link = level.cross[key];
    link.underlying[edge_index] = w;
    link.dominant = edge_index;
    link.upper_edge =
        levels_[static_cast<std::size_t>(l) + 1].graph.edge_count();
    insert_edge(l + 1, make_coarse_edge(level, key));
    return;
  }
  CrossLink& link = it->second;
  link.underlying[edge_index] = w;
  if (w > link.underlying.at(link.dominant)) {
    link.dominant = edge_index;
    rebuild_coarse_edge(l, key);
  }
}

void Hierarchy::rebuild_coarse_edge(int l,
                                    const std::pair<GroupId, GroupId>& key) {
  HierarchyLevel& level = levels_[static_cast<std::size_t>(l)];
  HierarchyLevel& upper = levels_[static_cast<std::size_t>(l) + 1];
  const CrossLink& link = level.cross.at(key);
  const Edge ue = make_coarse_edge(level, key);
  upper.graph.replace_edge(link.upper_edge, ue);
  const double w = edge_weight(ue);
  upper.view.update_edge(link.upper_edge, w);

  // The coarse edge changed content, so the pair it feeds one level further
  // up has to re-evaluate its dominant member.
  if (l + 2 >= level_count()) {
    return;
  }
  const GroupId ua = upper.partition.group_of(ue.from);
  const GroupId ub = upper.partition.group_of(ue.to);
  if (ua == ub) {
    return;
  }
  const auto ukey = norm_pair(ua, ub);
  CrossLink& ulink = upper.cross.at(ukey);
  ulink.underlying[link.upper_edge] = w;
  const std::size_t dom = dominant_of(ulink);
  const bool content_changed = dom == link.upper_edge;
  if (dom != ulink.dominant || content_changed) {
    ulink.dominant = dom;
    rebuild_coarse_edge(l + 1, ukey);
  }
}

void Hierarchy::maybe_grow(int l) {
  while (true) {
    HierarchyLevel& top = levels_.back();
    if (static_cast<int>(top.node_count()) <= cfg_.level_threshold) {
      return;
    }
    if (top.partition.group_members.size() == top.node_count()) {
      return;  // all singletons, another level would not shrink anything
    }
    levels_.push_back(build_next_level(top, cfg_));
    HierarchyLevel& fresh = levels_.back();
    std::vector<NodeId> ids;
    ids.reserve(fresh.node_count());
    for (const auto& [id, pose] : fresh.graph.nodes()) {
      (void)pose;
      ids.push_back(id);
    }
    fresh.assign_new_nodes(ids);
    for (const auto& [g, members] : fresh.partition.group_members) {
      (void)members;
      fresh.representative[g] = select_representative(fresh, g);
    }
    l = level_count() - 1;
  }
}

Hierarchy Hierarchy::from_graph(const PoseGraph& g,
                                const HierarchyConfig& cfg) {
  Hierarchy h(cfg);
  std::map<NodeId, std::vector<Edge>> by_later;
  for (const Edge& e : g.edges()) {
    by_later[std::max(e.from, e.to)].push_back(e);
  }
  for (const auto& [id, pose] : g.nodes()) {
    auto it = by_later.find(id);
    static const std::vector<Edge> none;
    h.add_pose(id, pose, it == by_later.end() ? none : it->second);
  }
  return h;
}

NodeId Hierarchy::ancestor_of(NodeId base_node, int target_level) const {
  if (target_level < 0 || target_level >= level_count()) {
    throw Error("level " + std::to_string(target_level) + " does not exist");
  }
  NodeId id = base_node;
  for (int l = 0; l < target_level; ++l) {
    id = levels_[static_cast<std::size_t>(l)].parent_of(id);
  }
  return id;
}

void Hierarchy::refresh_upper_poses() {
  for (int l = 0; l + 1 < level_count(); ++l) {
    const HierarchyLevel& level = levels_[static_cast<std::size_t>(l)];
    HierarchyLevel& upper = levels_[static_cast<std::size_t>(l) + 1];
    for (const auto& [g, uid] : level.upper_of) {
      upper.graph.set_pose(uid, level.graph.pose(level.representative.at(g)));
    }
  }
}

std::vector<double> Hierarchy::reduction_ratios() const {
  std::vector<double> out;
  for (int l = 0; l + 1 < level_count(); ++l) {
    out.push_back(static_cast<double>(levels_[static_cast<std::size_t>(l)].node_count()) /
                  static_cast<double>(levels_[static_cast<std::size_t>(l) + 1].node_count()));
  }
  return out;
}

}  // namespace hpgo
