#include "hpgo/phpgo.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <set>

#include "hpgo/errors.hpp"

namespace hpgo {

Selection bfs_select(const PoseGraph& g, NodeId seed, int count) {
  if (!g.has_node(seed)) {
    throw MissingSeedError("seed " + std::to_string(seed) +
                           " is not in the graph");
  }
  if (count < 1) {
    throw Error("window size must be positive");
  }
  Selection sel;
  std::set<NodeId> visited{seed};
  std::deque<NodeId> queue{seed};
  while (!queue.empty() && static_cast<int>(sel.interior.size()) < count) {
    const NodeId id = queue.front();
    queue.pop_front();
    sel.interior.push_back(id);
    for (NodeId nb : g.neighbor_ids(id)) {
      if (visited.insert(nb).second) {
        queue.push_back(nb);
      }
    }
  }
  const std::set<NodeId> inside(sel.interior.begin(), sel.interior.end());
  std::set<NodeId> ring;
  for (NodeId id : sel.interior) {
    for (NodeId nb : g.neighbor_ids(id)) {
      if (inside.count(nb) == 0) {
        ring.insert(nb);
      }
    }
  }
  sel.border.assign(ring.begin(), ring.end());
  return sel;
}

PoseGraph extract_window(const PoseGraph& g, const Selection& sel) {
  PoseGraph out;
  for (NodeId id : sel.interior) {
    out.add_node(id, g.pose(id));
  }
  for (NodeId id : sel.border) {
    out.add_node(id, g.pose(id));
  }
  const std::set<NodeId> inside(sel.interior.begin(), sel.interior.end());
  std::set<std::size_t> picked;
  for (NodeId id : sel.interior) {
    for (std::size_t idx : g.edges_of(id)) {
      picked.insert(idx);
    }
  }
  for (std::size_t idx : picked) {
    out.add_edge(g.edges()[idx]);
  }
  return out;
}

void propagate_down(Hierarchy& h, int upper_level) {
  if (upper_level < 1 || upper_level >= h.level_count()) {
    throw Error("no level above " + std::to_string(upper_level - 1));
  }
  HierarchyLevel& lower = h.level(upper_level - 1);
  const HierarchyLevel& upper = h.level(upper_level);
  for (const auto& [g, uid] : lower.upper_of) {
    const NodeId rep = lower.representative.at(g);
    const Pose delta = upper.graph.pose(uid) * lower.graph.pose(rep).inverse();
    for (NodeId member : lower.partition.group_members.at(g)) {
      lower.graph.set_pose(member, delta * lower.graph.pose(member));
    }
  }
}

const char* mode_name(OptimizeMode m) {
  switch (m) {
    case OptimizeMode::Full:
      return "full";
    case OptimizeMode::TopOnly:
      return "top";
    case OptimizeMode::Partial:
      return "partial";
  }
  return "unknown";
}

OptimizeMode mode_from_name(const std::string& name) {
  if (name == "full") {
    return OptimizeMode::Full;
  }
  if (name == "top") {
    return OptimizeMode::TopOnly;
  }
  if (name == "partial") {
    return OptimizeMode::Partial;
  }
  throw Error("unknown mode '" + name + "'");
}

namespace {

// Refines one window of `level`'s graph around `seed`, border fixed (the
// seed itself when the window swallowed a whole component).
double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void run_window(PoseGraph& graph, NodeId seed, const PhpgoConfig& cfg,
                int* iterations, bool* converged, double* solver_ms) {
  const Selection sel = bfs_select(graph, seed, cfg.window);
  PoseGraph window = extract_window(graph, sel);
  OptConfig sub = cfg.inner;
  sub.fixed_nodes.clear();
  if (sel.border.empty()) {
    sub.fixed_nodes.insert(seed);
  } else {
    sub.fixed_nodes.insert(sel.border.begin(), sel.border.end());
  }
  const double t0 = now_ms();
  const OptReport r = optimize(window, sub);
  *solver_ms += now_ms() - t0;
  for (NodeId id : sel.interior) {
    graph.set_pose(id, window.pose(id));
  }
  *iterations += r.iterations_run;
  *converged = *converged && r.converged;
}

}  // namespace

OptReport optimize_partial(Hierarchy& h, NodeId last_node,
                           const PhpgoConfig& cfg) {
  if (h.level_count() == 0) {
    throw EmptyGraphError("hierarchy has no levels");
  }
  if (!h.level(0).graph.has_node(last_node)) {
    throw MissingSeedError("node " + std::to_string(last_node) +
                           " is not in the base level");
  }
  OptReport out;
  out.label = mode_name(OptimizeMode::Partial);
  out.chi2_initial = chi2(h.level(0).graph);
  out.converged = true;
  h.refresh_upper_poses();
  if (h.level_count() == 1) {
    run_window(h.level(0).graph, last_node, cfg, &out.iterations_run,
               &out.converged, &out.wall_time_ms);
  } else {
    const int top = h.level_count() - 1;
    OptConfig c = cfg.inner;
    c.fixed_nodes.clear();
    const double t0 = now_ms();
    const OptReport r = optimize(h.level(top).graph, c);
    out.wall_time_ms += now_ms() - t0;
    out.iterations_run += r.iterations_run;
    out.converged = out.converged && r.converged;
    for (int l = top - 1; l >= 0; --l) {
      propagate_down(h, l + 1);
      run_window(h.level(l).graph, h.ancestor_of(last_node, l), cfg,
                 &out.iterations_run, &out.converged, &out.wall_time_ms);
    }
  }
  h.refresh_upper_poses();
  out.chi2_final = chi2(h.level(0).graph);
  return out;
}

OptReport optimize_mode(Hierarchy& h, OptimizeMode mode, NodeId last_node,
                        const PhpgoConfig& cfg) {
  if (mode == OptimizeMode::Partial) {
    return optimize_partial(h, last_node, cfg);
  }
  if (h.level_count() == 0) {
    throw EmptyGraphError("hierarchy has no levels");
  }
  OptReport out;
  out.label = mode_name(mode);
  out.chi2_initial = chi2(h.level(0).graph);
  OptConfig c = cfg.inner;
  c.fixed_nodes.clear();
  if (mode == OptimizeMode::Full) {
    const double t0 = now_ms();
    const OptReport r = optimize(h.level(0).graph, c);
    out.wall_time_ms = now_ms() - t0;
    out.iterations_run = r.iterations_run;
    out.converged = r.converged;
  } else {
    h.refresh_upper_poses();
    const int top = h.level_count() - 1;
    const double t0 = now_ms();
    const OptReport r = optimize(h.level(top).graph, c);
    out.wall_time_ms = now_ms() - t0;
    out.iterations_run = r.iterations_run;
    out.converged = r.converged;
    for (int l = top; l >= 1; --l) {
      propagate_down(h, l);
    }
  }
  h.refresh_upper_poses();
  out.chi2_final = chi2(h.level(0).graph);
  return out;
}

}  // namespace hpgo
