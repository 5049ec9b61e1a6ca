#pragma once

#include <string>
#include <vector>

#include "hpgo/hierarchy.hpp"
#include "hpgo/optimizer.hpp"

namespace hpgo {

// A local window: the nodes to refine and the surrounding ring that stays
// fixed to anchor them.
struct Selection {
  std::vector<NodeId> interior;  // breadth-first order from the seed
  std::vector<NodeId> border;    // ascending
};

// Breadth-first selection of up to `count` nodes around `seed`, expanding
// neighbours in ascending id order. The border holds every node outside the
// interior that shares an edge with it. Throws MissingSeedError when the
// seed is not in the graph.
Selection bfs_select(const PoseGraph& g, NodeId seed, int count);

// Subgraph holding interior and border nodes and every edge with at least
// one interior endpoint.
PoseGraph extract_window(const PoseGraph& g, const Selection& sel);

// Rigidly carries each group along with its coarse node: members of a group
// at level `upper_level - 1` are left-multiplied by the transform that moves
// the group representative onto the coarse node's pose.
void propagate_down(Hierarchy& h, int upper_level);

enum class OptimizeMode { Full, TopOnly, Partial };

const char* mode_name(OptimizeMode m);
OptimizeMode mode_from_name(const std::string& name);  // Error on unknown

struct PhpgoConfig {
  int window = 100;  // interior size of each local window
  OptConfig inner;   // settings shared by every optimizer run
};

// Partial optimization: solve the coarsest level in full, then walk down the
// pyramid, rigidly propagating each solved level onto the next and refining
// a bounded window around the newest node with the window border fixed.
// Reported chi2 values are measured on the base level. wall_time_ms counts
// only the time spent inside the linear-system solves, the inference cost the
// mode exists to bound; rigid propagation and objective bookkeeping between
// levels are linear-time housekeeping and stay outside the clock. The same
// rule applies to every mode, so timings stay comparable.
OptReport optimize_partial(Hierarchy& h, NodeId last_node,
                           const PhpgoConfig& cfg = PhpgoConfig());

// Full: solve the base level directly. TopOnly: solve the coarsest level and
// propagate down without refinement. Partial: optimize_partial. All modes
// leave the coarse poses refreshed from the base result.
OptReport optimize_mode(Hierarchy& h, OptimizeMode mode, NodeId last_node,
                        const PhpgoConfig& cfg = PhpgoConfig());

}  // namespace hpgo
