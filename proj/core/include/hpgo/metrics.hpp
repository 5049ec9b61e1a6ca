#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hpgo/pose_graph.hpp"

namespace hpgo {

using Trajectory = std::map<NodeId, Pose>;

Trajectory trajectory_of(const PoseGraph& g);

struct MetricReport {
  double ate = 0.0;  // mean translational error per meter travelled
  double are = 0.0;  // mean rotational error, radians per meter travelled
  int n_pairs = 0;
};

// Default evaluation lengths: 100..800 in steps of 100 when the reference
// path is at least 800 long, otherwise eight equal fractions up to 8/10 of
// the path. Throws PathTooShortError when the path has no length.
std::vector<double> default_segments(const Trajectory& gt);

// Segment-based relative pose error. For every start node and every length
// L, the first node at least L further along the reference path closes a
// pair; the discrepancy between the reference and estimated relative motion
// over the pair, scaled by L, enters the averages. Both trajectories must
// hold exactly the same ids (MismatchedIdsError). Throws PathTooShortError
// when no pair can be formed. The result does not change when either
// trajectory is moved by a rigid transform as a whole.
MetricReport relative_errors(const Trajectory& gt, const Trajectory& est,
                             const std::vector<double>& segments = {});

// Plain text trajectory I/O, one node per line: id tx ty tz qx qy qz qw.
Trajectory parse_trajectory(std::istream& in);
Trajectory parse_trajectory(const std::string& text);
Trajectory load_trajectory(const std::string& path);
std::string write_trajectory(const Trajectory& t);
void save_trajectory(const Trajectory& t, const std::string& path);

}  // namespace hpgo
