#pragma once

#include <iosfwd>
#include <string>

#include "hpgo/pose_graph.hpp"

namespace hpgo {

struct G2oParseResult {
  PoseGraph graph;
  // Lines whose tag was not recognized and that were skipped.
  int skipped_lines = 0;
};

// Reads VERTEX_SE3:QUAT and EDGE_SE3:QUAT records. Vertex lines carry
// `id tx ty tz qx qy qz qw`; edge lines carry the two endpoint ids, the same
// seven measurement numbers, and the 21 upper-triangular entries of the 6x6
// information matrix in row-major order. Quaternions are renormalized on
// load. Unknown tags are skipped and counted; empty and '#' comment lines
// are ignored. Throws MalformedLineError (with the line number) on bad
// records and MissingEndpointError when an edge references an id that never
// appears as a vertex.
G2oParseResult parse_g2o(std::istream& in);
G2oParseResult parse_g2o(const std::string& text);
G2oParseResult load_g2o(const std::string& path);

// Writes vertices in ascending id order followed by edges in insertion
// order, with 17 significant digits so that a write/parse round trip
// reproduces the graph.
std::string write_g2o(const PoseGraph& graph);
void save_g2o(const PoseGraph& graph, const std::string& path);

}  // namespace hpgo
