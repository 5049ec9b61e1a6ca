#include "hpgo/g2o_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace hpgo {
namespace {

constexpr const char* kVertexTag = "VERTEX_SE3:QUAT";
constexpr const char* kEdgeTag = "EDGE_SE3:QUAT";

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_double(const std::string& tok, int line_number) {
  char* end = nullptr;
  const double value = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty()) {
    throw MalformedLineError(line_number, "expected a number, got '" + tok + "'");
  }
  return value;
}

NodeId parse_id(const std::string& tok, int line_number) {
  char* end = nullptr;
  const long value = std::strtol(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || tok.empty()) {
    throw MalformedLineError(line_number, "expected an integer id, got '" + tok + "'");
  }
  return static_cast<NodeId>(value);
}

Pose parse_pose(const std::vector<std::string>& tokens, std::size_t offset,
                int line_number) {
  double v[7];
  for (int k = 0; k < 7; ++k) v[k] = parse_double(tokens[offset + k], line_number);
  const Eigen::Quaterniond q(v[6], v[3], v[4], v[5]);  // file order qx qy qz qw
  if (q.norm() < 1e-6) {
    throw MalformedLineError(line_number, "quaternion has near-zero norm");
  }
  return Pose(q, Eigen::Vector3d(v[0], v[1], v[2]));
}

void append_number(std::string& out, double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  out += ' ';
  out += buf;
}

}  // namespace

G2oParseResult parse_g2o(std::istream& in) {
  G2oParseResult result;
  struct PendingEdge {
    Edge edge;
    int line_number;
  };
  std::vector<PendingEdge> pending;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::vector<std::string> tokens = tokenize(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens[0] == kVertexTag) {
      if (tokens.size() != 9) {
        throw MalformedLineError(line_number,
                                 "vertex record needs 9 fields, got " +
                                     std::to_string(tokens.size()));
      }
      const NodeId id = parse_id(tokens[1], line_number);
      result.graph.add_node(id, parse_pose(tokens, 2, line_number));
    } else if (tokens[0] == kEdgeTag) {
      if (tokens.size() != 31) {
        throw MalformedLineError(line_number,
                                 "edge record needs 31 fields, got " +
                                     std::to_string(tokens.size()));
      }
      Edge e;
      e.from = parse_id(tokens[1], line_number);
      e.to = parse_id(tokens[2], line_number);
      e.measurement = parse_pose(tokens, 3, line_number);
      std::size_t k = 10;
      for (int r = 0; r < 6; ++r) {
        for (int c = r; c < 6; ++c) {
          const double value = parse_double(tokens[k++], line_number);
          e.information(r, c) = value;
          e.information(c, r) = value;
        }
      }
      pending.push_back({e, line_number});
    } else {
      ++result.skipped_lines;
    }
  }
  for (const PendingEdge& p : pending) {
    result.graph.add_edge(p.edge);
  }
  return result;
}

G2oParseResult parse_g2o(const std::string& text) {
  std::istringstream in(text);
  return parse_g2o(in);
}

G2oParseResult load_g2o(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return parse_g2o(in);
}

std::string write_g2o(const PoseGraph& graph) {
  std::string out;
  for (const auto& [id, pose] : graph.nodes()) {
    out += kVertexTag;
    out += ' ';
    out += std::to_string(id);
    append_number(out, pose.translation().x());
    append_number(out, pose.translation().y());
    append_number(out, pose.translation().z());
    append_number(out, pose.rotation().x());
    append_number(out, pose.rotation().y());
    append_number(out, pose.rotation().z());
    append_number(out, pose.rotation().w());
    out += '\n';
  }
  for (const Edge& e : graph.edges()) {
    out += kEdgeTag;
    out += ' ';
    out += std::to_string(e.from);
    out += ' ';
    out += std::to_string(e.to);
    append_number(out, e.measurement.translation().x());
    append_number(out, e.measurement.translation().y());
    append_number(out, e.measurement.translation().z());
    append_number(out, e.measurement.rotation().x());
    append_number(out, e.measurement.rotation().y());
    append_number(out, e.measurement.rotation().z());
    append_number(out, e.measurement.rotation().w());
    for (int r = 0; r < 6; ++r) {
      for (int c = r; c < 6; ++c) {
        append_number(out, e.information(r, c));
      }
    }
    out += '\n';
  }
  return out;
}

void save_g2o(const PoseGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << write_g2o(graph);
}

}  // namespace hpgo
