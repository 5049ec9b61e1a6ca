#include "hpgo/metrics.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hpgo/errors.hpp"

namespace hpgo {
namespace {

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

void append_number(std::string& out, double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  out += ' ';
  out += buf;
}

}  // namespace

Trajectory trajectory_of(const PoseGraph& g) {
  Trajectory t;
  for (const auto& [id, pose] : g.nodes()) {
    t.emplace(id, pose);
  }
  return t;
}

namespace {

std::vector<double> cumulative_distance(const std::vector<Pose>& poses) {
  std::vector<double> d(poses.size(), 0.0);
  for (std::size_t i = 1; i < poses.size(); ++i) {
    d[i] = d[i - 1] +
           (poses[i].translation() - poses[i - 1].translation()).norm();
  }
  return d;
}

std::vector<double> segments_for_length(double total) {
  if (total <= 0.0) {
    throw PathTooShortError("reference path has no length");
  }
  std::vector<double> out;
  if (total >= 800.0) {
    for (int k = 1; k <= 8; ++k) {
      out.push_back(100.0 * k);
    }
  } else {
    for (int k = 1; k <= 8; ++k) {
      out.push_back(total * k / 10.0);
    }
  }
  return out;
}

}  // namespace

std::vector<double> default_segments(const Trajectory& gt) {
  if (gt.size() < 2) {
    throw PathTooShortError("need at least two poses");
  }
  std::vector<Pose> poses;
  poses.reserve(gt.size());
  for (const auto& [id, pose] : gt) {
    (void)id;
    poses.push_back(pose);
  }
  return segments_for_length(cumulative_distance(poses).back());
}

MetricReport relative_errors(const Trajectory& gt, const Trajectory& est,
                             const std::vector<double>& segments) {
  if (gt.size() != est.size()) {
    throw MismatchedIdsError("trajectories differ in size");
  }
  std::vector<Pose> ref, hyp;
  ref.reserve(gt.size());
  hyp.reserve(gt.size());
  {
    auto a = gt.begin();
    auto b = est.begin();
    for (; a != gt.end(); ++a, ++b) {
      if (a->first != b->first) {
        throw MismatchedIdsError("trajectories hold different ids");
      }
      ref.push_back(a->second);
      hyp.push_back(b->second);
    }
  }
  if (ref.size() < 2) {
    throw PathTooShortError("need at least two poses");
  }
  const std::vector<double> dist = cumulative_distance(ref);
  std::vector<double> lengths = segments;
  if (lengths.empty()) {
    lengths = segments_for_length(dist.back());
  }
  for (double len : lengths) {
    if (len <= 0.0) {
      throw Error("segment lengths must be positive");
    }
  }

  double ate_sum = 0.0;
  double are_sum = 0.0;
  int pairs = 0;
  const std::size_t n = ref.size();
  for (double len : lengths) {
    std::size_t j = 1;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (j <= i) {
        j = i + 1;
      }
      while (j < n && dist[j] < dist[i] + len) {
        ++j;
      }
      if (j >= n) {
        break;
      }
      const Pose rel_ref = ref[i].inverse() * ref[j];
      const Pose rel_hyp = hyp[i].inverse() * hyp[j];
      const Pose err = rel_ref.inverse() * rel_hyp;
      ate_sum += err.translation().norm() / len;
      are_sum += err.rotation_angle() / len;
      ++pairs;
    }
  }
  if (pairs == 0) {
    throw PathTooShortError("no segment pair fits the path");
  }
  MetricReport out;
  out.ate = ate_sum / pairs;
  out.are = are_sum / pairs;
  out.n_pairs = pairs;
  return out;
}

Trajectory parse_trajectory(std::istream& in) {
  Trajectory t;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) {
      tokens.push_back(tok);
    }
    if (tokens.empty() || tokens[0][0] == '#') {
      continue;
    }
    if (tokens.size() != 8) {
      throw MalformedLineError(line_number, "expected 8 fields, got " +
                                               std::to_string(tokens.size()));
    }
    const NodeId id = parse_id(tokens[0], line_number);
    double v[7];
    for (int k = 0; k < 7; ++k) {
      v[k] = parse_double(tokens[k + 1], line_number);
    }
    const Eigen::Quaterniond q(v[6], v[3], v[4], v[5]);  // file order qx qy qz qw
    if (q.norm() < 1e-6) {
      throw MalformedLineError(line_number, "quaternion has near-zero norm");
    }
    if (!t.emplace(id, Pose(q, Eigen::Vector3d(v[0], v[1], v[2]))).second) {
      throw MalformedLineError(line_number,
                               "duplicate id " + std::to_string(id));
    }
  }
  return t;
}

Trajectory parse_trajectory(const std::string& text) {
  std::istringstream in(text);
  return parse_trajectory(in);
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open '" + path + "'");
  }
  return parse_trajectory(in);
}

std::string write_trajectory(const Trajectory& t) {
  std::string out;
  for (const auto& [id, pose] : t) {
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
  return out;
}

void save_trajectory(const Trajectory& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  out << write_trajectory(t);
}

}  // namespace hpgo
