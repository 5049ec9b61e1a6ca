// Command line front end: optimize a g2o file, compare trajectories, or run
// the simulated benchmark sweep. Output is CSV on stdout, diagnostics on
// stderr. Exit codes: 1 for input problems, 2 for optimization failures.

#include <cstdio>
#include <exception>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hpgo/errors.hpp"
#include "hpgo/g2o_io.hpp"
#include "hpgo/hierarchy.hpp"
#include "hpgo/metrics.hpp"
#include "hpgo/optimizer.hpp"
#include "hpgo/phpgo.hpp"
#include "hpgo/sim.hpp"

namespace {

struct CommonOpts {
  std::string mode = "full";
  int window = 100;
  int level_threshold = 300;
  int group_capacity = 3;
  int max_iters = 20;
};

void add_common(CLI::App* cmd, CommonOpts* o) {
  cmd->add_option("--mode", o->mode, "full, top or partial")
      ->check(CLI::IsMember({"full", "top", "partial"}));
  cmd->add_option("--p", o->window, "interior window size for partial mode");
  cmd->add_option("--t", o->level_threshold,
                  "node count that triggers a new hierarchy level");
  cmd->add_option("--kcap", o->group_capacity, "largest allowed group size");
  cmd->add_option("--max-iters", o->max_iters,
                  "iteration cap for each inner solve");
}

hpgo::HierarchyConfig hierarchy_config(const CommonOpts& o) {
  hpgo::HierarchyConfig cfg;
  cfg.level_threshold = o.level_threshold;
  cfg.group_capacity = o.group_capacity;
  return cfg;
}

hpgo::PhpgoConfig phpgo_config(const CommonOpts& o) {
  hpgo::PhpgoConfig cfg;
  cfg.window = o.window;
  cfg.inner.max_iterations = o.max_iters;
  return cfg;
}

// %.17g keeps doubles byte exact across runs; timings get fixed precision
// because they are never compared.
std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string ratios_field(const std::vector<double>& r) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.2f", r[i]);
    if (i) out += ';';
    out += buf;
  }
  return out;
}

int run_optimize(const std::string& input, const std::string& output,
                 const CommonOpts& o) {
  hpgo::G2oParseResult loaded;
  try {
    loaded = hpgo::load_g2o(input);
  } catch (const hpgo::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  if (loaded.skipped_lines > 0) {
    std::fprintf(stderr, "note: skipped %d unrecognized lines\n",
                 loaded.skipped_lines);
  }
  if (loaded.graph.node_count() == 0) {
    std::fprintf(stderr, "error: %s has no vertices\n", input.c_str());
    return 1;
  }
  try {
    hpgo::Hierarchy h =
        hpgo::Hierarchy::from_graph(loaded.graph, hierarchy_config(o));
    const hpgo::NodeId last = loaded.graph.nodes().rbegin()->first;
    const hpgo::OptReport r = hpgo::optimize_mode(
        h, hpgo::mode_from_name(o.mode), last, phpgo_config(o));
    std::printf("mode,nodes,edges,levels,chi2_initial,chi2_final,wall_ms\n");
    std::printf("%s,%zu,%zu,%d,%s,%s,%.3f\n", o.mode.c_str(),
                loaded.graph.node_count(), loaded.graph.edge_count(),
                h.level_count(), num(r.chi2_initial).c_str(),
                num(r.chi2_final).c_str(), r.wall_time_ms);
    if (!output.empty()) {
      hpgo::save_g2o(h.level(0).graph, output);
    }
  } catch (const hpgo::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

int run_metrics(const std::string& est_path, const std::string& gt_path) {
  try {
    const hpgo::Trajectory est = hpgo::load_trajectory(est_path);
    const hpgo::Trajectory gt = hpgo::load_trajectory(gt_path);
    const hpgo::MetricReport m = hpgo::relative_errors(gt, est);
    std::printf("ate,are,n_pairs\n");
    std::printf("%s,%s,%d\n", num(m.ate).c_str(), num(m.are).c_str(),
                m.n_pairs);
  } catch (const hpgo::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

int run_bench(const std::string& sizes_csv, std::uint64_t seed,
              const CommonOpts& o) {
  std::vector<int> sizes;
  std::stringstream ss(sizes_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      const int n = std::stoi(tok);
      if (n < 2) throw std::invalid_argument(tok);
      sizes.push_back(n);
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: bad size '%s'\n", tok.c_str());
      return 1;
    }
  }
  std::printf(
      "n_nodes,mode,wall_ms,chi2_final,ate,are,levels,reduction_rates\n");
  for (const int n : sizes) {
    hpgo::SimConfig scfg;
    scfg.nodes = n;
    scfg.seed = seed;
    const hpgo::SimResult sim = hpgo::simulate(scfg);
    for (const char* mode : {"full", "top", "partial"}) {
      try {
        hpgo::Hierarchy h =
            hpgo::Hierarchy::from_graph(sim.graph, hierarchy_config(o));
        const hpgo::NodeId last = sim.graph.nodes().rbegin()->first;
        const hpgo::OptReport r = hpgo::optimize_mode(
            h, hpgo::mode_from_name(mode), last, phpgo_config(o));
        const hpgo::MetricReport m = hpgo::relative_errors(
            sim.ground_truth, hpgo::trajectory_of(h.level(0).graph));
        std::printf("%d,%s,%.3f,%s,%s,%s,%d,%s\n", n, mode, r.wall_time_ms,
                    num(r.chi2_final).c_str(), num(m.ate).c_str(),
                    num(m.are).c_str(), h.level_count(),
                    ratios_field(h.reduction_ratios()).c_str());
      } catch (const hpgo::Error& e) {
        std::fprintf(stderr, "error: n=%d mode=%s: %s\n", n, mode, e.what());
        return 2;
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical pose graph optimization"};
  app.require_subcommand(1);

  CommonOpts opt_opts;
  std::string opt_input;
  std::string opt_output;
  CLI::App* opt = app.add_subcommand("optimize", "optimize a g2o pose graph");
  opt->add_option("input", opt_input, "g2o file to read")->required();
  opt->add_option("-o,--output", opt_output, "write optimized graph here");
  add_common(opt, &opt_opts);

  std::string met_est;
  std::string met_gt;
  CLI::App* met =
      app.add_subcommand("metrics", "segment errors of one trajectory");
  met->add_option("estimate", met_est, "estimated trajectory file")
      ->required();
  met->add_option("--gt", met_gt, "reference trajectory file")->required();

  CommonOpts bench_opts;
  std::string bench_sizes = "1000,3000,9000,27000";
  std::uint64_t bench_seed = 1;
  CLI::App* bench =
      app.add_subcommand("bench", "simulate and time every mode");
  bench->add_option("--sizes", bench_sizes, "comma separated node counts");
  bench->add_option("--seed", bench_seed, "simulation seed");
  add_common(bench, &bench_opts);

  CLI11_PARSE(app, argc, argv);

  if (opt->parsed()) return run_optimize(opt_input, opt_output, opt_opts);
  if (met->parsed()) return run_metrics(met_est, met_gt);
  return run_bench(bench_sizes, bench_seed, bench_opts);
}
