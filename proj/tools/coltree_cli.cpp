// coltree command line: classification, sweeps, and simulators over the C
// API. Every run prints a manifest JSON to stdout (command, config echo,
// seed, version, wall clock, output digests); data files go to --out and are
// written atomically (temp + rename) so failures leave no partial files.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coltree/coltree.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct ApiError {
  int status;
  std::string message;
};

void check(int status) {
  if (status != COLTREE_OK) throw ApiError{status, coltree_last_error()};
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  coltree_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ApiError{COLTREE_ERR_PARSE, "cannot open file: " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ApiError{COLTREE_ERR_INVALID, "cannot write: " + tmp};
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ApiError{COLTREE_ERR_INVALID, "write failed: " + tmp};
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw ApiError{COLTREE_ERR_INVALID, "rename failed: " + path};
  }
}

std::string digest(const std::string& content) {
  char* hex = nullptr;
  check(coltree_fnv1a64_hex(content.c_str(), &hex));
  return take_string(hex);
}

// Spec arguments are either a config file path or "builtin:<name,params>".
bool is_builtin(const std::string& arg) { return arg.rfind("builtin:", 0) == 0; }

coltree_env* load_env(const std::string& arg) {
  coltree_env* env = nullptr;
  if (is_builtin(arg)) {
    check(coltree_env_builtin(arg.substr(8).c_str(), &env));
  } else {
    check(coltree_env_parse(read_file(arg).c_str(), &env));
  }
  return env;
}

coltree_walk* load_walk(const std::string& arg) {
  coltree_walk* walk = nullptr;
  if (is_builtin(arg)) {
    check(coltree_walk_builtin(arg.substr(8).c_str(), &walk));
  } else {
    check(coltree_walk_parse(read_file(arg).c_str(), &walk));
  }
  return walk;
}

coltree_brw* load_brw(const std::string& arg) {
  coltree_brw* brw = nullptr;
  if (is_builtin(arg)) {
    check(coltree_brw_builtin(arg.substr(8).c_str(), &brw));
  } else {
    check(coltree_brw_parse(read_file(arg).c_str(), &brw));
  }
  return brw;
}

json env_echo(const std::string& arg, coltree_env* env) {
  char* js = nullptr;
  check(coltree_env_to_json(env, &js));
  return json{{"arg", arg}, {"env", json::parse(take_string(js))}};
}

std::vector<double> split_colon(const std::string& text, std::size_t want,
                                const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(part, &pos));
      if (pos != part.size()) throw std::invalid_argument("trailing");
    } catch (...) {
      throw ApiError{COLTREE_ERR_PARSE, what + ": bad number \"" + part + "\""};
    }
  }
  if (out.size() != want)
    throw ApiError{COLTREE_ERR_PARSE,
                   what + ": expected " + std::to_string(want) +
                       " colon-separated values"};
  return out;
}

struct Manifest {
  json j;
  std::chrono::steady_clock::time_point started;

  explicit Manifest(const std::string& command) {
    started = std::chrono::steady_clock::now();
    j["command"] = command;
    j["version"] = coltree_version();
    j["outputs"] = json::array();
  }
  void output(const std::string& path, const std::string& content) {
    atomic_write(path, content);
    j["outputs"].push_back({{"path", path}, {"digest", digest(content)}});
  }
  void finish() {
    auto wall = std::chrono::steady_clock::now() - started;
    j["wall_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(wall).count();
    std::printf("%s\n", j.dump(2).c_str());
  }
};

int thread_default() {
  const char* env = std::getenv("COLTREE_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random environments on coloured trees: classify and simulate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", coltree_version());

  // Trials run sequentially in deterministic stream order; --threads is
  // accepted for interface stability and recorded in the manifest.
  int threads = thread_default();

  std::string env_arg, spec_arg, out_path, trace_path;
  std::string family = "etawalk", target = "lambda1", range_arg, z_arg;
  double eps_critical = 1e-4, s_probe = 1.0, window = 30.0, t_reach = 0.0;
  double s_max = 64.0;
  int grid = 33, depth = 6, iters = 100, cut = 32, t_max = 50;
  long long trials = 100, pool = 100000, steps = 100000,
            max_frontier = 1000000;
  std::uint64_t seed = 1;

  CLI::App* cmd_classify =
      app.add_subcommand("classify", "regime report for an environment");
  cmd_classify->add_option("--env", env_arg, "env config file or builtin:<name>")
      ->required();
  cmd_classify->add_option("--eps-critical", eps_critical,
                           "half-width of the critical band");
  cmd_classify->add_option("--s-max", s_max, "search bound for inf over s");
  cmd_classify->add_option("--out", out_path, "also write the report JSON here");

  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "constant vs parameter over a built-in family, with root");
  cmd_sweep->add_option("--family", family, "etawalk | pointmass-b2 | expneg-b2")
      ->required();
  cmd_sweep->add_option("--param-range", range_arg, "LO:HI")->required();
  cmd_sweep->add_option("--target", target, "lambda1 | lambda");
  cmd_sweep->add_option("--grid", grid, "grid points in the CSV");
  cmd_sweep->add_option("--out", out_path, "CSV path")->required();

  CLI::App* cmd_rate = app.add_subcommand(
      "rate-function", "large-deviation rate on a grid of z values");
  cmd_rate->add_option("--env", env_arg, "env config file or builtin:<name>")
      ->required();
  cmd_rate->add_option("--z", z_arg, "LO:HI:N grid")->required();
  cmd_rate->add_option("--out", out_path, "CSV path")->required();

  CLI::App* cmd_sim = app.add_subcommand("simulate", "Monte Carlo simulators");
  cmd_sim->require_subcommand(1);
  cmd_sim->add_option("--threads", threads,
                      "trial parallelism (output is order-stable)");

  CLI::App* sim_tree = cmd_sim->add_subcommand(
      "tree", "level sums of path-product powers vs the exact oracle");
  sim_tree->add_option("--env", env_arg, "env config file or builtin:<name>")
      ->required();
  sim_tree->add_option("--depth", depth, "tree depth")->required();
  sim_tree->add_option("--trials", trials, "independent trees");
  sim_tree->add_option("--seed", seed, "RNG seed");
  sim_tree->add_option("--s", s_probe, "power applied to path products");
  sim_tree->add_option("--out", out_path, "CSV path")->required();

  CLI::App* sim_walk = cmd_sim->add_subcommand(
      "walk", "single random-walk trajectory in a sampled environment");
  sim_walk->add_option("--spec", spec_arg, "walk config file or builtin:<name>")
      ->required();
  sim_walk->add_option("--steps", steps, "number of steps");
  sim_walk->add_option("--seed", seed, "RNG seed");
  sim_walk->add_option("--cut", cut, "occupation histogram depth cut");
  sim_walk->add_option("--out", out_path, "summary JSON path")->required();

  CLI::App* sim_rde = cmd_sim->add_subcommand(
      "rde", "population dynamics for the distributional fixed point");
  sim_rde->add_option("--env", env_arg, "env config file or builtin:<name>")
      ->required();
  sim_rde->add_option("--pool", pool, "pool size per component");
  sim_rde->add_option("--iters", iters, "iterations");
  sim_rde->add_option("--seed", seed, "RNG seed");
  sim_rde->add_option("--out", out_path, "CSV path")->required();

  CLI::App* sim_brw = cmd_sim->add_subcommand(
      "brw", "minimal displacement of the multi-type branching walk");
  sim_brw->add_option("--spec", spec_arg, "step config file or builtin:<name>")
      ->required();
  sim_brw->add_option("--t", t_max, "generations per run");
  sim_brw->add_option("--trials", trials, "independent runs");
  sim_brw->add_option("--seed", seed, "RNG seed");
  sim_brw->add_option("--window", window, "prune particles above min + window");
  sim_brw->add_option("--max-frontier", max_frontier,
                      "hard cap on surviving particles per generation");
  sim_brw->add_option("--out", out_path, "per-trial CSV path")->required();
  sim_brw->add_option("--trace-out", trace_path,
                      "optional per-generation trace CSV for one run");

  CLI::App* sim_fpp = cmd_sim->add_subcommand(
      "fpp", "signed first-passage reach counts per level");
  sim_fpp->add_option("--spec", spec_arg, "step config file or builtin:<name>")
      ->required();
  sim_fpp->add_option("--t", t_reach, "time horizon (may be negative)")
      ->required();
  sim_fpp->add_option("--depth", depth, "tree depth")->required();
  sim_fpp->add_option("--trials", trials, "independent trees");
  sim_fpp->add_option("--seed", seed, "RNG seed");
  sim_fpp->add_option("--out", out_path, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_classify) {
      Manifest man("classify");
      coltree_env* env = load_env(env_arg);
      man.j["config"] = env_echo(env_arg, env);
      man.j["config"]["eps_critical"] = eps_critical;
      man.j["config"]["s_max"] = s_max;
      char* rep = nullptr;
      int status = coltree_classify_json(env, eps_critical, s_max, &rep);
      coltree_env_free(env);
      check(status);
      std::string report = take_string(rep);
      man.j["result"] = json::parse(report);
      if (!out_path.empty()) man.output(out_path, report + "\n");
      man.finish();
    } else if (*cmd_sweep) {
      Manifest man("sweep");
      std::vector<double> r = split_colon(range_arg, 2, "--param-range");
      man.j["config"] = {{"family", family},
                         {"param_range", range_arg},
                         {"target", target},
                         {"grid", grid}};
      char* csv = nullptr;
      double root = 0.0;
      check(coltree_sweep_csv(family.c_str(), r[0], r[1], grid, target.c_str(),
                              &csv, &root));
      man.output(out_path, take_string(csv));
      man.j["result"] = {{"root", root}, {"target", target}};
      man.finish();
    } else if (*cmd_rate) {
      Manifest man("rate-function");
      std::vector<double> z = split_colon(z_arg, 3, "--z");
      int n = static_cast<int>(z[2]);
      coltree_env* env = load_env(env_arg);
      man.j["config"] = env_echo(env_arg, env);
      man.j["config"]["z"] = z_arg;
      char* csv = nullptr;
      int status = coltree_rate_function_csv(env, z[0], z[1], n, &csv);
      coltree_env_free(env);
      check(status);
      man.output(out_path, take_string(csv));
      man.j["result"] = {{"points", n}};
      man.finish();
    } else if (*sim_tree) {
      Manifest man("simulate tree");
      coltree_env* env = load_env(env_arg);
      man.j["config"] = env_echo(env_arg, env);
      man.j["config"]["depth"] = depth;
      man.j["config"]["trials"] = trials;
      man.j["config"]["s"] = s_probe;
      man.j["config"]["threads"] = threads;
      man.j["seed"] = seed;
      char* csv = nullptr;
      int status = coltree_tree_level_csv(env, depth, trials, seed, s_probe, &csv);
      coltree_env_free(env);
      check(status);
      man.output(out_path, take_string(csv));
      man.finish();
    } else if (*sim_walk) {
      Manifest man("simulate walk");
      coltree_walk* walk = load_walk(spec_arg);
      char* js = nullptr;
      check(coltree_walk_to_json(walk, &js));
      man.j["config"] = {{"arg", spec_arg}, {"walk", json::parse(take_string(js))}};
      man.j["config"]["steps"] = steps;
      man.j["config"]["cut"] = cut;
      man.j["config"]["threads"] = threads;
      man.j["seed"] = seed;
      char* summary = nullptr;
      int status = coltree_walk_simulate_json(walk, steps, seed, cut, &summary);
      coltree_walk_free(walk);
      check(status);
      std::string text = take_string(summary);
      man.output(out_path, text + "\n");
      man.j["result"] = json::parse(text);
      man.finish();
    } else if (*sim_rde) {
      Manifest man("simulate rde");
      coltree_env* env = load_env(env_arg);
      man.j["config"] = env_echo(env_arg, env);
      man.j["config"]["pool"] = pool;
      man.j["config"]["iters"] = iters;
      man.j["config"]["threads"] = threads;
      man.j["seed"] = seed;
      char* csv = nullptr;
      int diverged = 0, diverged_iteration = 0;
      int status = coltree_rde_csv(env, pool, iters, seed, &csv, &diverged,
                                   &diverged_iteration);
      coltree_env_free(env);
      check(status);
      man.output(out_path, take_string(csv));
      man.j["result"]["diverged"] = diverged != 0;
      if (diverged != 0)
        man.j["result"]["diverged_iteration"] = diverged_iteration;
      man.finish();
    } else if (*sim_brw) {
      Manifest man("simulate brw");
      coltree_brw* brw = load_brw(spec_arg);
      char* js = nullptr;
      check(coltree_brw_to_json(brw, &js));
      man.j["config"] = {{"arg", spec_arg}, {"brw", json::parse(take_string(js))}};
      man.j["config"]["t"] = t_max;
      man.j["config"]["trials"] = trials;
      man.j["config"]["window"] = window;
      man.j["config"]["max_frontier"] = max_frontier;
      man.j["config"]["threads"] = threads;
      man.j["seed"] = seed;
      double x0 = 0.0;
      int degenerate = 0;
      int status = coltree_brw_speed(brw, 0.0, &x0, &degenerate);
      char* csv = nullptr;
      if (status == COLTREE_OK)
        status = coltree_brw_speed_csv(brw, t_max, trials, seed, window,
                                       max_frontier, &csv);
      char* trace = nullptr;
      if (status == COLTREE_OK && !trace_path.empty())
        status = coltree_brw_trace_csv(brw, t_max, seed, window, max_frontier,
                                       &trace);
      coltree_brw_free(brw);
      check(status);
      man.output(out_path, take_string(csv));
      if (!trace_path.empty()) man.output(trace_path, take_string(trace));
      man.j["result"] = {{"x0", x0}, {"degenerate", degenerate != 0}};
      man.finish();
    } else if (*sim_fpp) {
      Manifest man("simulate fpp");
      coltree_brw* brw = load_brw(spec_arg);
      char* js = nullptr;
      check(coltree_brw_to_json(brw, &js));
      man.j["config"] = {{"arg", spec_arg}, {"brw", json::parse(take_string(js))}};
      man.j["config"]["t"] = t_reach;
      man.j["config"]["depth"] = depth;
      man.j["config"]["trials"] = trials;
      man.j["config"]["threads"] = threads;
      man.j["seed"] = seed;
      char* csv = nullptr;
      int status = coltree_fpp_csv(brw, t_reach, depth, trials, seed, &csv);
      coltree_brw_free(brw);
      check(status);
      man.output(out_path, take_string(csv));
      man.finish();
    }
  } catch (const ApiError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    if (e.status == COLTREE_ERR_PARSE) return 2;
    if (e.status == COLTREE_ERR_DOMAIN) return 3;
    return 1;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
