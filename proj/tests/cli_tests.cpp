// End-to-end checks of the command-line binary: argv[1] is the CLI path,
// argv[2] a scratch directory. Every run's manifest (stdout JSON) must match
// the files it wrote, failures must follow the exit-code contract and leave
// no partial output behind.
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int g_failures = 0;
int g_checks = 0;

#define EXPECT(cond)                                                      \
  do {                                                                    \
    ++g_checks;                                                           \
    if (!(cond)) {                                                        \
      ++g_failures;                                                       \
      std::fprintf(stderr, "FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond); \
    }                                                                     \
  } while (0)

std::string g_cli;
fs::path g_tmp;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

RunResult run(const std::string& args) {
  fs::path so = g_tmp / "stdout.txt";
  fs::path se = g_tmp / "stderr.txt";
  std::string cmd = g_cli + " " + args + " > " + so.string() + " 2> " +
                    se.string();
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.code = (rc == -1) ? -1 : WEXITSTATUS(rc);
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

// every manifest lists its outputs with digests that must match the files
void check_manifest_outputs(const json& man) {
  for (const json& o : man.at("outputs")) {
    fs::path p = o.at("path").get<std::string>();
    EXPECT(fs::exists(p));
    EXPECT(o.at("digest").get<std::string>() ==
           coltree::fnv1a64_hex(slurp(p)));
    EXPECT(!fs::exists(p.string() + ".tmp"));
  }
}

void test_version_and_usage_errors() {
  RunResult v = run("--version");
  EXPECT(v.code == 0);
  EXPECT(v.out == "0.1.0\n");
  EXPECT(run("").code == 2);             // a subcommand is required
  EXPECT(run("frobnicate").code == 2);   // unknown subcommand
  EXPECT(run("classify").code == 2);     // missing required --env
}

void test_classify_manifest_and_report() {
  fs::path report = g_tmp / "report.json";
  RunResult r = run("classify --env builtin:etawalk,h=0.6 --out " +
                    report.string());
  EXPECT(r.code == 0);
  json man = json::parse(r.out);
  EXPECT(man.at("command").get<std::string>() == "classify");
  EXPECT(man.at("version").get<std::string>() == "0.1.0");
  EXPECT(man.at("config").at("arg").get<std::string>() ==
         "builtin:etawalk,h=0.6");
  EXPECT(man.at("config").at("env").at("b").get<int>() == 2);
  EXPECT(man.at("wall_ms").is_number_integer());
  EXPECT(man.at("outputs").size() == 1);
  check_manifest_outputs(man);
  json rep = json::parse(slurp(report));
  EXPECT(rep.at("y_regime").get<std::string>() == "Finite");
  EXPECT(rep == man.at("result"));
}

void test_builtin_equals_config_file() {
  fs::path a = g_tmp / "direct.json";
  fs::path b = g_tmp / "from_file.json";
  EXPECT(run("classify --env builtin:pointmass,b=2,c=0.4 --out " + a.string())
             .code == 0);
  // write the echoed env to a file and classify that
  json man = json::parse(
      run("classify --env builtin:pointmass,b=2,c=0.4 --out " + a.string())
          .out);
  fs::path cfg = g_tmp / "pm.json";
  spit(cfg, man.at("config").at("env").dump());
  EXPECT(run("classify --env " + cfg.string() + " --out " + b.string()).code ==
         0);
  EXPECT(slurp(a) == slurp(b));
}

void test_parse_and_domain_exit_codes() {
  fs::path bad = g_tmp / "bad_env.json";
  spit(bad, "{\"b\": 2}");
  RunResult r = run("classify --env " + bad.string());
  EXPECT(r.code == 2);
  EXPECT(r.err.find("env config") != std::string::npos);  // field-level message

  RunResult missing = run("classify --env " + (g_tmp / "nope.json").string());
  EXPECT(missing.code == 2);
  EXPECT(missing.err.find("cannot open file") != std::string::npos);

  // moment undefined at the probe power: domain error, and the output file
  // must not appear, not even partially
  fs::path never = g_tmp / "never.csv";
  RunResult dom = run("simulate tree --env builtin:etawalk,h=0.5 --depth 3 "
                      "--s -0.75 --out " +
                      never.string());
  EXPECT(dom.code == 3);
  EXPECT(!fs::exists(never));
  EXPECT(!fs::exists(never.string() + ".tmp"));
}

void test_sweep_and_rate() {
  fs::path csv = g_tmp / "sweep.csv";
  RunResult r = run("sweep --family pointmass-b2 --param-range 0.2:0.7 "
                    "--grid 6 --target lambda1 --out " +
                    csv.string());
  EXPECT(r.code == 0);
  json man = json::parse(r.out);
  check_manifest_outputs(man);
  double root = man.at("result").at("root").get<double>();
  EXPECT(std::abs(root - 0.5) < 2e-4);
  std::string text = slurp(csv);
  EXPECT(text.rfind("param,lambda1\n", 0) == 0);
  EXPECT(run("sweep --family pointmass-b2 --param-range 0.2 --grid 6 "
             "--target lambda1 --out " +
             csv.string())
             .code == 2);
  EXPECT(run("sweep --family nosuch --param-range 0.2:0.7 --grid 6 "
             "--target lambda1 --out " +
             csv.string())
             .code == 2);
  EXPECT(run("sweep --family pointmass-b2 --param-range 0.2:0.7 --grid 6 "
             "--target perron --out " +
             csv.string())
             .code == 1);

  fs::path rate = g_tmp / "rate.csv";
  RunResult rr = run("rate-function --env builtin:expneg,b=2,mu=0,sigma=1 "
                     "--z 0.25:0.75:3 --out " +
                     rate.string());
  EXPECT(rr.code == 0);
  check_manifest_outputs(json::parse(rr.out));
  std::istringstream lines(slurp(rate));
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT(rows == 4);
  EXPECT(run("rate-function --env builtin:expneg,b=2,mu=0,sigma=1 --z 1:2 "
             "--out " +
             rate.string())
             .code == 2);
}

void test_simulate_tree_determinism() {
  fs::path t1 = g_tmp / "t1.csv";
  fs::path t2 = g_tmp / "t2.csv";
  fs::path t3 = g_tmp / "t3.csv";
  std::string base = "simulate tree --env builtin:etawalk,h=0.5 --depth 5 "
                     "--trials 20 --seed 7 --out ";
  RunResult r1 = run(base + t1.string());
  RunResult r2 = run(base + t2.string());
  RunResult r3 = run("simulate --threads 4 tree --env builtin:etawalk,h=0.5 "
                     "--depth 5 --trials 20 --seed 7 --out " +
                     t3.string());
  EXPECT(r1.code == 0);
  EXPECT(r2.code == 0);
  EXPECT(r3.code == 0);
  EXPECT(slurp(t1) == slurp(t2));  // same seed: byte-identical
  EXPECT(slurp(t1) == slurp(t3));  // thread count cannot change the bytes
  json m1 = json::parse(r1.out);
  json m3 = json::parse(r3.out);
  EXPECT(m1.at("outputs")[0].at("digest") == m3.at("outputs")[0].at("digest"));
  EXPECT(m1.at("seed").get<std::uint64_t>() == 7);
  EXPECT(m3.at("config").at("threads").get<int>() == 4);
  check_manifest_outputs(m1);

  fs::path t4 = g_tmp / "t4.csv";
  RunResult r4 = run("simulate tree --env builtin:etawalk,h=0.5 --depth 5 "
                     "--trials 20 --seed 8 --out " +
                     t4.string());
  EXPECT(r4.code == 0);
  EXPECT(slurp(t1) != slurp(t4));  // the seed is honoured
}

void test_simulate_walk_and_rde() {
  fs::path wj = g_tmp / "walk.json";
  RunResult w = run("simulate walk --spec builtin:etawalk,h=0.5 --steps 500 "
                    "--seed 3 --cut 8 --out " +
                    wj.string());
  EXPECT(w.code == 0);
  json man = json::parse(w.out);
  check_manifest_outputs(man);
  json summary = json::parse(slurp(wj));
  EXPECT(summary.at("steps").get<long long>() == 500);
  EXPECT(summary.at("occupation_by_depth").size() == 9);
  EXPECT(summary == man.at("result"));

  fs::path rde = g_tmp / "rde.csv";
  RunResult conv = run("simulate rde --env builtin:pointmass,b=2,c=0.3 "
                       "--pool 50 --iters 30 --seed 1 --out " +
                       rde.string());
  EXPECT(conv.code == 0);
  json mc = json::parse(conv.out);
  EXPECT(mc.at("result").at("diverged").get<bool>() == false);
  EXPECT(!mc.at("result").contains("diverged_iteration"));
  EXPECT(slurp(rde).rfind("iteration,component,mean,ks_to_previous\n", 0) == 0);

  RunResult div = run("simulate rde --env builtin:pointmass,b=2,c=0.8 "
                      "--pool 50 --iters 100 --seed 1 --out " +
                      rde.string());
  EXPECT(div.code == 0);
  json md = json::parse(div.out);
  EXPECT(md.at("result").at("diverged").get<bool>() == true);
  EXPECT(md.at("result").at("diverged_iteration").get<int>() == 72);

  EXPECT(run("simulate rde --env builtin:etawalk,h=0.5 --pool 50 --iters 5 "
             "--seed 1 --out " +
             rde.string())
             .code == 1);  // joint sibling labels are rejected as invalid
}

void test_simulate_brw_and_fpp() {
  fs::path runs = g_tmp / "brw.csv";
  fs::path trace = g_tmp / "trace.csv";
  RunResult r = run("simulate brw --spec builtin:pointmass,b=2,c=0.25 --t 8 "
                    "--trials 2 --seed 1 --window 5 --max-frontier 4096 "
                    "--out " +
                    runs.string() + " --trace-out " + trace.string());
  EXPECT(r.code == 0);
  json man = json::parse(r.out);
  EXPECT(man.at("outputs").size() == 2);
  check_manifest_outputs(man);
  EXPECT(man.at("result").at("degenerate").get<bool>() == true);
  EXPECT(std::abs(man.at("result").at("x0").get<double>() - 0.25) < 1e-9);
  std::string sruns = slurp(runs);
  EXPECT(sruns.rfind("# x0=0.25\n", 0) == 0);
  EXPECT(sruns.find("trial,mu_final,mu_over_t,sound") != std::string::npos);
  EXPECT(slurp(trace).rfind("generation,mu_t,frontier_size,pruned,truncated\n",
                            0) == 0);

  fs::path fpp = g_tmp / "fpp.csv";
  RunResult f = run("simulate fpp --spec builtin:pointmass,b=2,c=1 --t 2.5 "
                    "--depth 3 --trials 2 --seed 9 --out " +
                    fpp.string());
  EXPECT(f.code == 0);
  check_manifest_outputs(json::parse(f.out));
  std::string body = slurp(fpp);
  EXPECT(body.rfind("trial,level,count\n", 0) == 0);
  EXPECT(body.find("0,2,4\n") != std::string::npos);
  EXPECT(body.find("0,3,0\n") != std::string::npos);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: cli_tests <cli-binary> <tmpdir>\n");
    return 2;
  }
  g_cli = argv[1];
  g_tmp = argv[2];
  fs::create_directories(g_tmp);

  test_version_and_usage_errors();
  test_classify_manifest_and_report();
  test_builtin_equals_config_file();
  test_parse_and_domain_exit_codes();
  test_sweep_and_rate();
  test_simulate_tree_determinism();
  test_simulate_walk_and_rde();
  test_simulate_brw_and_fpp();

  if (g_failures == 0) {
    std::printf("cli_tests: %d checks passed\n", g_checks);
    return 0;
  }
  std::fprintf(stderr, "cli_tests: %d of %d checks failed\n", g_failures,
               g_checks);
  return 1;
}
