#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "prisched/commands.hpp"
#include "prisched/formats.hpp"

using namespace prisched;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(TEST_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("prisched_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

template <class Cmd>
Outcome call(Cmd cmd, const std::string& cfg, const fs::path& dir, std::string goal = "stability") {
  const auto sc = load_scenario(data(cfg));
  CommandOptions o;
  o.out_dir = dir.string();
  o.goal = std::move(goal);
  std::ostringstream out, err;
  const int code = cmd(sc, o, out, err);
  return {code, out.str(), err.str()};
}

// Value after `key ` on its own line of the analyze report.
std::string field(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

Outcome run_binary(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(PRISCHED_BIN) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = slurp(out);
  o.err = slurp(err);
  return o;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("analyze the six-link graph") {
    const auto r = call(cmd_analyze, "g6.cfg", scratch("g6"));
    CHECK(r.code == exit_code::ok);
    CHECK(field(r.out, "links") == "6");
    CHECK(field(r.out, "conflicts") == "6");
    const auto brute = std::to_string(oracle::delta_dp(oracle::g6()));
    CHECK(field(r.out, "delta_brute") == brute);
    CHECK(field(r.out, "delta") == brute);
    CHECK(field(r.out, "in_a_min") == "yes");
    CHECK(field(r.out, "in_a") == "yes");
    CHECK(field(r.out, "in_a_max") == "yes");
  }

  TEST_CASE("analyze a complete graph") {
    const auto r = call(cmd_analyze, "complete4.cfg", scratch("k4"));
    CHECK(r.code == exit_code::ok);
    CHECK(field(r.out, "delta") == "1");
    CHECK(field(r.out, "efficiency_floor") == "1");
  }

  TEST_CASE("config errors name the missing field") {
    try {
      load_scenario(data("missing_links.cfg"));
      FAIL("expected a parse error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("links") != std::string::npos);
    }
    std::istringstream bad("[topology]\nlinks 2\n[traffic]\nlink 1 kind=bernoulli p=0.3\n");
    try {
      parse_scenario(bad);
      FAIL("expected a parse error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
      CHECK(std::string(e.what()).find("'p'") != std::string::npos);
    }
  }

  TEST_CASE("synth stability on the star") {
    const auto dir = scratch("star");
    const auto r = call(cmd_synth, "star.cfg", dir);
    CHECK(r.code == exit_code::ok);
    std::ifstream in(dir / "priority.txt");
    const auto p = parse_priority(in);
    CHECK(p == Priority({2, 4, 3, 1}));
    CHECK(p.rank(0) == 2);
  }

  TEST_CASE("synth stability reports infeasibility") {
    const auto dir = scratch("overload");
    const auto r = call(cmd_synth, "clique_overload.cfg", dir);
    CHECK(r.code == exit_code::infeasible);
    CHECK(r.err.find("infeasible") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "priority.txt"));
  }

  TEST_CASE("synth delay on the two-link clique") {
    const auto dir = scratch("delay");
    const auto r = call(cmd_synth, "clique_delay.cfg", dir, "delay");
    CHECK(r.code == exit_code::ok);
    std::ifstream in(dir / "priority.txt");
    CHECK(parse_priority(in) == Priority({2, 1}));
  }

  TEST_CASE("synth randomized writes a decomposition that parses back") {
    const auto dir = scratch("rand");
    const auto r = call(cmd_synth, "randomized.cfg", dir, "randomized");
    REQUIRE(r.code == exit_code::ok);
    std::ifstream in(dir / "decomposition.txt");
    const auto d = parse_decomposition(in, 6);
    CHECK(d.terms.size() <= 7);
    double sum = 0.0;
    for (const auto& t : d.terms) sum += t.weight;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    const auto sc = load_scenario(data("randomized.cfg"));
    const auto a = sc.rates();
    for (int i = 0; i < 6; ++i) CHECK(d.coverage[i] >= a[i] + d.epsilon);
  }

  TEST_CASE("zero traffic gives an all-zero summary") {
    const auto dir = scratch("zero");
    const auto r = call(cmd_simulate, "zero.cfg", dir);
    REQUIRE(r.code == exit_code::ok);
    const auto text = slurp(dir / "summary.csv");
    CHECK(text == "link,rate_in,rate_out,mean_q,max_q,drift,ovf_B0,ovf_B1\n"
                  "1,0,0,0,0,0,0,0\n2,0,0,0,0,0,0,0\n3,0,0,0,0,0,0,0\n");
  }

  TEST_CASE("simulate is byte-identical per seed") {
    for (const char* cfg : {"g6.cfg", "geometric.cfg", "randomized.cfg", "trace.cfg"}) {
      const auto a = scratch("det_a"), b = scratch("det_b");
      REQUIRE(call(cmd_simulate, cfg, a).code == exit_code::ok);
      REQUIRE(call(cmd_simulate, cfg, b).code == exit_code::ok);
      CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
      CHECK_FALSE(slurp(a / "summary.csv").empty());
    }
  }

  TEST_CASE("trace rows follow the slot dynamics") {
    const auto dir = scratch("trace");
    REQUIRE(call(cmd_simulate, "trace.cfg", dir).code == exit_code::ok);
    const auto text = slurp(dir / "trace.csv");
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    CHECK(header.find("slot") == 0);
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 50 * 2);
  }

  TEST_CASE("delay-exponent report for the clique") {
    const auto dir = scratch("exp");
    const auto sc = load_scenario(data("clique_delay.cfg"));
    auto fixed = sc;
    fixed.scheduler.policy = PolicyKind::fixed;
    fixed.scheduler.priority_lines = {{0, 2}, {1, 1}};
    CommandOptions o;
    o.out_dir = dir.string();
    std::ostringstream out, err;
    REQUIRE(cmd_delay_exponent(fixed, o, out, err) == exit_code::ok);
    const auto text = slurp(dir / "exponents.csv");
    CHECK(text.rfind("link,competing_set,exponent,residual,empirical_slope,relative_gap\n", 0) == 0);
    std::istringstream rows(text);
    std::string line;
    std::getline(rows, line);
    std::getline(rows, line);
    // Link 1 competes with link 2: ln 3.5.
    const auto first = line.substr(0, line.find(',', line.find(',') + 1));
    CHECK(first == "1,2");
    const auto rest = line.substr(first.size() + 1);
    CHECK(std::abs(parse_double(rest.substr(0, rest.find(',')), "exponent") - std::log(3.5)) <= 1e-9);
  }

  TEST_CASE("binary exit codes and output directory flag") {
    const auto dir = scratch("bin");
    CHECK(run_binary("--config " + data("g6.cfg") + " analyze", dir).code == 0);
    CHECK(run_binary("--config " + data("clique_overload.cfg") + " synth --goal stability", dir).code == 2);
    const auto bad = run_binary("--config " + data("missing_links.cfg") + " analyze", dir);
    CHECK(bad.code == 1);
    CHECK(bad.err.find("links") != std::string::npos);
    CHECK(run_binary("--config " + data("g6.cfg") + " synth --goal nonsense", dir).code == 1);
    CHECK(run_binary("--config " + data("zero.cfg") + " --out " + (dir / "o").string() + " --quiet simulate", dir).code ==
          0);
    CHECK(fs::exists(dir / "o" / "summary.csv"));
    const auto seeded_a = scratch("seed_a"), seeded_b = scratch("seed_b");
    run_binary("--config " + data("g6.cfg") + " --seed 123 --out " + seeded_a.string() + " simulate", seeded_a);
    run_binary("--config " + data("g6.cfg") + " --seed 124 --out " + seeded_b.string() + " simulate", seeded_b);
    CHECK(slurp(seeded_a / "summary.csv") != slurp(seeded_b / "summary.csv"));
  }
}
