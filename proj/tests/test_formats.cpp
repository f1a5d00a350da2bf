#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "prisched/formats.hpp"

using namespace prisched;

namespace {

template <class F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("formats") {
  TEST_CASE("doubles round-trip exactly") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int t = 0; t < 1000; ++t) {
      const double v = u(rng) * std::pow(10.0, t % 20 - 10);
      CHECK(parse_double(format_double(v), "v") == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(kInfinity) == "inf");
    CHECK(parse_double("inf", "v") == kInfinity);
    CHECK_THROWS_AS(parse_double("0.5x", "v"), InputError);
    CHECK_THROWS_AS(parse_int("3.0", "n"), InputError);
  }

  TEST_CASE("tokenize drops comments") {
    CHECK(tokenize("  edge 1 2 # note") == std::vector<std::string>{"edge", "1", "2"});
    CHECK(tokenize("# only").empty());
  }

  TEST_CASE("graph round-trip") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
      const auto g = oracle::random_graph(1 + t % 9, 0.4, rng);
      std::stringstream ss;
      write_graph(ss, g);
      const auto back = parse_graph(ss);
      REQUIRE(back.size() == g.size());
      CHECK(back.edge_count() == g.edge_count());
      for (int i = 0; i < g.size(); ++i) CHECK(back.neighbors(i) == g.neighbors(i));
    }
  }

  TEST_CASE("graph parse errors carry line numbers") {
    std::istringstream missing("edge 1 2\n");
    CHECK(error_of([&] { parse_graph(missing); }).find("links") != std::string::npos);
    std::istringstream dup("links 3\nedge 1 2\nedge 2 1\n");
    const auto msg = error_of([&] { parse_graph(dup); });
    CHECK(msg.find("line 3") != std::string::npos);
    std::istringstream range("links 2\nedge 1 3\n");
    CHECK(error_of([&] { parse_graph(range); }).find("line 2") != std::string::npos);
    std::istringstream self("links 2\nedge 2 2\n");
    CHECK_THROWS_AS(parse_graph(self), InputError);
  }

  TEST_CASE("priority round-trip") {
    const Priority p({3, 1, 6, 5, 2, 4});
    std::stringstream ss;
    write_priority(ss, p);
    CHECK(parse_priority(ss) == p);
    std::istringstream gap("priority 1 1\npriority 3 2\n");
    CHECK_THROWS_AS(parse_priority(gap), InputError);
    std::istringstream dup("priority 1 1\npriority 2 1\n");
    CHECK_THROWS_AS(parse_priority(dup), InputError);
  }

  TEST_CASE("decomposition round-trip keeps exact weights") {
    Decomposition d;
    d.terms = {{LinkSet{0, 1, 2}, 0.1 + 0.2}, {LinkSet{3, 5}, 1.0 / 3.0}, {LinkSet{0, 3}, 1.0 - 0.3 - 1.0 / 3.0}};
    d.epsilon = 0.02;
    d.target_scale = 1.0;
    d.residuals = {1e-3, 0.0, 2.0 / 7.0, 0.1, 0.0, 0.0};
    std::stringstream ss;
    write_decomposition(ss, d, 6);
    const auto back = parse_decomposition(ss, 6);
    REQUIRE(back.terms.size() == d.terms.size());
    for (std::size_t k = 0; k < d.terms.size(); ++k) {
      CHECK(back.terms[k].set == d.terms[k].set);
      CHECK(back.terms[k].weight == d.terms[k].weight);
    }
    CHECK(back.epsilon == d.epsilon);
    CHECK(back.target_scale == d.target_scale);
    CHECK(back.residuals == d.residuals);
    CHECK(back.coverage[0] == doctest::Approx(0.3 + (1.0 - 0.3 - 1.0 / 3.0)));

    std::istringstream bad("epsilon 0.1\ntarget_scale 1\nset 1 weight 0.5 members 1 7\n");
    CHECK(error_of([&] { parse_decomposition(bad, 6); }).find("line 3") != std::string::npos);
  }

  TEST_CASE("network round-trip") {
    NetworkParams p;
    p.n_nodes = 10;
    p.area_side = 2.0;
    p.tx_range = 1.0;
    p.seed = 4;
    const auto net = generate_network(p).network;
    std::stringstream ss;
    write_network(ss, net);
    const auto back = parse_network(ss, 1.0);
    REQUIRE(back.nodes.size() == net.nodes.size());
    REQUIRE(back.links.size() == net.links.size());
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
      CHECK(back.nodes[i].x == net.nodes[i].x);
      CHECK(back.nodes[i].y == net.nodes[i].y);
    }
    for (std::size_t l = 0; l < net.links.size(); ++l) {
      CHECK(back.links[l].tx == net.links[l].tx);
      CHECK(back.links[l].rx == net.links[l].rx);
    }
  }

  TEST_CASE("summary CSV layout") {
    RunStats s;
    s.slots = 10;
    s.measured_slots = 9;
    s.thresholds = {2, 5};
    LinkStats l;
    l.rate_in = 0.25;
    l.rate_out = 0.25;
    l.overflow_counts = {3, 0};
    s.links = {l};
    std::ostringstream os;
    write_summary_csv(os, s);
    const auto text = os.str();
    CHECK(text.rfind("link,rate_in,rate_out,mean_q,max_q,drift,ovf_B2,ovf_B5\n", 0) == 0);
    CHECK(text.find("\n1,0.25,0.25,") != std::string::npos);
  }
}
