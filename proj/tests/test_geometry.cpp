#include <cmath>

#include "doctest.h"
#include "prisched/geometry.hpp"

using namespace prisched;

namespace {

GeometricNetwork line_network(std::vector<Point> nodes, std::vector<DirectedLink> links, double range) {
  GeometricNetwork net;
  net.nodes = std::move(nodes);
  net.links = std::move(links);
  net.tx_range = range;
  return net;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("two nodes in range give both directions") {
    NetworkParams p;
    p.n_nodes = 2;
    p.area_side = 0.1;
    p.tx_range = 1.0;
    p.link_density = 1.0;
    p.seed = 3;
    const auto gen = generate_network(p);
    CHECK(gen.network.links.size() == 2);
    CHECK_FALSE(gen.warning.has_value());
  }

  TEST_CASE("generation is deterministic and matches a pair recount") {
    NetworkParams p;
    p.n_nodes = 40;
    p.area_side = 10.0;
    p.tx_range = 2.0;
    p.link_density = 0.3;
    p.seed = 7;
    const auto a = generate_network(p), b = generate_network(p);
    CHECK(a.network.links.size() == b.network.links.size());
    for (std::size_t k = 0; k < a.network.links.size(); ++k) {
      CHECK(a.network.links[k].tx == b.network.links[k].tx);
      CHECK(a.network.links[k].rx == b.network.links[k].rx);
    }
    // Every generated link is an in-range ordered pair, and none repeats.
    std::size_t in_range = 0;
    const auto& nodes = a.network.nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = 0; j < nodes.size(); ++j)
        if (i != j && std::hypot(nodes[i].x - nodes[j].x, nodes[i].y - nodes[j].y) <= 2.0) ++in_range;
    CHECK(a.network.links.size() <= in_range);
    CHECK(a.network.links.size() > 0);
    for (const auto& l : a.network.links) {
      CHECK(l.tx != l.rx);
      CHECK(std::hypot(nodes[l.tx].x - nodes[l.rx].x, nodes[l.tx].y - nodes[l.rx].y) <= 2.0);
    }
    p.link_density = 1.0;
    CHECK(generate_network(p).network.links.size() == in_range);
  }

  TEST_CASE("no feasible link yields a warning") {
    NetworkParams p;
    p.n_nodes = 3;
    p.area_side = 100.0;
    p.tx_range = 1e-6;
    p.seed = 1;
    const auto gen = generate_network(p);
    CHECK(gen.network.links.empty());
    CHECK(gen.warning.has_value());
  }

  TEST_CASE("invalid parameters are input errors") {
    NetworkParams p;
    p.n_nodes = 3;
    p.tx_range = 0.0;
    CHECK_THROWS_AS(generate_network(p), InputError);
    p.tx_range = 1.0;
    p.link_density = 1.5;
    CHECK_THROWS_AS(generate_network(p), InputError);
    const auto net = line_network({{0, 0}, {1, 0}}, {{0, 1}}, 2.0);
    CHECK_THROWS_AS(build_interference(net, KHopInterference{0}), InputError);
    CHECK_THROWS_AS(build_interference(net, PhyInterference{0.0, 2.0}), InputError);
  }

  TEST_CASE("primary interference: shared transmitter conflicts") {
    const auto net = line_network({{0, 0}, {1, 0}, {0, 1}}, {{0, 1}, {0, 2}}, 2.0);
    CHECK(build_interference(net, PrimaryInterference{}).adjacent(0, 1));
  }

  TEST_CASE("k-hop threshold is strict") {
    // Endpoint gap between the links is exactly 2: adjacent only for K*r > 2.
    const auto net = line_network({{0, 0}, {1, 0}, {3, 0}, {4, 0}}, {{0, 1}, {2, 3}}, 1.0);
    CHECK_FALSE(build_interference(net, KHopInterference{1}).adjacent(0, 1));
    CHECK_FALSE(build_interference(net, KHopInterference{2}).adjacent(0, 1));
    CHECK(build_interference(net, KHopInterference{3}).adjacent(0, 1));
  }

  TEST_CASE("phy example at the threshold is non-adjacent") {
    const auto net = line_network({{0, 0}, {1, 0}, {3, 0}, {3.5, 0}}, {{0, 1}, {2, 3}}, 2.0);
    CHECK_FALSE(build_interference(net, PhyInterference{4.0, 2.0}).adjacent(0, 1));
    // c slightly above 2 makes d(tx2, rx1) = 2 < c * l1.
    CHECK(build_interference(net, PhyInterference{4.1, 2.0}).adjacent(0, 1));
  }

  TEST_CASE("monotonicity properties") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      NetworkParams p;
      p.n_nodes = 14;
      p.area_side = 4.0;
      p.tx_range = 1.2;
      p.link_density = 0.4;
      p.seed = seed;
      const auto net = generate_network(p).network;
      const auto prim = build_interference(net, PrimaryInterference{});
      const auto k1 = build_interference(net, KHopInterference{1});
      const auto k2 = build_interference(net, KHopInterference{2});
      const auto phy_lo = build_interference(net, PhyInterference{2.0, 3.0});
      const auto phy_hi = build_interference(net, PhyInterference{8.0, 3.0});
      for (auto [i, j] : prim.edges()) CHECK(k1.adjacent(i, j));
      for (auto [i, j] : k1.edges()) CHECK(k2.adjacent(i, j));
      for (auto [i, j] : phy_lo.edges()) CHECK(phy_hi.adjacent(i, j));
    }
  }
}
