#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "prisched/graph.hpp"

using namespace prisched;

TEST_SUITE("graph") {
  TEST_CASE("independence on the six-link example") {
    const auto g = oracle::g6();
    CHECK(is_independent(g, LinkSet{0, 1, 2}));
    CHECK_FALSE(is_independent(g, LinkSet{4, 5}));
    CHECK(is_independent(g, LinkSet{}));
    CHECK_THROWS_AS(is_independent(g, LinkSet{0, 6}), InputError);
  }

  TEST_CASE("graph construction rejects self loops and reports duplicates") {
    InterferenceGraph g(3);
    CHECK(g.add_conflict(0, 1));
    CHECK_FALSE(g.add_conflict(1, 0));
    CHECK_THROWS_AS(g.add_conflict(2, 2), InputError);
    CHECK_THROWS_AS(g.add_conflict(0, 3), InputError);
    CHECK(g.edge_count() == 1);
    CHECK(g.neighbors(1) == LinkSet{0});
  }

  TEST_CASE("maximal sets match subset filtering") {
    const auto g = oracle::g6();
    const auto fam = enumerate_maximal_sets(g);
    CHECK(fam == oracle::maximal_sets(g));
    CHECK(std::find(fam.begin(), fam.end(), LinkSet{3, 5}) != fam.end());
    CHECK(enumerate_maximal_sets(InterferenceGraph::edgeless(3)) == std::vector<LinkSet>{{0, 1, 2}});

    std::mt19937_64 rng(11);
    for (int t = 0; t < 40; ++t) {
      const auto h = oracle::random_graph(2 + t % 9, 0.35, rng);
      CHECK(enumerate_maximal_sets(h) == oracle::maximal_sets(h));
    }
  }

  TEST_CASE("enumeration cap is enforced") {
    Limits lim;
    lim.enumeration_cap = 5;
    CHECK_THROWS_AS(enumerate_maximal_sets(oracle::g6(), lim), SizeLimitError);
    try {
      enumerate_maximal_sets(oracle::g6(), lim);
    } catch (const SizeLimitError& e) {
      CHECK(e.cap() == 5);
    }
  }

  TEST_CASE("max weight independent set") {
    const auto g = oracle::g6();
    const std::vector<double> ones(6, 1.0), zeros(6, 0.0), w{0, 0, 0, 5, 0, 4};
    CHECK(max_weight_independent_set(g, ones) == LinkSet{0, 1, 2});
    CHECK(max_weight_independent_set(g, zeros) == oracle::maximal_sets(g).front());
    CHECK(max_weight_independent_set(g, w) == LinkSet{3, 5});

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int t = 0; t < 30; ++t) {
      const auto h = oracle::random_graph(7, 0.4, rng);
      std::vector<double> wt(7);
      for (auto& x : wt) x = u(rng);
      const auto best = max_weight_independent_set(h, wt);
      auto weight = [&](const LinkSet& s) {
        double v = 0;
        for (int i : s) v += wt[i];
        return v;
      };
      for (const auto& m : oracle::maximal_sets(h)) CHECK(weight(best) >= weight(m) - 1e-12);
    }
  }

  TEST_CASE("interference degree") {
    const auto g = oracle::g6();
    CHECK(interference_degree(g, 0) == 1);
    CHECK(interference_degree(g, 5) == 2);
    CHECK(interference_degree(InterferenceGraph::edgeless(2), 1) == 1);
    CHECK(interference_degree(oracle::star(5), 0) == 5);
  }

  TEST_CASE("delta on simple families") {
    CHECK(compute_delta(InterferenceGraph::complete(4)).value == 1);
    CHECK(compute_delta(oracle::star(5)).value == 1);
    CHECK(compute_delta(oracle::star(5), DeltaMode::brute).value == 1);
    const auto g = oracle::g6();
    CHECK(compute_delta(g).value == compute_delta(g, DeltaMode::brute).value);
    CHECK(compute_delta(g).value == oracle::delta_dp(g));
  }

  TEST_CASE("brute delta respects its cap") {
    CHECK_THROWS_AS(compute_delta(InterferenceGraph(9), DeltaMode::brute), SizeLimitError);
  }

  TEST_CASE("delta witness is a valid removal order") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 25; ++t) {
      const auto h = oracle::random_graph(6, 0.4, rng);
      for (auto mode : {DeltaMode::greedy, DeltaMode::brute}) {
        const auto d = compute_delta(h, mode);
        auto order = d.witness.order;
        std::sort(order.begin(), order.end());
        std::vector<int> iota(6);
        std::iota(iota.begin(), iota.end(), 0);
        CHECK(order == iota);
        CHECK(*std::max_element(d.witness.per_step_degree.begin(), d.witness.per_step_degree.end()) == d.value);
        for (int x : d.witness.per_step_degree) CHECK(x >= 1);
      }
    }
  }

  TEST_CASE("delta bounded by the largest interference degree") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 30; ++t) {
      const auto h = oracle::random_graph(1 + t % 8, 0.5, rng);
      const int d = compute_delta(h).value;
      CHECK(d <= max_interference_degree(h));
      CHECK(max_interference_degree(h) <= h.size());
      CHECK(d == oracle::delta_dp(h));
    }
  }
}
