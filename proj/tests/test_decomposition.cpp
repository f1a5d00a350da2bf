#include "doctest.h"
#include "oracles.hpp"
#include "prisched/decomposition.hpp"

using namespace prisched;

namespace {

Decomposition ok(const DecompositionResult& r) {
  if (auto* f = std::get_if<DecompositionFailure>(&r)) FAIL("decomposition failed: " << f->message);
  return std::get<Decomposition>(r);
}

// Re-verifies every structural claim of a decomposition from scratch.
void check_valid(const InterferenceGraph& g, const std::vector<double>& a, const Decomposition& d, double scale) {
  const int n = g.size();
  const auto fam = oracle::maximal_sets(g);
  double total = 0.0;
  std::vector<double> cov(n, 0.0);
  for (const auto& t : d.terms) {
    CHECK(t.weight >= 0.0);
    CHECK(std::find(fam.begin(), fam.end(), t.set) != fam.end());
    total += t.weight;
    for (int i : t.set) cov[i] += t.weight;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(static_cast<int>(d.terms.size()) <= n + 1);
  for (int i = 0; i < n; ++i) CHECK(cov[i] >= scale * (a[i] + d.epsilon));
}

}  // namespace

TEST_SUITE("decomposition") {
  TEST_CASE("two-link clique has the unique even split") {
    const auto g = InterferenceGraph::complete(2);
    const std::vector<double> a{0.4, 0.4};
    const auto d = ok(decompose_exact(g, a, 0.1));
    REQUIRE(d.terms.size() == 2);
    CHECK(d.terms[0].set == LinkSet{0});
    CHECK(d.terms[1].set == LinkSet{1});
    CHECK(d.terms[0].weight == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.terms[1].weight == doctest::Approx(0.5).epsilon(1e-12));
    check_valid(g, a, d, 1.0);
  }

  TEST_CASE("edgeless graph needs one term") {
    const auto g = InterferenceGraph::edgeless(4);
    const std::vector<double> a{0.3, 0.1, 0.8, 0.5};
    const auto d = ok(decompose_exact(g, a, 0.1));
    REQUIRE(d.terms.size() == 1);
    CHECK(d.terms[0].set == LinkSet{0, 1, 2, 3});
    CHECK(d.terms[0].weight == doctest::Approx(1.0));
  }

  TEST_CASE("six-link example from a known combination") {
    const auto g = oracle::g6();
    const auto fam = oracle::maximal_sets(g);
    REQUIRE(fam.size() >= 3);
    std::vector<double> a(6, 0.0);
    for (int k : {0, 1, 2})
      for (int i : fam[k]) a[i] += 0.9 / 3.0;
    const auto d = ok(decompose_exact(g, a, 0.02));
    check_valid(g, a, d, 1.0);
    for (int i = 0; i < 6; ++i) CHECK(d.residuals[i] >= 0.0);
  }

  TEST_CASE("infeasible targets carry a certificate") {
    const auto g = InterferenceGraph::complete(3);
    const std::vector<double> a{0.4, 0.4, 0.3};
    const auto r = decompose_exact(g, a, 0.0);
    REQUIRE(std::holds_alternative<DecompositionFailure>(r));
    const auto& f = std::get<DecompositionFailure>(r);
    CHECK(f.kind == DecompositionFailure::Kind::infeasible);
    // Certificate: every maximal set weighs at most 1, the target weighs more.
    double target = 0.0;
    for (int i = 0; i < 3; ++i) target += f.evidence[i] * a[i];
    CHECK(target > 1.0);
    for (const auto& m : oracle::maximal_sets(g)) {
      double w = 0.0;
      for (int i : m) w += f.evidence[i];
      CHECK(w <= 1.0 + 1e-9);
    }
  }

  TEST_CASE("random strict-interior instances decompose") {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 40; ++t) {
      const int n = 2 + t % 9;
      const auto g = oracle::random_graph(n, 0.4, rng);
      const auto a = oracle::hull_point(g, 0.9, rng);
      const auto eps = default_epsilon(g, a);
      REQUIRE(eps.has_value());
      CHECK(*eps > 0.0);
      const auto d = ok(decompose_exact(g, a, *eps));
      check_valid(g, a, d, 1.0);
    }
  }

  TEST_CASE("default epsilon rejects boundary points") {
    CHECK_FALSE(default_epsilon(InterferenceGraph::complete(2), std::vector<double>{0.5, 0.5}).has_value());
    const auto e = default_epsilon(InterferenceGraph::complete(2), std::vector<double>{0.4, 0.4});
    REQUIRE(e.has_value());
    CHECK(*e == doctest::Approx(0.05));
  }

  TEST_CASE("support reduction keeps the combination") {
    std::mt19937_64 rng(71);
    for (int t = 0; t < 20; ++t) {
      const int n = 4 + t % 4;
      const auto g = oracle::random_graph(n, 0.3, rng);
      const auto fam = oracle::maximal_sets(g);
      std::vector<DecompositionTerm> terms;
      std::exponential_distribution<double> ex(1.0);
      double tot = 0;
      for (const auto& m : fam) {
        terms.push_back({m, ex(rng)});
        tot += terms.back().weight;
      }
      for (auto& x : terms) x.weight /= tot;
      std::vector<double> before(n, 0.0), after(n, 0.0);
      for (const auto& x : terms)
        for (int i : x.set) before[i] += x.weight;
      const auto reduced = reduce_support(terms, n);
      CHECK(static_cast<int>(reduced.size()) <= n + 1);
      double sum = 0.0;
      for (const auto& x : reduced) {
        CHECK(x.weight > 0.0);
        sum += x.weight;
        for (int i : x.set) after[i] += x.weight;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
      for (int i = 0; i < n; ++i) CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-10));
    }
  }

  TEST_CASE("induced distribution meets the local top-priority condition") {
    const auto g = oracle::g6();
    std::mt19937_64 rng(81);
    const auto a = oracle::hull_point(g, 0.9, rng);
    const auto d = ok(decompose_exact(g, a, *default_epsilon(g, a)));
    const auto dist = d.induced_distribution(6);
    SubsetChoice s(6);
    for (int i = 0; i < 6; ++i) s[i] = g.neighbors(i);
    CHECK(check_lemma1(g, a, dist, s));
    for (int i = 0; i < 6; ++i) CHECK(local_top_probability(dist, i, s[i]) >= d.coverage[i] - 1e-12);
  }

  TEST_CASE("approximate decomposition on the two-link clique") {
    const auto g = InterferenceGraph::complete(2);
    const std::vector<double> a{0.4, 0.4};
    ApproxOptions o;
    o.tol = 0.05;
    const auto d = ok(decompose_approx(g, a, 0.1, o));
    check_valid(g, a, d, 0.95);
    for (double c : d.coverage) CHECK(c >= 0.475);
    CHECK(d.oracle_calls > 0);
  }

  TEST_CASE("approximate coverage stays within the tolerance of the exact target") {
    std::mt19937_64 rng(91);
    for (int t = 0; t < 20; ++t) {
      const int n = 2 + t % 9;
      const auto g = oracle::random_graph(n, 0.4, rng);
      const auto a = oracle::hull_point(g, 0.85, rng);
      const double eps = *default_epsilon(g, a);
      const auto ex = ok(decompose_exact(g, a, eps));
      ApproxOptions o;
      o.tol = 0.05;
      const auto ap = ok(decompose_approx(g, a, eps, o));
      check_valid(g, a, ap, 0.95);
      for (int i = 0; i < n; ++i) CHECK(ap.coverage[i] >= 0.95 * (a[i] + eps));
      CHECK(ex.budget <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("approximate scheme reports nonconvergence beyond the hull") {
    const auto g = InterferenceGraph::complete(2);
    ApproxOptions o;
    o.tol = 0.05;
    o.max_iterations_per_budget = 2000;
    const auto r = decompose_approx(g, std::vector<double>{0.7, 0.7}, 0.0, o);
    REQUIRE(std::holds_alternative<DecompositionFailure>(r));
    CHECK(std::get<DecompositionFailure>(r).kind == DecompositionFailure::Kind::nonconvergence);
    CHECK(std::get<DecompositionFailure>(r).evidence.size() == 2);
  }

  TEST_CASE("custom oracle is used") {
    const auto g = oracle::g6();
    int calls = 0;
    const auto fam = enumerate_maximal_sets(g);
    SetOracle counting = [&](std::span<const double> w) {
      ++calls;
      return max_weight_among(fam, w);
    };
    std::mt19937_64 rng(3);
    const auto a = oracle::hull_point(g, 0.8, rng);
    const auto d = ok(decompose_approx(g, a, 0.01, ApproxOptions{}, counting));
    CHECK(calls == d.oracle_calls);
  }
}
