#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "atlas/error.hpp"
#include "atlas/metrics.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace atlas;
using testsupport::from_pairs;

namespace {

WeightedGraph complete(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return from_pairs(n, pairs);
}

WeightedGraph star_graph(std::size_t leaves) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 1; i <= leaves; ++i) pairs.emplace_back(0, i);
  return from_pairs(leaves + 1, pairs);
}

}  // namespace

TEST_CASE("pagerank symmetric cases") {
  for (double r : pagerank(complete(3))) CHECK(r == doctest::Approx(1.0 / 3).epsilon(1e-9));
  for (double w : {0.01, 1.0, 250.0}) {
    const auto pr = pagerank(from_pairs(2, {{0, 1}}, w));
    CHECK(pr[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(pr[1] == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("pagerank matches the dense linear solve") {
  WeightedGraph five({"a", "b", "c", "d", "e"},
                     {{0, 1, 3.0}, {1, 2, 1.0}, {2, 0, 0.5}, {2, 3, 7.0}, {3, 4, 2.0}});
  const auto got = pagerank(five, {.tolerance = 1e-13, .max_iterations = 10000});
  const auto want = oracle::pagerank_dense(five, 0.85);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-10);

  // Isolated node exercises the dangling rule.
  const auto sparse = testsupport::random_weighted(40, 0.06, 17);
  const auto pr = pagerank(sparse, {.tolerance = 1e-13, .max_iterations = 10000});
  const auto dense = oracle::pagerank_dense(sparse, 0.85);
  CHECK(std::accumulate(pr.begin(), pr.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < pr.size(); ++i) CHECK(std::abs(pr[i] - dense[i]) < 1e-10);
}

TEST_CASE("pagerank errors") {
  CHECK_THROWS_AS(pagerank(WeightedGraph{}), ParameterError);
  CHECK_THROWS_AS(pagerank(complete(3), {.damping = 1.0}), ParameterError);
  const auto g = testsupport::barabasi_albert(300, 2, 3);
  CHECK_THROWS_AS(pagerank(g, {.tolerance = 1e-300, .max_iterations = 3}), ConvergenceError);
}

TEST_CASE("clustering cases") {
  CHECK(clustering(complete(4)) == 1.0);
  CHECK(clustering(star_graph(6)) == 0.0);
  CHECK_THROWS_AS(clustering(WeightedGraph{}), UndefinedStatistic);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto g = testsupport::random_weighted(100, 0.08, seed);
    CHECK(clustering(g) == doctest::Approx(oracle::clustering_by_triples(g)).epsilon(1e-12));
  }
}

TEST_CASE("path length cases") {
  CHECK(avg_shortest_path(from_pairs(3, {{0, 1}, {1, 2}})) == doctest::Approx(4.0 / 3));
  CHECK(avg_shortest_path(complete(6)) == 1.0);
  CHECK_THROWS_AS(avg_shortest_path(from_pairs(4, {{0, 1}, {2, 3}})), ConnectivityError);
  CHECK_THROWS_AS(avg_shortest_path(from_pairs(1, {})), UndefinedStatistic);
  const auto g = testsupport::watts_strogatz(120, 4, 0.2, 9);
  const auto exact = average_path_length(g);
  CHECK_FALSE(exact.sampled);
  CHECK(exact.mean == doctest::Approx(oracle::path_length_floyd(g)).epsilon(1e-12));
}

TEST_CASE("path length samples sources on large graphs") {
  const auto g = testsupport::watts_strogatz(600, 6, 0.1, 4);
  const auto sampled = average_path_length(g, {.exact_limit = 100, .sample_sources = 200});
  CHECK(sampled.sampled);
  CHECK(sampled.sources == 200);
  CHECK(sampled.mean == doctest::Approx(avg_shortest_path(g)).epsilon(0.05));
}

TEST_CASE("er generator") {
  const auto k4 = er_random(4, 6, 1);
  CHECK(k4.edge_count() == 6);
  CHECK(clustering(k4) == 1.0);
  const auto empty = er_random(100, 0, 1);
  CHECK(empty.node_count() == 100);
  CHECK(empty.edge_count() == 0);
  CHECK_THROWS_AS(er_random(4, 7, 1), ParameterError);
  CHECK(er_random(50, 300, 5) == er_random(50, 300, 5));
  CHECK_FALSE(er_random(50, 300, 5) == er_random(50, 300, 6));
  CHECK(er_random(40, 700, 2).edge_count() == 700);  // dense branch
}

TEST_CASE("er edges are uniform") {
  const std::size_t n = 30, m = 50, trials = 10000;
  const std::size_t pairs = n * (n - 1) / 2;
  std::vector<std::size_t> hits(n * n, 0);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto g = er_random(n, m, derive_seed(123, t));
    REQUIRE(g.edge_count() == m);
    for (const auto& e : g.edges()) ++hits[e.u * n + e.v];
  }
  const double p = static_cast<double>(m) / pairs;
  const double se = std::sqrt(p * (1 - p) / trials);
  std::size_t outside = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double freq = static_cast<double>(hits[u * n + v]) / trials;
      if (std::abs(freq - p) > 3 * se) ++outside;
    }
  }
  // 3 SE leaves ~0.27% of 435 pairs outside by chance.
  CHECK(outside <= 6);
}

TEST_CASE("small-world score is one when matched") {
  CHECK(small_world_score(0.3, 2.0, 0.3, 2.0) == 1.0);
  CHECK_THROWS_AS(small_world_score(0.3, 2.0, 0.0, 2.0), UndefinedStatistic);
}

TEST_CASE("an er graph is not small-world against er") {
  const auto g = largest_component(er_random(300, 1200, 77));
  const auto sw = small_worldness(g, 30, 42);
  CHECK(sw.s_g == doctest::Approx(1.0).epsilon(0.2));
  CHECK(sw.baseline.replicates == 30);
  CHECK(sw.baseline.c_values.size() == 30);
  CHECK(sw.p_value_proxy > 0.0);
}

TEST_CASE("baseline is seed determined") {
  const auto a = er_baseline(100, 300, 5, 9);
  const auto b = er_baseline(100, 300, 5, 9);
  CHECK(a.c_values == b.c_values);
  CHECK(a.l_values == b.l_values);
}

TEST_CASE("exact power law is recovered") {
  // Counts 4^(15-i) at degree 2^i are exact integers proportional to k^-2.
  DegreeHistogram hist;
  for (int i = 0; i <= 15; ++i) hist[std::size_t{1} << i] = std::size_t{1} << (30 - 2 * i);
  const auto fit = fit_power_law(hist, 1);
  CHECK(std::abs(fit.gamma - 2.0) < 1e-6);
  CHECK(fit.r_squared >= 1 - 1e-9);
  CHECK(fit.points == 16);

  // Dense degrees with rounded counts share log bins.
  DegreeHistogram dense;
  for (std::size_t k = 1; k <= 1000; ++k) dense[k] = static_cast<std::size_t>(std::llround(1e9 / double(k * k)));
  const auto near = fit_power_law(dense, 1);
  CHECK(std::abs(near.gamma - 2.0) < 1e-4);
  CHECK(near.r_squared > 1 - 1e-6);
}

TEST_CASE("ring has one degree and cannot be fit") {
  std::vector<std::pair<std::size_t, std::size_t>> ring;
  for (std::size_t i = 0; i < 50; ++i) ring.emplace_back(i, (i + 1) % 50);
  CHECK_THROWS_AS(power_law_fit(from_pairs(50, ring), 1), FitError);
}

TEST_CASE("preferential attachment fits well") {
  const auto g = testsupport::barabasi_albert(10000, 3, 1);
  const auto fit = power_law_fit(g, 3);
  CHECK(fit.r_squared > 0.9);
  CHECK(fit.gamma > 1.5);
  CHECK(fit.gamma < 3.5);
}

TEST_CASE("degree histogram csv") {
  const auto hist = degree_histogram(star_graph(3));
  CHECK(hist.at(1) == 3);
  CHECK(hist.at(3) == 1);
  std::ostringstream out;
  write_degree_histogram(out, hist);
  CHECK(out.str() == "degree,count\n1,3\n3,1\n");
}
