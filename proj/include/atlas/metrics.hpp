#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "atlas/graph.hpp"

namespace atlas {

struct PageRankOptions {
  double damping = 0.85;
  double tolerance = 1e-8;
  int max_iterations = 200;
};

// Weighted PageRank: a walker at i moves to neighbor j with probability
// w_ij / s_i. Rank held by nodes without edges is spread uniformly.
// Returns one score per node id; scores sum to 1.
std::vector<double> pagerank(const WeightedGraph& g, const PageRankOptions& opts = {});

// Mean local clustering coefficient, weights ignored; nodes with degree < 2
// contribute 0. Throws UndefinedStatistic on an empty graph.
double clustering(const WeightedGraph& g);

// Per-node local clustering coefficients.
std::vector<double> local_clustering(const WeightedGraph& g);

struct PathLengthOptions {
  std::size_t exact_limit = 10000;  // all-pairs BFS up to this many nodes
  std::size_t sample_sources = 1000;
  std::uint64_t seed = 42;
};

struct PathLength {
  double mean = 0.0;
  bool sampled = false;
  std::size_t sources = 0;
};

// Mean hop count over node pairs. Throws ConnectivityError if g is
// disconnected and UndefinedStatistic for fewer than two nodes.
PathLength average_path_length(const WeightedGraph& g, const PathLengthOptions& opts = {});
double avg_shortest_path(const WeightedGraph& g);

// G(n, m): exactly m distinct edges drawn uniformly without replacement,
// all weights 1. Labels are zero-padded indices so id order equals index
// order.
WeightedGraph er_random(std::size_t n, std::size_t m, std::uint64_t seed);

// Stream of independent replicate seeds derived from one base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

struct ErBaseline {
  std::size_t replicates = 0;  // used
  std::size_t skipped = 0;     // LCC smaller than two nodes
  double c_mean = 0.0;
  double c_sd = 0.0;
  double l_mean = 0.0;
  double l_sd = 0.0;
  std::vector<double> c_values;
  std::vector<double> l_values;
};

// C on each replicate, L on each replicate's largest component. SDs are
// sample standard deviations (0 for a single replicate).
ErBaseline er_baseline(std::size_t n, std::size_t m, std::size_t replicates,
                       std::uint64_t seed);

struct SmallWorld {
  double s_g = 0.0;
  // Fraction of replicates whose own score exceeds s_g.
  double p_value_proxy = 0.0;
  double c_g = 0.0;
  double l_g = 0.0;
  ErBaseline baseline;
};

SmallWorld small_worldness(const WeightedGraph& g, std::size_t replicates,
                           std::uint64_t seed);

// (C_G / C_rand) / (L_G / L_rand)
double small_world_score(double c_g, double l_g, double c_rand, double l_rand);

struct PowerLawFit {
  double gamma = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

// degree -> node count
using DegreeHistogram = std::map<std::size_t, std::size_t>;

DegreeHistogram degree_histogram(const WeightedGraph& g);
void write_degree_histogram(std::ostream& out, const DegreeHistogram& hist);

// Least squares on log10(frequency) vs log10(degree). Degrees >= k_min are
// grouped into logarithmic bins (10 per decade); each bin contributes the
// centroid of its (log degree, log frequency) points. Frequencies are
// relative to all nodes in the histogram. Needs three bins.
PowerLawFit fit_power_law(const DegreeHistogram& hist, std::size_t k_min);
PowerLawFit power_law_fit(const WeightedGraph& g, std::size_t k_min);

struct NetworkStats {
  std::size_t N = 0;
  std::size_t M = 0;
  double C = 0.0;
  double L = 0.0;
  bool L_sampled = false;
  double gamma = 0.0;
  double r_squared = 0.0;
  double S_G = 0.0;
};

nlohmann::ordered_json to_json(const NetworkStats& s);

}  // namespace atlas
