#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "atlas/graph.hpp"

namespace atlas {

// Significance of edge (i, j) seen from endpoint i.
struct EdgeSignificance {
  double p = 0.0;      // w_ij / s_i
  double alpha = 1.0;  // P(null weight share >= p)
};

// Probability that, with k edges whose shares are uniformly random on the
// simplex, one share is at least p: (1 - p)^(k - 1). Degree-1 endpoints
// cannot certify an edge and get 1.
double disparity_alpha(std::size_t degree, double p);

EdgeSignificance edge_significance(const WeightedGraph& g, NodeId i, NodeId j);
EdgeSignificance edge_significance(const WeightedGraph& g, std::string_view i,
                                   std::string_view j);

struct BackboneGraph {
  // Weights are (p_ij + p_ji) / 2; nodes without a retained edge are gone.
  WeightedGraph graph;
  double alpha_cutoff = 0.0;
  std::string source_fingerprint;
};

// Keeps (i, j) iff alpha_ij < cutoff and alpha_ji < cutoff.
BackboneGraph extract_backbone(const WeightedGraph& g, double alpha);

// Log-spaced cutoffs between lo and hi (inclusive where < 1) at the given
// density; values >= 1 are dropped.
std::vector<double> log_alpha_grid(double lo, double hi, int points_per_decade = 5);

struct SweepOptions {
  std::size_t replicates = 30;
  std::uint64_t seed = 42;            // ER replicates
  std::uint64_t community_seed = 42;  // Louvain
  std::size_t k_min = 50;             // power-law fit
};

struct SweepRow {
  double alpha = 0.0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t lcc_nodes = 0;
  std::size_t lcc_edges = 0;
  double c = 0.0;
  double c_er_mean = 0.0;
  double c_er_sd = 0.0;
  double l = 0.0;
  double l_er_mean = 0.0;
  double l_er_sd = 0.0;
  std::size_t communities = 0;
  double q = 0.0;
  double r2 = 0.0;  // NaN when the degree fit is impossible
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

// Statistics of one backbone's LCC, as reported for each sweep point.
SweepRow analyze_backbone(const BackboneGraph& backbone, const SweepOptions& opts);

SweepResult sweep(const WeightedGraph& g, const std::vector<double>& alphas,
                  const SweepOptions& opts);

// Columns: alpha,nodes,edges,lcc_nodes,C,C_er_mean,C_er_sd,L,L_er_mean,
// L_er_sd,communities,Q,r2
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace atlas
