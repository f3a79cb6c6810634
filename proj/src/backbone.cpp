#include "atlas/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "atlas/community.hpp"
#include "atlas/error.hpp"
#include "atlas/metrics.hpp"
#include "atlas/parallel.hpp"

namespace atlas {

double disparity_alpha(std::size_t degree, double p) {
  if (degree <= 1) return 1.0;
  // log1p keeps precision for small p; p == 1 gives exp(-inf) == 0.
  const double a = std::exp(static_cast<double>(degree - 1) * std::log1p(-p));
  return std::clamp(a, 0.0, 1.0);
}

EdgeSignificance edge_significance(const WeightedGraph& g, NodeId i, NodeId j) {
  const auto w = g.weight(i, j);
  if (!w) {
    throw LookupError("no edge " + g.label(i) + " - " + g.label(j));
  }
  const double p = *w / g.strength(i);
  return {p, disparity_alpha(g.degree(i), p)};
}

EdgeSignificance edge_significance(const WeightedGraph& g, std::string_view i,
                                   std::string_view j) {
  return edge_significance(g, g.index_of(i), g.index_of(j));
}

BackboneGraph extract_backbone(const WeightedGraph& g, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("alpha must lie in (0, 1), got " + format_double(alpha));
  }
  const auto edges = g.edges();
  std::vector<char> keep(edges.size(), 0);
  std::vector<double> weight(edges.size(), 0.0);
  parallel_for(edges.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      const auto& edge = edges[e];
      const double p_uv = edge.weight / g.strength(edge.u);
      const double p_vu = edge.weight / g.strength(edge.v);
      if (disparity_alpha(g.degree(edge.u), p_uv) < alpha &&
          disparity_alpha(g.degree(edge.v), p_vu) < alpha) {
        keep[e] = 1;
        weight[e] = 0.5 * (p_uv + p_vu);
      }
    }
  });

  std::vector<NodeId> local(g.node_count(), static_cast<NodeId>(-1));
  std::vector<std::string> labels;
  std::vector<Edge> kept;
  auto local_id = [&](NodeId n) {
    if (local[n] == static_cast<NodeId>(-1)) {
      local[n] = static_cast<NodeId>(labels.size());
      labels.push_back(g.label(n));
    }
    return local[n];
  };
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!keep[e]) continue;
    const auto u = local_id(edges[e].u);
    const auto v = local_id(edges[e].v);
    kept.push_back({u, v, weight[e]});
  }
  return {WeightedGraph(std::move(labels), std::move(kept)), alpha, g.fingerprint()};
}

std::vector<double> log_alpha_grid(double lo, double hi, int points_per_decade) {
  if (!(lo > 0.0) || !(hi >= lo) || points_per_decade < 1) {
    throw ParameterError("invalid alpha grid");
  }
  const double d = points_per_decade;
  const auto first = static_cast<long>(std::lround(std::log10(lo) * d));
  const auto last = static_cast<long>(std::lround(std::log10(hi) * d));
  std::vector<double> grid;
  for (long i = first; i <= last; ++i) {
    const double a = std::pow(10.0, static_cast<double>(i) / d);
    if (a < 1.0) grid.push_back(a);
  }
  return grid;
}

SweepRow analyze_backbone(const BackboneGraph& backbone, const SweepOptions& opts) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  SweepRow row;
  row.alpha = backbone.alpha_cutoff;
  row.nodes = backbone.graph.node_count();
  row.edges = backbone.graph.edge_count();
  row.c = row.c_er_mean = row.c_er_sd = nan;
  row.l = row.l_er_mean = row.l_er_sd = nan;
  row.q = row.r2 = nan;

  const auto lcc = largest_component(backbone.graph);
  row.lcc_nodes = lcc.node_count();
  row.lcc_edges = lcc.edge_count();
  if (lcc.node_count() < 2) return row;

  row.c = clustering(lcc);
  row.l = average_path_length(lcc).mean;
  const auto er = er_baseline(lcc.node_count(), lcc.edge_count(), opts.replicates, opts.seed);
  if (er.replicates > 0) {
    row.c_er_mean = er.c_mean;
    row.c_er_sd = er.c_sd;
    row.l_er_mean = er.l_mean;
    row.l_er_sd = er.l_sd;
  }
  const auto communities = louvain(lcc, {.seed = opts.community_seed});
  row.communities = communities.communities;
  row.q = communities.q;
  try {
    row.r2 = power_law_fit(lcc, opts.k_min).r_squared;
  } catch (const FitError&) {
    // too few high-degree nodes at this cutoff
  }
  return row;
}

SweepResult sweep(const WeightedGraph& g, const std::vector<double>& alphas,
                  const SweepOptions& opts) {
  if (alphas.empty()) throw ParameterError("sweep needs at least one alpha");
  if (opts.replicates < 1) throw ParameterError("replicates must be >= 1");
  auto grid = alphas;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  SweepResult result;
  for (double a : grid) {
    result.rows.push_back(analyze_backbone(extract_backbone(g, a), opts));
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "alpha,nodes,edges,lcc_nodes,C,C_er_mean,C_er_sd,L,L_er_mean,L_er_sd,"
         "communities,Q,r2\n";
  for (const auto& r : result.rows) {
    out << format_double(r.alpha) << ',' << r.nodes << ',' << r.edges << ','
        << r.lcc_nodes << ',' << format_double(r.c) << ',' << format_double(r.c_er_mean)
        << ',' << format_double(r.c_er_sd) << ',' << format_double(r.l) << ','
        << format_double(r.l_er_mean) << ',' << format_double(r.l_er_sd) << ','
        << r.communities << ',' << format_double(r.q) << ',' << format_double(r.r2)
        << '\n';
  }
}

}  // namespace atlas
