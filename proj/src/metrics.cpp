#include "atlas/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_set>

#include "atlas/error.hpp"
#include "atlas/parallel.hpp"

namespace atlas {

namespace {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd out;
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

// Sum of BFS distances from source; returns the number of reached nodes.
std::size_t bfs_distance_sum(const WeightedGraph& g, NodeId source,
                             std::vector<std::uint32_t>& dist, std::vector<NodeId>& queue,
                             std::uint64_t& total) {
  constexpr auto unseen = static_cast<std::uint32_t>(-1);
  std::fill(dist.begin(), dist.end(), unseen);
  queue.clear();
  dist[source] = 0;
  queue.push_back(source);
  total = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto u = queue[head];
    total += dist[u];
    for (const auto& nb : g.neighbors(u)) {
      if (dist[nb.node] == unseen) {
        dist[nb.node] = dist[u] + 1;
        queue.push_back(nb.node);
      }
    }
  }
  return queue.size();
}

}  // namespace

std::vector<double> pagerank(const WeightedGraph& g, const PageRankOptions& opts) {
  if (g.empty()) throw ParameterError("pagerank of an empty graph");
  if (!(opts.damping > 0.0 && opts.damping < 1.0)) {
    throw ParameterError("damping must lie in (0, 1)");
  }
  const std::size_t n = g.node_count();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, inv_n), next(n, 0.0), share(n, 0.0);

  double residual = 0.0;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    double dangling = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      if (g.degree(i) == 0) {
        dangling += rank[i];
        share[i] = 0.0;
      } else {
        share[i] = rank[i] / g.strength(i);
      }
    }
    const double base = (1.0 - opts.damping) * inv_n + opts.damping * dangling * inv_n;
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) {
        double in = 0.0;
        for (const auto& nb : g.neighbors(static_cast<NodeId>(j))) {
          in += share[nb.node] * nb.weight;
        }
        next[j] = base + opts.damping * in;
      }
    });
    const double sum = std::accumulate(next.begin(), next.end(), 0.0);
    residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] /= sum;
      residual = std::max(residual, std::abs(next[j] - rank[j]));
    }
    rank.swap(next);
    if (residual < opts.tolerance) return rank;
  }
  throw ConvergenceError("pagerank did not converge in " +
                             std::to_string(opts.max_iterations) + " iterations",
                         residual);
}

std::vector<double> local_clustering(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> coeff(n, 0.0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<char> mark(n, 0);
    for (std::size_t v = begin; v < end; ++v) {
      const auto nbs = g.neighbors(static_cast<NodeId>(v));
      const std::size_t k = nbs.size();
      if (k < 2) continue;
      for (const auto& nb : nbs) mark[nb.node] = 1;
      std::uint64_t links = 0;  // each neighbor-neighbor edge counted twice
      for (const auto& nb : nbs) {
        for (const auto& nb2 : g.neighbors(nb.node)) links += mark[nb2.node];
      }
      for (const auto& nb : nbs) mark[nb.node] = 0;
      coeff[v] = static_cast<double>(links) / static_cast<double>(k * (k - 1));
    }
  });
  return coeff;
}

double clustering(const WeightedGraph& g) {
  if (g.empty()) throw UndefinedStatistic("clustering of an empty graph");
  const auto coeff = local_clustering(g);
  return std::accumulate(coeff.begin(), coeff.end(), 0.0) / static_cast<double>(coeff.size());
}

PathLength average_path_length(const WeightedGraph& g, const PathLengthOptions& opts) {
  const std::size_t n = g.node_count();
  if (n < 2) throw UndefinedStatistic("path length needs at least two nodes");

  std::vector<NodeId> sources(n);
  std::iota(sources.begin(), sources.end(), NodeId{0});
  PathLength out;
  if (n > opts.exact_limit) {
    std::mt19937_64 rng(opts.seed);
    std::shuffle(sources.begin(), sources.end(), rng);
    sources.resize(std::min(opts.sample_sources, n));
    std::sort(sources.begin(), sources.end());
    out.sampled = true;
  }
  out.sources = sources.size();

  std::vector<std::uint64_t> totals(sources.size(), 0);
  std::vector<std::size_t> reached(sources.size(), 0);
  parallel_for(sources.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> dist(n);
    std::vector<NodeId> queue;
    queue.reserve(n);
    for (std::size_t s = begin; s < end; ++s) {
      reached[s] = bfs_distance_sum(g, sources[s], dist, queue, totals[s]);
    }
  });
  std::uint64_t total = 0;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (reached[s] != n) throw ConnectivityError("graph is not connected");
    total += totals[s];
  }
  out.mean = static_cast<double>(total) /
             (static_cast<double>(sources.size()) * static_cast<double>(n - 1));
  return out;
}

double avg_shortest_path(const WeightedGraph& g) { return average_path_length(g).mean; }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

WeightedGraph er_random(std::size_t n, std::size_t m, std::uint64_t seed) {
  const std::uint64_t pairs = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (m > pairs) {
    throw ParameterError("cannot place " + std::to_string(m) + " edges on " +
                         std::to_string(n) + " nodes");
  }

  // Floyd's subset sampling over pair indices; for dense targets sample
  // the complement instead.
  const bool complement = m > pairs / 2;
  const std::uint64_t draw = complement ? pairs - m : m;
  std::mt19937_64 rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(draw * 2));
  for (std::uint64_t j = pairs - draw; j < pairs; ++j) {
    const auto t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> picked;
  if (complement) {
    picked.reserve(m);
    for (std::uint64_t idx = 0; idx < pairs; ++idx) {
      if (!chosen.contains(idx)) picked.push_back(idx);
    }
  } else {
    picked.assign(chosen.begin(), chosen.end());
    std::sort(picked.begin(), picked.end());
  }

  // Pair index -> (i, j), rows of length n - 1 - i.
  auto row_start = [n](std::uint64_t i) { return i * n - i * (i + 1) / 2; };
  std::vector<Edge> edges;
  edges.reserve(picked.size());
  std::uint64_t i = 0;
  for (auto idx : picked) {
    while (row_start(i + 1) <= idx) ++i;  // picked is sorted
    const auto j = idx - row_start(i) + i + 1;
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
  }

  const auto width = std::to_string(n == 0 ? 0 : n - 1).size();
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto s = std::to_string(k);
    labels.push_back("n" + std::string(width - s.size(), '0') + s);
  }
  return WeightedGraph(std::move(labels), std::move(edges));
}

ErBaseline er_baseline(std::size_t n, std::size_t m, std::size_t replicates,
                       std::uint64_t seed) {
  if (replicates < 1) throw ParameterError("replicates must be >= 1");
  std::vector<double> c(replicates, 0.0), l(replicates, 0.0);
  std::vector<char> ok(replicates, 0);
  parallel_for(replicates, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto g = er_random(n, m, derive_seed(seed, r));
      const auto lcc = largest_component(g);
      if (lcc.node_count() < 2) continue;
      c[r] = clustering(g);
      l[r] = average_path_length(lcc).mean;
      ok[r] = 1;
    }
  });

  ErBaseline out;
  for (std::size_t r = 0; r < replicates; ++r) {
    if (ok[r]) {
      out.c_values.push_back(c[r]);
      out.l_values.push_back(l[r]);
    } else {
      ++out.skipped;
    }
  }
  out.replicates = out.c_values.size();
  const auto cs = mean_sd(out.c_values);
  const auto ls = mean_sd(out.l_values);
  out.c_mean = cs.mean;
  out.c_sd = cs.sd;
  out.l_mean = ls.mean;
  out.l_sd = ls.sd;
  return out;
}

double small_world_score(double c_g, double l_g, double c_rand, double l_rand) {
  if (c_rand <= 0.0 || l_g <= 0.0) {
    throw UndefinedStatistic("small-worldness undefined: C_rand or L_G is zero");
  }
  return (c_g / c_rand) / (l_g / l_rand);
}

SmallWorld small_worldness(const WeightedGraph& g, std::size_t replicates,
                           std::uint64_t seed) {
  SmallWorld out;
  out.l_g = avg_shortest_path(g);
  out.c_g = clustering(g);
  out.baseline = er_baseline(g.node_count(), g.edge_count(), replicates, seed);
  if (out.baseline.replicates == 0) {
    throw UndefinedStatistic("every random replicate was degenerate");
  }
  const double c_rand = out.baseline.c_mean;
  const double l_rand = out.baseline.l_mean;
  out.s_g = small_world_score(out.c_g, out.l_g, c_rand, l_rand);

  std::size_t above = 0;
  for (std::size_t r = 0; r < out.baseline.replicates; ++r) {
    const double s = (out.baseline.c_values[r] / c_rand) / (out.baseline.l_values[r] / l_rand);
    if (s > out.s_g) ++above;
  }
  out.p_value_proxy = static_cast<double>(above) / static_cast<double>(out.baseline.replicates);
  return out;
}

DegreeHistogram degree_histogram(const WeightedGraph& g) {
  DegreeHistogram hist;
  for (NodeId i = 0; i < g.node_count(); ++i) ++hist[g.degree(i)];
  return hist;
}

void write_degree_histogram(std::ostream& out, const DegreeHistogram& hist) {
  out << "degree,count\n";
  for (const auto& [degree, count] : hist) out << degree << ',' << count << '\n';
}

PowerLawFit fit_power_law(const DegreeHistogram& hist, std::size_t k_min) {
  std::size_t total = 0;
  for (const auto& [k, count] : hist) total += count;

  struct Bin {
    double sx = 0.0;
    double sy = 0.0;
    std::size_t n = 0;
  };
  std::map<long, Bin> bins;
  std::size_t distinct = 0;
  for (const auto& [k, count] : hist) {
    if (k < std::max<std::size_t>(k_min, 1) || count == 0) continue;
    ++distinct;
    const double x = std::log10(static_cast<double>(k));
    const double y = std::log10(static_cast<double>(count) / static_cast<double>(total));
    auto& bin = bins[static_cast<long>(std::floor(10.0 * x + 1e-9))];
    bin.sx += x;
    bin.sy += y;
    ++bin.n;
  }
  if (distinct < 3 || bins.size() < 3) {
    throw FitError("power-law fit needs at least three degree bins >= " +
                   std::to_string(k_min) + ", have " + std::to_string(bins.size()));
  }

  std::vector<double> xs, ys;
  for (const auto& [_, bin] : bins) {
    xs.push_back(bin.sx / static_cast<double>(bin.n));
    ys.push_back(bin.sy / static_cast<double>(bin.n));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    ss_res += r * r;
  }
  PowerLawFit fit;
  fit.gamma = -slope;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.points = xs.size();
  return fit;
}

PowerLawFit power_law_fit(const WeightedGraph& g, std::size_t k_min) {
  return fit_power_law(degree_histogram(g), k_min);
}

nlohmann::ordered_json to_json(const NetworkStats& s) {
  nlohmann::ordered_json j;
  j["N"] = s.N;
  j["M"] = s.M;
  j["C"] = s.C;
  j["L"] = s.L;
  j["L_sampled"] = s.L_sampled;
  j["gamma"] = s.gamma;
  j["r_squared"] = s.r_squared;
  j["S_G"] = s.S_G;
  return j;
}

}  // namespace atlas
