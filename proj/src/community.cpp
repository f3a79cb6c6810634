#include "atlas/community.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>

#include "atlas/error.hpp"

namespace atlas {

namespace {

// Symmetric adjacency with explicit diagonal: self_w[i] = A_ii, so that
// k[i] = sum_j A_ij including the diagonal. After aggregation A_CC holds
// twice the internal weight of community C.
struct LevelGraph {
  std::vector<std::size_t> offsets{0};
  std::vector<Neighbor> adjacency;  // off-diagonal only
  std::vector<double> self_w;
  std::vector<double> k;
  double m2 = 0.0;  // sum of all A_ij = 2W

  std::size_t size() const { return self_w.size(); }
  std::span<const Neighbor> neighbors(std::size_t i) const {
    return std::span(adjacency).subspan(offsets[i], offsets[i + 1] - offsets[i]);
  }
};

LevelGraph from_graph(const WeightedGraph& g, bool weighted) {
  LevelGraph lg;
  const auto n = g.node_count();
  lg.self_w.assign(n, 0.0);
  lg.k.assign(n, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    for (const auto& nb : g.neighbors(i)) {
      const double w = weighted ? nb.weight : 1.0;
      lg.adjacency.push_back({nb.node, w});
      lg.k[i] += w;
    }
    lg.offsets.push_back(lg.adjacency.size());
    lg.m2 += lg.k[i];
  }
  return lg;
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<std::uint32_t>& comm,
                     std::size_t count) {
  LevelGraph out;
  out.self_w.assign(count, 0.0);
  out.k.assign(count, 0.0);
  out.m2 = lg.m2;

  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t i = 0; i < lg.size(); ++i) members[comm[i]].push_back(i);

  std::vector<double> acc(count, 0.0);
  std::vector<std::uint32_t> touched;
  for (std::size_t c = 0; c < count; ++c) {
    touched.clear();
    for (auto i : members[c]) {
      out.self_w[c] += lg.self_w[i];
      out.k[c] += lg.k[i];
      for (const auto& nb : lg.neighbors(i)) {
        const auto d = comm[nb.node];
        if (d == c) {
          out.self_w[c] += nb.weight;
          continue;
        }
        if (acc[d] == 0.0) touched.push_back(d);
        acc[d] += nb.weight;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto d : touched) {
      out.adjacency.push_back({d, acc[d]});
      acc[d] = 0.0;
    }
    out.offsets.push_back(out.adjacency.size());
  }
  return out;
}

class LocalMover {
 public:
  LocalMover(const LevelGraph& lg, double resolution)
      : lg_(lg), res_(resolution), comm_(lg.size()), tot_(lg.k), in_(lg.self_w),
        link_(lg.size(), 0.0) {
    std::iota(comm_.begin(), comm_.end(), std::uint32_t{0});
  }

  double quality() const {
    double q = 0.0;
    for (std::size_t c = 0; c < lg_.size(); ++c) {
      if (tot_[c] == 0.0 && in_[c] == 0.0) continue;
      q += in_[c] / lg_.m2 - res_ * (tot_[c] / lg_.m2) * (tot_[c] / lg_.m2);
    }
    return q;
  }

  // One pass over nodes in the given order; returns the number of moves.
  std::size_t sweep(const std::vector<std::uint32_t>& order) {
    std::size_t moves = 0;
    for (auto i : order) {
      const auto own = comm_[i];
      const double ki = lg_.k[i];

      candidates_.clear();
      link_[own] = 0.0;
      candidates_.push_back(own);
      for (const auto& nb : lg_.neighbors(i)) {
        const auto c = comm_[nb.node];
        // Weights are positive, so a zero link means c is not listed yet.
        if (link_[c] == 0.0 && c != own) candidates_.push_back(c);
        link_[c] += nb.weight;
      }

      // Take i out of its community.
      tot_[own] -= ki;
      in_[own] -= 2.0 * link_[own] + lg_.self_w[i];

      auto best = own;
      double best_gain = gain(own, ki);
      for (auto c : candidates_) {
        const double g = gain(c, ki);
        if (g > best_gain || (g == best_gain && c < best)) {
          best = c;
          best_gain = g;
        }
      }

      tot_[best] += ki;
      in_[best] += 2.0 * link_[best] + lg_.self_w[i];
      comm_[i] = best;
      if (best != own) ++moves;
      for (auto c : candidates_) link_[c] = 0.0;
    }
    return moves;
  }

  const std::vector<std::uint32_t>& communities() const { return comm_; }

 private:
  double gain(std::uint32_t c, double ki) const {
    return link_[c] - res_ * tot_[c] * ki / lg_.m2;
  }

  const LevelGraph& lg_;
  double res_;
  std::vector<std::uint32_t> comm_;
  std::vector<double> tot_;
  std::vector<double> in_;
  std::vector<double> link_;
  std::vector<std::uint32_t> candidates_;
};

// Dense renumbering in order of first appearance.
std::size_t renumber(std::vector<std::uint32_t>& comm) {
  std::vector<std::uint32_t> map(comm.size(), static_cast<std::uint32_t>(-1));
  std::uint32_t next = 0;
  for (auto& c : comm) {
    if (map[c] == static_cast<std::uint32_t>(-1)) map[c] = next++;
    c = map[c];
  }
  return next;
}

}  // namespace

std::vector<std::uint32_t> canonical_labels(const std::vector<std::uint32_t>& labels) {
  if (labels.empty()) return {};
  const auto count = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::size_t> size(count, 0);
  std::vector<std::size_t> first(count, labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++size[labels[i]];
    first[labels[i]] = std::min(first[labels[i]], i);
  }
  std::vector<std::uint32_t> order;
  for (std::uint32_t c = 0; c < count; ++c) {
    if (size[c] > 0) order.push_back(c);
  }
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return size[a] != size[b] ? size[a] > size[b] : first[a] < first[b];
  });
  std::vector<std::uint32_t> remap(count, 0);
  for (std::size_t r = 0; r < order.size(); ++r) remap[order[r]] = static_cast<std::uint32_t>(r);
  std::vector<std::uint32_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[labels[i]];
  return out;
}

double modularity(const WeightedGraph& g, const std::vector<std::uint32_t>& labels,
                  double resolution, bool weighted) {
  if (labels.size() != g.node_count()) {
    throw InputError("labeling covers " + std::to_string(labels.size()) + " of " +
                     std::to_string(g.node_count()) + " nodes");
  }
  if (g.edge_count() == 0) return 0.0;
  const auto count =
      labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<double> in(count, 0.0), tot(count, 0.0);
  double w_total = 0.0;
  for (const auto& e : g.edges()) {
    const double w = weighted ? e.weight : 1.0;
    w_total += w;
    tot[labels[e.u]] += w;
    tot[labels[e.v]] += w;
    if (labels[e.u] == labels[e.v]) in[labels[e.u]] += 2.0 * w;
  }
  const double m2 = 2.0 * w_total;
  double q = 0.0;
  for (std::size_t c = 0; c < count; ++c) {
    q += in[c] / m2 - resolution * (tot[c] / m2) * (tot[c] / m2);
  }
  return q;
}

double modularity(const WeightedGraph& g,
                  const std::unordered_map<std::string, std::uint32_t>& labels,
                  double resolution, bool weighted) {
  std::vector<std::uint32_t> dense(g.node_count());
  std::string missing;
  std::size_t n_missing = 0;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const auto it = labels.find(g.label(i));
    if (it == labels.end()) {
      if (n_missing++ < 10) missing += (missing.empty() ? "" : ", ") + g.label(i);
      continue;
    }
    dense[i] = it->second;
  }
  if (n_missing > 0) {
    throw InputError("unlabeled nodes (" + std::to_string(n_missing) + "): " + missing);
  }
  return modularity(g, dense, resolution, weighted);
}

CommunityAssignment louvain(const WeightedGraph& g, const LouvainOptions& opts) {
  if (!(opts.resolution > 0.0)) throw ParameterError("resolution must be positive");
  CommunityAssignment out;
  out.seed = opts.seed;
  const auto n = g.node_count();
  std::vector<std::uint32_t> membership(n);
  std::iota(membership.begin(), membership.end(), std::uint32_t{0});

  LevelGraph level = from_graph(g, opts.weighted);
  std::mt19937_64 rng(opts.seed);

  if (level.m2 > 0.0) {
    while (true) {
      LocalMover mover(level, opts.resolution);
      std::vector<std::uint32_t> order(level.size());
      std::iota(order.begin(), order.end(), std::uint32_t{0});
      std::shuffle(order.begin(), order.end(), rng);

      const double q_start = mover.quality();
      double q_now = q_start;
      while (true) {
        const auto moves = mover.sweep(order);
        const double q_next = mover.quality();
        const bool progressed = q_next - q_now > opts.min_gain;
        q_now = q_next;
        if (moves == 0 || !progressed) break;
      }
      if (q_now - q_start <= opts.min_gain) break;

      auto comm = mover.communities();
      const auto count = renumber(comm);
      for (auto& m : membership) m = comm[m];
      ++out.passes;
      out.pass_q.push_back(modularity(g, membership, opts.resolution, opts.weighted));
      if (count == level.size()) break;
      level = aggregate(level, comm, count);
    }
  }

  out.labels = canonical_labels(membership);
  out.communities =
      out.labels.empty() ? 0 : *std::max_element(out.labels.begin(), out.labels.end()) + 1;
  out.q = modularity(g, out.labels, opts.resolution, opts.weighted);
  return out;
}

void write_assignment_csv(std::ostream& out, const WeightedGraph& g,
                          const CommunityAssignment& a) {
  out << "forum,community\n";
  for (NodeId i = 0; i < g.node_count(); ++i) {
    out << g.label(i) << ',' << a.labels[i] << '\n';
  }
}

nlohmann::ordered_json summary_json(const CommunityAssignment& a) {
  nlohmann::ordered_json j;
  j["q"] = a.q;
  j["communities"] = a.communities;
  j["passes"] = a.passes;
  j["seed"] = a.seed;
  return j;
}

}  // namespace atlas
