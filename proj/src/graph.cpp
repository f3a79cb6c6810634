#include "atlas/graph.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "atlas/error.hpp"
#include "atlas/ingest.hpp"
#include "atlas/parallel.hpp"

namespace atlas {

WeightedGraph::WeightedGraph(std::vector<std::string> labels, std::vector<Edge> edges) {
  const std::size_t n = labels.size();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::sort(order.begin(), order.end(),
            [&](NodeId a, NodeId b) { return labels[a] < labels[b]; });
  std::vector<NodeId> remap(n);
  labels_.reserve(n);
  for (std::size_t rank = 0; rank < n; ++rank) {
    remap[order[rank]] = static_cast<NodeId>(rank);
    labels_.push_back(std::move(labels[order[rank]]));
    if (rank > 0 && labels_[rank] == labels_[rank - 1]) {
      throw InputError("duplicate node label '" + labels_[rank] + "'");
    }
  }

  for (auto& e : edges) {
    if (e.u >= n || e.v >= n) throw InputError("edge endpoint out of range");
    if (e.u == e.v) throw InputError("self-loop on '" + labels_[remap[e.u]] + "'");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InputError("edge weight must be positive and finite");
    }
    e.u = remap[e.u];
    e.v = remap[e.v];
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v) {
      throw InputError("duplicate edge " + labels_[edges[i].u] + " - " +
                       labels_[edges[i].v]);
    }
  }
  edges_ = std::move(edges);

  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adjacency_.resize(offsets_[n]);
  strength_.assign(n, 0.0);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // Edges are sorted by (u, v), so both adjacency directions come out
  // sorted by neighbor id: lower neighbors arrive first via the v side.
  for (const auto& e : edges_) {
    adjacency_[cursor[e.v]++] = {e.u, e.weight};
  }
  for (const auto& e : edges_) {
    adjacency_[cursor[e.u]++] = {e.v, e.weight};
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& nb : neighbors(static_cast<NodeId>(i))) strength_[i] += nb.weight;
  }
  for (const auto& e : edges_) total_weight_ += e.weight;
}

std::optional<NodeId> WeightedGraph::find(std::string_view label) const {
  const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<NodeId>(it - labels_.begin());
}

NodeId WeightedGraph::index_of(std::string_view label) const {
  if (auto id = find(label)) return *id;
  throw LookupError("unknown node '" + std::string(label) + "'");
}

std::span<const Neighbor> WeightedGraph::neighbors(NodeId n) const {
  return std::span(adjacency_).subspan(offsets_[n], offsets_[n + 1] - offsets_[n]);
}

std::optional<double> WeightedGraph::weight(NodeId a, NodeId b) const {
  const auto nbs = neighbors(a);
  const auto it = std::lower_bound(nbs.begin(), nbs.end(), b,
                                   [](const Neighbor& x, NodeId id) { return x.node < id; });
  if (it == nbs.end() || it->node != b) return std::nullopt;
  return it->weight;
}

WeightedGraph WeightedGraph::induced_subgraph(std::span<const NodeId> nodes) const {
  std::vector<NodeId> local(node_count(), static_cast<NodeId>(-1));
  std::vector<std::string> labels;
  labels.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    local[nodes[i]] = static_cast<NodeId>(i);
    labels.push_back(labels_[nodes[i]]);
  }
  std::vector<Edge> edges;
  for (const auto& e : edges_) {
    if (local[e.u] != static_cast<NodeId>(-1) && local[e.v] != static_cast<NodeId>(-1)) {
      edges.push_back({local[e.u], local[e.v], e.weight});
    }
  }
  return WeightedGraph(std::move(labels), std::move(edges));
}

WeightedGraph WeightedGraph::scaled(double factor) const {
  if (!(factor > 0.0)) throw ParameterError("scale factor must be positive");
  auto edges = edges_;
  for (auto& e : edges) e.weight *= factor;
  return WeightedGraph(labels_, std::move(edges));
}

std::string WeightedGraph::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& l : labels_) {
    mix(l.data(), l.size());
    mix("\0", 1);
  }
  for (const auto& e : edges_) {
    const auto bits = std::bit_cast<std::uint64_t>(e.weight);
    mix(&e.u, sizeof e.u);
    mix(&e.v, sizeof e.v);
    mix(&bits, sizeof bits);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

WeightedGraph project(const BipartiteGraph& bg) {
  const std::size_t forums = bg.forum_count();
  std::vector<std::vector<Edge>> rows(forums);

  // Row i accumulates co-memberships with forums j > i through a dense
  // counter, so each unordered pair is produced exactly once.
  parallel_for(forums, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> count(forums, 0);
    std::vector<NodeId> touched;
    for (std::size_t i = begin; i < end; ++i) {
      touched.clear();
      for (auto actor : bg.actors_of(i)) {
        const auto fs = bg.forums_of(actor);
        auto it = std::upper_bound(fs.begin(), fs.end(), static_cast<std::uint32_t>(i));
        for (; it != fs.end(); ++it) {
          if (count[*it]++ == 0) touched.push_back(*it);
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& row = rows[i];
      row.reserve(touched.size());
      for (auto j : touched) {
        row.push_back({static_cast<NodeId>(i), j, static_cast<double>(count[j])});
        count[j] = 0;
      }
    }
  });

  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  std::vector<Edge> edges;
  edges.reserve(total);
  for (auto& r : rows) {
    edges.insert(edges.end(), r.begin(), r.end());
    std::vector<Edge>().swap(r);
  }
  return WeightedGraph(bg.forums(), std::move(edges));
}

std::vector<std::uint32_t> connected_components(const WeightedGraph& g) {
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> comp(g.node_count(), unset);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (comp[s] != unset) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(u)) {
        if (comp[nb.node] == unset) {
          comp[nb.node] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return comp;
}

WeightedGraph largest_component(const WeightedGraph& g) {
  if (g.empty()) return {};
  const auto comp = connected_components(g);
  const auto count = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::size_t> sizes(count, 0);
  for (auto c : comp) ++sizes[c];
  // Component ids follow smallest member id, which is the smallest label.
  const auto best = static_cast<std::uint32_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  if (sizes[best] == g.node_count()) return g;
  std::vector<NodeId> nodes;
  nodes.reserve(sizes[best]);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    if (comp[i] == best) nodes.push_back(i);
  }
  return g.induced_subgraph(nodes);
}

NodeStats node_stats(const WeightedGraph& g, std::string_view label) {
  const auto id = g.index_of(label);
  return {g.degree(id), g.strength(id)};
}

WeightSummary summarize_weights(const WeightedGraph& g) {
  WeightSummary s;
  s.edges = g.edge_count();
  if (s.edges == 0) return s;
  s.min = s.max = g.edges().front().weight;
  for (const auto& e : g.edges()) {
    s.min = std::min(s.min, e.weight);
    s.max = std::max(s.max, e.weight);
  }
  s.mean = g.total_weight() / static_cast<double>(s.edges);
  return s;
}

void write_edge_list(std::ostream& out, const WeightedGraph& g) {
  char buf[32];
  for (const auto& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out << g.label(e.u) << '\t' << g.label(e.v) << '\t' << buf << '\n';
  }
}

WeightedGraph read_edge_list(std::istream& in, const std::string& source) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  auto intern = [&](std::string_view label) {
    auto [it, inserted] = ids.try_emplace(std::string(label), static_cast<NodeId>(labels.size()));
    if (inserted) labels.emplace_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.empty()) continue;
    const auto t1 = view.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : view.find('\t', t1 + 1);
    if (t2 == std::string_view::npos || view.find('\t', t2 + 1) != std::string_view::npos) {
      throw ParseError(source, line_no, "expected 3 tab-separated fields");
    }
    const auto wtext = view.substr(t2 + 1);
    double w = 0.0;
    auto [ptr, ec] = std::from_chars(wtext.data(), wtext.data() + wtext.size(), w);
    if (ec != std::errc{} || ptr != wtext.data() + wtext.size()) {
      throw ParseError(source, line_no, "bad weight '" + std::string(wtext) + "'");
    }
    const auto u = intern(view.substr(0, t1));
    const auto v = intern(view.substr(t1 + 1, t2 - t1 - 1));
    edges.push_back({u, v, w});
  }
  try {
    return WeightedGraph(std::move(labels), std::move(edges));
  } catch (const InputError& e) {
    throw ParseError(source, line_no, e.what());
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace atlas
