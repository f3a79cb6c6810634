#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace atlas {

class BipartiteGraph;

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;  // u < v
  NodeId v = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  NodeId node = 0;
  double weight = 0.0;
};

struct NodeStats {
  std::size_t degree = 0;
  double strength = 0.0;
};

// Immutable undirected weighted simple graph. Node ids are indices into the
// lexicographically sorted label list, so any two graphs built from the
// same labels and edges are identical regardless of input order.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  // Edges may reference nodes in either order and arrive unsorted. Throws
  // InputError on self-loops, duplicate pairs, non-positive or non-finite
  // weights, duplicate labels, or out-of-range endpoints.
  WeightedGraph(std::vector<std::string> labels, std::vector<Edge> edges);

  std::size_t node_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return labels_.empty(); }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(NodeId n) const { return labels_[n]; }
  std::optional<NodeId> find(std::string_view label) const;
  // Throws LookupError for unknown labels.
  NodeId index_of(std::string_view label) const;

  // Sorted by (u, v).
  std::span<const Edge> edges() const { return edges_; }
  // Sorted by neighbor id.
  std::span<const Neighbor> neighbors(NodeId n) const;
  std::optional<double> weight(NodeId a, NodeId b) const;

  std::size_t degree(NodeId n) const { return offsets_[n + 1] - offsets_[n]; }
  double strength(NodeId n) const { return strength_[n]; }
  double total_weight() const { return total_weight_; }

  // Nodes are given by id; the result keeps their labels.
  WeightedGraph induced_subgraph(std::span<const NodeId> nodes) const;

  // Same topology, every weight multiplied by factor (> 0).
  WeightedGraph scaled(double factor) const;

  // 64-bit FNV-1a over labels, endpoints and weight bits, as hex.
  std::string fingerprint() const;

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.labels_ == b.labels_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<double> strength_;
  double total_weight_ = 0.0;
};

// Co-membership counts: weight(i, j) = number of actors active in both
// forums i and j. Forums are the graph's nodes, including forums without
// any co-membership.
WeightedGraph project(const BipartiteGraph& bg);

// Component id per node; ids are assigned in order of each component's
// smallest node id.
std::vector<std::uint32_t> connected_components(const WeightedGraph& g);

// Largest component; ties go to the component holding the lexicographically
// smallest label.
WeightedGraph largest_component(const WeightedGraph& g);

NodeStats node_stats(const WeightedGraph& g, std::string_view label);

struct WeightSummary {
  std::size_t edges = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

WeightSummary summarize_weights(const WeightedGraph& g);

// TSV "label_i \t label_j \t weight", weights with 17 significant digits.
// Isolated nodes are not represented.
void write_edge_list(std::ostream& out, const WeightedGraph& g);
WeightedGraph read_edge_list(std::istream& in, const std::string& source);

// Shortest round-trip text form of a double; "nan"/"inf" for non-finite.
std::string format_double(double x);

}  // namespace atlas
