#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "atlas/graph.hpp"

namespace atlas {

struct CommunityAssignment {
  // Community per node id. Ids are dense, ordered by decreasing community
  // size (ties: community holding the smaller node id first).
  std::vector<std::uint32_t> labels;
  double q = 0.0;
  // Aggregation levels that improved modularity.
  std::size_t passes = 0;
  std::size_t communities = 0;
  // Modularity on the input graph after each pass; non-decreasing.
  std::vector<double> pass_q;
  std::uint64_t seed = 0;
};

struct LouvainOptions {
  std::uint64_t seed = 42;
  double resolution = 1.0;
  // false: every edge counts with weight 1 (sensitivity checks).
  bool weighted = true;
  // Stop once a sweep or a level improves Q by no more than this.
  double min_gain = 1e-7;
};

CommunityAssignment louvain(const WeightedGraph& g, const LouvainOptions& opts = {});

// Q = sum_c [ in_c / 2W - resolution * (tot_c / 2W)^2 ]; 0 for a graph
// without edges. Throws InputError if labels.size() != node count.
double modularity(const WeightedGraph& g, const std::vector<std::uint32_t>& labels,
                  double resolution = 1.0, bool weighted = true);

// Label-keyed variant; throws InputError naming unlabeled nodes.
double modularity(const WeightedGraph& g,
                  const std::unordered_map<std::string, std::uint32_t>& labels,
                  double resolution = 1.0, bool weighted = true);

// Dense relabeling by decreasing size; ties by smallest member node id.
std::vector<std::uint32_t> canonical_labels(const std::vector<std::uint32_t>& labels);

// CSV "forum,community"
void write_assignment_csv(std::ostream& out, const WeightedGraph& g,
                          const CommunityAssignment& a);

nlohmann::ordered_json summary_json(const CommunityAssignment& a);

}  // namespace atlas
