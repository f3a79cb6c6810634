#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "atlas/backbone.hpp"
#include "atlas/graph.hpp"

namespace atlas {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct LayoutOptions {
  std::uint64_t seed = 42;
  int iterations = 500;
  double spring_length = 1.0;
};

// Fruchterman-Reingold style spring layout: repulsion k^2/d between all
// pairs, attraction d^2/k along edges, step length capped by a
// geometrically cooling temperature. Output is centered on the origin.
std::vector<Point> layout(const WeightedGraph& g, const LayoutOptions& opts = {});

struct MapNode {
  std::string id;
  std::string label;
  std::uint32_t community = 0;
  double pagerank = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::size_t degree = 0;

  friend bool operator==(const MapNode&, const MapNode&) = default;
};

struct MapEdge {
  std::string source;
  std::string target;
  double weight = 0.0;

  friend bool operator==(const MapEdge&, const MapEdge&) = default;
};

struct MapMetadata {
  double alpha = 0.0;
  double q = 0.0;
  std::size_t communities = 0;
  std::string built_at;
  std::string source;  // fingerprint of the projected graph
  std::uint64_t layout_seed = 0;
  std::uint64_t community_seed = 0;

  friend bool operator==(const MapMetadata&, const MapMetadata&) = default;
};

struct InterestMap {
  MapMetadata meta;
  std::vector<MapNode> nodes;  // sorted by id
  std::vector<MapEdge> edges;

  const MapNode* find(std::string_view id) const;

  friend bool operator==(const InterestMap&, const InterestMap&) = default;
};

struct MapBuildOptions {
  LayoutOptions layout;
  std::uint64_t community_seed = 0;  // recorded only
  std::string built_at;
};

// Map of the backbone's largest component. communities and ranks must be
// keyed by exactly that component's labels; otherwise InputError lists the
// missing and unexpected ids. Coordinates are scaled into [-1, 1]^2.
InterestMap build_map(const BackboneGraph& backbone,
                      const std::unordered_map<std::string, std::uint32_t>& communities,
                      const std::unordered_map<std::string, double>& ranks,
                      const MapBuildOptions& opts = {});

enum class Relation { Neighbor, SameCommunity };

std::string_view to_string(Relation r);

struct Recommendation {
  std::string forum;
  double score = 0.0;
  Relation relation = Relation::SameCommunity;

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

// Read-only lookup structure over a map: community member lists ordered by
// PageRank and adjacency sets for neighbor flags.
class MapIndex {
 public:
  explicit MapIndex(const InterestMap& map);

  const InterestMap& map() const { return *map_; }
  std::optional<std::size_t> node_index(std::string_view id) const;

  // Node indices in the community, highest PageRank first (ties by id).
  const std::vector<std::size_t>& members(std::uint32_t community) const;
  std::size_t community_count() const { return members_.size(); }

  // Node indices of the whole map, highest PageRank first (ties by id).
  const std::vector<std::size_t>& by_rank() const { return by_rank_; }

  bool adjacent(std::size_t a, std::size_t b) const;

  // Same-community forums ranked by PageRank, never the query itself.
  // Throws LookupError for unknown forums.
  std::vector<Recommendation> recommend(std::string_view forum, std::size_t limit) const;

 private:
  const InterestMap* map_;
  std::unordered_map<std::string_view, std::size_t> by_id_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::size_t> by_rank_;
  std::vector<std::vector<std::size_t>> adjacency_;  // sorted
};

std::vector<Recommendation> recommend(const InterestMap& map, std::string_view forum,
                                      std::size_t limit);

enum class MapFormat { Json, Gexf };

nlohmann::ordered_json to_json(const InterestMap& map);
InterestMap map_from_json(const nlohmann::json& j);

std::string export_map(const InterestMap& map, MapFormat format);
InterestMap import_map_json(std::string_view text);

}  // namespace atlas
