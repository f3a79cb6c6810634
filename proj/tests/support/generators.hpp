#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "atlas/graph.hpp"
#include "atlas/ingest.hpp"

namespace testsupport {

// Actors mostly post in their own group's forums; a few stray outside.
struct PlantedSpec {
  std::size_t groups = 4;
  std::size_t forums_per_group = 12;
  std::size_t actors = 800;
  std::size_t forums_per_actor = 4;
  double stray = 0.2;
  std::uint64_t seed = 7;
};
std::vector<atlas::ActivityRecord> planted_activity(const PlantedSpec& spec);

// Each (actor, forum) pair present with probability p; post counts in [1, 30].
std::vector<atlas::ActivityRecord> random_activity(std::size_t actors, std::size_t forums,
                                                   double p, std::uint64_t seed);

std::string node_label(std::size_t i);

// G(n, p) with weights drawn log-uniformly over six decades.
atlas::WeightedGraph random_weighted(std::size_t n, double p, std::uint64_t seed);

// Ring of n nodes each joined to k/2 neighbours per side, then each edge's
// far end rewired with probability p.
atlas::WeightedGraph watts_strogatz(std::size_t n, std::size_t k, double p, std::uint64_t seed);

// Preferential attachment, m edges per new node.
atlas::WeightedGraph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed);

atlas::WeightedGraph clique_pair();  // two 5-cliques bridged by one edge

atlas::WeightedGraph from_pairs(std::size_t n,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                double w = 1.0);

}  // namespace testsupport
