#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/backbone.hpp"
#include "atlas/community.hpp"
#include "atlas/ingest.hpp"
#include "atlas/interest_map.hpp"

namespace atlas {

struct PipelineConfig {
  std::filesystem::path input;
  ActivityFormat format = ActivityFormat::Tsv;
  std::uint64_t min_posts = 10;
  std::uint64_t min_forum_actors = 1;
  double alpha = 0.05;
  std::string alphas = "0.0001:1.0:log";
  std::size_t replicates = 30;
  std::uint64_t layout_seed = 42;
  std::uint64_t community_seed = 42;
  std::uint64_t er_seed = 42;
  std::size_t k_min = 50;
  int layout_iterations = 500;
  bool unweighted_communities = false;
  std::filesystem::path out_dir = "out";
};

// "lo:hi:log[:points_per_decade]" or a comma-separated list. Every value
// must lie in (0, 1); throws ParameterError otherwise.
std::vector<double> parse_alpha_grid(std::string_view spec);

// ISO-8601 UTC timestamp stamped into map metadata: SOURCE_DATE_EPOCH if
// set, else the input file's modification time.
std::string build_timestamp(const std::filesystem::path& input);

using Logger = std::function<void(std::string_view)>;

// Runs the pipeline lazily: each accessor computes its upstream stages once.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg, Logger log = {});

  const PipelineConfig& config() const { return cfg_; }

  const BipartiteGraph& bipartite();
  const WeightedGraph& projection();
  const BackboneGraph& backbone();
  const WeightedGraph& backbone_lcc();
  const std::vector<double>& ranks();  // over backbone_lcc()
  const CommunityAssignment& communities();  // over backbone_lcc()
  const InterestMap& map();

  // Each writes its artifacts under <out>/{graphs,stats,maps}/ and returns
  // the paths written.
  std::vector<std::filesystem::path> write_ingest();
  std::vector<std::filesystem::path> write_projection();
  std::vector<std::filesystem::path> write_backbone();
  std::vector<std::filesystem::path> write_analysis();
  std::vector<std::filesystem::path> write_sweep();
  std::vector<std::filesystem::path> write_communities();
  std::vector<std::filesystem::path> write_map();

 private:
  void log(std::string_view msg) const;
  std::filesystem::path artifact(std::string_view dir, std::string_view name) const;

  PipelineConfig cfg_;
  Logger log_;
  std::optional<BipartiteGraph> bipartite_;
  std::optional<WeightedGraph> projection_;
  std::optional<BackboneGraph> backbone_;
  std::optional<WeightedGraph> lcc_;
  std::optional<std::vector<double>> ranks_;
  std::optional<CommunityAssignment> communities_;
  std::optional<InterestMap> map_;
};

}  // namespace atlas
