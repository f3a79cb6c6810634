#include "atlas/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "atlas/error.hpp"
#include "atlas/metrics.hpp"

namespace atlas {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text) {
  double v = 0.0;
  const auto t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParameterError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string iso8601(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<double> parse_alpha_grid(std::string_view spec) {
  std::vector<std::string_view> parts;
  for (std::size_t start = 0;;) {
    const auto colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }

  std::vector<double> grid;
  if (parts.size() >= 3 && trim(parts[2]) == "log") {
    if (parts.size() > 4) throw ParameterError("alpha grid: lo:hi:log[:points_per_decade]");
    int ppd = 5;
    if (parts.size() == 4) ppd = static_cast<int>(parse_real(parts[3]));
    grid = log_alpha_grid(parse_real(parts[0]), parse_real(parts[1]), ppd);
  } else if (parts.size() == 1) {
    for (std::size_t start = 0;;) {
      const auto comma = spec.find(',', start);
      grid.push_back(parse_real(spec.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  } else {
    throw ParameterError("alpha grid: use lo:hi:log[:n] or a comma list");
  }
  if (grid.empty()) throw ParameterError("alpha grid is empty");
  for (double a : grid) {
    if (!(a > 0.0 && a < 1.0)) {
      throw ParameterError("alpha " + format_double(a) + " outside (0, 1)");
    }
  }
  return grid;
}

std::string build_timestamp(const fs::path& input) {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    return iso8601(static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10)));
  }
  std::error_code ec;
  const auto mtime = fs::last_write_time(input, ec);
  if (ec) return iso8601(0);
  const auto sys = std::chrono::file_clock::to_sys(mtime);
  return iso8601(std::chrono::system_clock::to_time_t(
      std::chrono::time_point_cast<std::chrono::system_clock::duration>(sys)));
}

Pipeline::Pipeline(PipelineConfig cfg, Logger log) : cfg_(std::move(cfg)), log_(std::move(log)) {}

void Pipeline::log(std::string_view msg) const {
  if (log_) log_(msg);
}

fs::path Pipeline::artifact(std::string_view dir, std::string_view name) const {
  return cfg_.out_dir / dir / name;
}

const BipartiteGraph& Pipeline::bipartite() {
  if (!bipartite_) {
    log("loading " + cfg_.input.string());
    const auto records = load_activity(cfg_.input, cfg_.format);
    log("read " + std::to_string(records.size()) + " activity records");
    bipartite_ = build_bipartite(records, {cfg_.min_posts, cfg_.min_forum_actors});
    log("bipartite graph: " + std::to_string(bipartite_->actor_count()) + " actors, " +
        std::to_string(bipartite_->forum_count()) + " forums");
  }
  return *bipartite_;
}

const WeightedGraph& Pipeline::projection() {
  if (!projection_) {
    const auto& bg = bipartite();
    if (bg.empty()) throw InputError("no memberships survive the activity threshold");
    projection_ = project(bg);
    log("projection: " + std::to_string(projection_->edge_count()) + " edges");
  }
  return *projection_;
}

const BackboneGraph& Pipeline::backbone() {
  if (!backbone_) {
    backbone_ = extract_backbone(projection(), cfg_.alpha);
    log("backbone at alpha " + format_double(cfg_.alpha) + ": " +
        std::to_string(backbone_->graph.node_count()) + " nodes, " +
        std::to_string(backbone_->graph.edge_count()) + " edges");
  }
  return *backbone_;
}

const WeightedGraph& Pipeline::backbone_lcc() {
  if (!lcc_) {
    lcc_ = largest_component(backbone().graph);
    log("largest component: " + std::to_string(lcc_->node_count()) + " nodes");
  }
  return *lcc_;
}

const std::vector<double>& Pipeline::ranks() {
  if (!ranks_) ranks_ = pagerank(backbone_lcc());
  return *ranks_;
}

const CommunityAssignment& Pipeline::communities() {
  if (!communities_) {
    communities_ = louvain(backbone_lcc(), {.seed = cfg_.community_seed,
                                            .weighted = !cfg_.unweighted_communities});
    log("louvain: " + std::to_string(communities_->communities) + " communities, Q = " +
        format_double(communities_->q));
  }
  return *communities_;
}

const InterestMap& Pipeline::map() {
  if (!map_) {
    const auto& lcc = backbone_lcc();
    const auto& comm = communities();
    const auto& pr = ranks();
    std::unordered_map<std::string, std::uint32_t> labels;
    std::unordered_map<std::string, double> scores;
    for (NodeId i = 0; i < lcc.node_count(); ++i) {
      labels.emplace(lcc.label(i), comm.labels[i]);
      scores.emplace(lcc.label(i), pr[i]);
    }
    MapBuildOptions opts;
    opts.layout = {cfg_.layout_seed, cfg_.layout_iterations, 1.0};
    opts.community_seed = cfg_.community_seed;
    opts.built_at = build_timestamp(cfg_.input);
    map_ = build_map(backbone(), labels, scores, opts);
  }
  return *map_;
}

std::vector<fs::path> Pipeline::write_ingest() {
  const auto& bg = bipartite();
  const auto s = summarize(bg);
  ojson j;
  j["input"] = cfg_.input.string();
  j["min_posts"] = cfg_.min_posts;
  j["min_forum_actors"] = cfg_.min_forum_actors;
  j["actors"] = s.actors;
  j["forums"] = s.forums;
  j["memberships"] = s.memberships;
  j["forums_per_actor"] = {{"mean", s.mean_forums_per_actor},
                           {"min", s.min_forums_per_actor},
                           {"max", s.max_forums_per_actor}};
  j["actors_per_forum"] = {{"mean", s.mean_actors_per_forum},
                           {"min", s.min_actors_per_forum},
                           {"max", s.max_actors_per_forum}};
  const auto stats = artifact("stats", "ingest.json");
  write_text(stats, j.dump(2) + "\n");

  std::ostringstream members;
  for (std::size_t a = 0; a < bg.actor_count(); ++a) {
    for (auto f : bg.forums_of(a)) members << bg.actors()[a] << '\t' << bg.forums()[f] << '\n';
  }
  const auto graph = artifact("graphs", "memberships.tsv");
  write_text(graph, members.str());
  return {stats, graph};
}

std::vector<fs::path> Pipeline::write_projection() {
  const auto& g = projection();
  std::ostringstream edges;
  write_edge_list(edges, g);
  const auto graph = artifact("graphs", "projection.tsv");
  write_text(graph, edges.str());

  const auto w = summarize_weights(g);
  ojson j;
  j["nodes"] = g.node_count();
  j["edges"] = g.edge_count();
  j["weight"] = {{"mean", w.mean}, {"min", w.min}, {"max", w.max}};
  j["fingerprint"] = g.fingerprint();
  const auto stats = artifact("stats", "projection.json");
  write_text(stats, j.dump(2) + "\n");
  return {graph, stats};
}

std::vector<fs::path> Pipeline::write_backbone() {
  const auto& bb = backbone();
  std::ostringstream edges;
  write_edge_list(edges, bb.graph);
  const auto graph = artifact("graphs", "backbone.tsv");
  write_text(graph, edges.str());

  const auto w = summarize_weights(bb.graph);
  ojson j;
  j["alpha"] = bb.alpha_cutoff;
  j["source"] = bb.source_fingerprint;
  j["source_nodes"] = projection().node_count();
  j["nodes"] = bb.graph.node_count();
  j["edges"] = bb.graph.edge_count();
  j["lcc_nodes"] = backbone_lcc().node_count();
  j["lcc_edges"] = backbone_lcc().edge_count();
  j["weight"] = {{"mean", w.mean}, {"min", w.min}, {"max", w.max}};
  const auto stats = artifact("stats", "backbone.json");
  write_text(stats, j.dump(2) + "\n");
  return {graph, stats};
}

std::vector<fs::path> Pipeline::write_analysis() {
  const auto& lcc = backbone_lcc();
  if (lcc.node_count() < 2) throw UndefinedStatistic("backbone component has fewer than 2 nodes");

  NetworkStats s;
  s.N = lcc.node_count();
  s.M = lcc.edge_count();
  s.C = clustering(lcc);
  const auto path = average_path_length(lcc);
  s.L = path.mean;
  s.L_sampled = path.sampled;

  ojson j = to_json(s);
  try {
    const auto fit = power_law_fit(lcc, cfg_.k_min);
    j["gamma"] = fit.gamma;
    j["r_squared"] = fit.r_squared;
  } catch (const FitError& e) {
    j["gamma"] = nullptr;
    j["r_squared"] = nullptr;
    j["fit_error"] = e.what();
  }
  try {
    const auto sw = small_worldness(lcc, cfg_.replicates, cfg_.er_seed);
    j["S_G"] = sw.s_g;
    j["p_value_proxy"] = sw.p_value_proxy;
    j["C_rand"] = {{"mean", sw.baseline.c_mean}, {"sd", sw.baseline.c_sd}};
    j["L_rand"] = {{"mean", sw.baseline.l_mean}, {"sd", sw.baseline.l_sd}};
    j["replicates_skipped"] = sw.baseline.skipped;
  } catch (const UndefinedStatistic& e) {
    j["S_G"] = nullptr;
    j["small_world_error"] = e.what();
  }
  const auto& comm = communities();
  j["Q"] = comm.q;
  j["communities"] = comm.communities;
  j["L_sw"] = std::log10(static_cast<double>(s.N));
  j["alpha"] = cfg_.alpha;
  j["replicates"] = cfg_.replicates;
  j["k_min"] = cfg_.k_min;
  j["seeds"] = {{"er", cfg_.er_seed}, {"community", cfg_.community_seed}};
  const auto stats = artifact("stats", "stats.json");
  write_text(stats, j.dump(2) + "\n");

  std::ostringstream hist;
  write_degree_histogram(hist, degree_histogram(lcc));
  const auto hist_path = artifact("stats", "degree_histogram.csv");
  write_text(hist_path, hist.str());
  return {stats, hist_path};
}

std::vector<fs::path> Pipeline::write_sweep() {
  const auto grid = parse_alpha_grid(cfg_.alphas);
  SweepOptions opts;
  opts.replicates = cfg_.replicates;
  opts.seed = cfg_.er_seed;
  opts.community_seed = cfg_.community_seed;
  opts.k_min = cfg_.k_min;
  const auto& g = projection();
  SweepResult result;
  for (double a : grid) {
    log("sweep alpha " + format_double(a));
    result.rows.push_back(analyze_backbone(extract_backbone(g, a), opts));
  }
  std::ostringstream csv;
  write_sweep_csv(csv, result);
  const auto path = artifact("stats", "sweep.csv");
  write_text(path, csv.str());
  return {path};
}

std::vector<fs::path> Pipeline::write_communities() {
  const auto& comm = communities();
  std::ostringstream csv;
  write_assignment_csv(csv, backbone_lcc(), comm);
  const auto graph = artifact("graphs", "communities.csv");
  write_text(graph, csv.str());
  auto j = summary_json(comm);
  j["alpha"] = cfg_.alpha;
  j["weighted"] = !cfg_.unweighted_communities;
  const auto stats = artifact("stats", "communities.json");
  write_text(stats, j.dump(2) + "\n");
  return {graph, stats};
}

std::vector<fs::path> Pipeline::write_map() {
  const auto& m = map();
  const auto json_path = artifact("maps", "map.json");
  write_text(json_path, export_map(m, MapFormat::Json));
  const auto gexf_path = artifact("maps", "map.gexf");
  write_text(gexf_path, export_map(m, MapFormat::Gexf));
  return {json_path, gexf_path};
}

}  // namespace atlas
