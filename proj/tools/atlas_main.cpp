#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "atlas/error.hpp"
#include "atlas/parallel.hpp"
#include "atlas/pipeline.hpp"
#include "atlas/server.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 2;
constexpr int kFailure = 1;

struct ServeArgs {
  std::string map_path;
  int port = 8080;
  std::string host = "0.0.0.0";
  std::string static_root;
};

struct IngestArgs {
  std::string url;
  std::string dest;
};

const CLI::Validator kOpenUnit(
    [](std::string& s) -> std::string {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(s, &used);
        if (used != s.size()) return "not a number: " + s;
      } catch (const std::exception&) {
        return "not a number: " + s;
      }
      if (!(v > 0.0 && v < 1.0)) return "must lie strictly between 0 and 1";
      return {};
    },
    "(0,1)");

const CLI::Validator kAlphaGrid(
    [](std::string& s) -> std::string {
      try {
        atlas::parse_alpha_grid(s);
      } catch (const atlas::Error& e) {
        return e.what();
      }
      return {};
    },
    "GRID");

std::string default_out() {
  const char* env = std::getenv("ATLAS_OUT");
  return env && *env ? env : "out";
}

void print_paths(const std::vector<fs::path>& paths) {
  for (const auto& p : paths) std::cout << p.string() << '\n';
}

int serve(const ServeArgs& args, const std::string& out_dir) {
  const fs::path map_path = args.map_path.empty() ? fs::path(out_dir) / "maps" / "map.json"
                                                   : fs::path(args.map_path);
  std::unique_ptr<atlas::MapService> service;
  if (fs::exists(map_path)) {
    std::ifstream in(map_path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    service = std::make_unique<atlas::MapService>(atlas::import_map_json(text.str()));
    std::cerr << "atlas: loaded " << map_path.string() << " ("
              << service->map()->nodes.size() << " nodes)\n";
  } else if (!args.map_path.empty()) {
    throw atlas::IoError("map not found: " + map_path.string());
  } else {
    std::cerr << "atlas: no map at " << map_path.string() << ", map endpoints answer 503\n";
    service = std::make_unique<atlas::MapService>();
  }

  atlas::ServerOptions opts;
  opts.host = args.host;
  opts.port = args.port;
  if (!args.static_root.empty()) opts.static_root = args.static_root;

  // Signals go to a dedicated thread so stop() never runs inside a handler.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  atlas::HttpServer server(*service, opts);
  const int port = server.bind();
  std::cerr << "atlas: listening on " << args.host << ":" << port << '\n';
  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  server.listen();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build interest maps from forum activity logs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read key = value settings; explicit flags win");

  atlas::PipelineConfig cfg;
  std::string input;
  std::string format = "tsv";
  std::string out = default_out();
  unsigned threads = 0;

  app.add_option("--input,-i", input, "Activity file (actor, forum, post count)");
  app.add_option("--format", format, "tsv or jsonl")->check(CLI::IsMember({"tsv", "jsonl", "jsonlines"}));
  app.add_option("--min-posts", cfg.min_posts, "Posts needed for an actor to count in a forum")
      ->capture_default_str();
  app.add_option("--min-forum-actors", cfg.min_forum_actors, "Drop forums with fewer actors")
      ->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "Backbone significance cutoff")
      ->check(kOpenUnit)
      ->capture_default_str();
  app.add_option("--alphas", cfg.alphas, "Sweep grid: lo:hi:log[:per_decade] or a,b,c")
      ->check(kAlphaGrid)
      ->capture_default_str();
  app.add_option("--replicates", cfg.replicates, "Random graphs per baseline")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--er-seed", cfg.er_seed)->capture_default_str();
  app.add_option("--community-seed", cfg.community_seed)->capture_default_str();
  app.add_option("--layout-seed", cfg.layout_seed)->capture_default_str();
  app.add_option("--layout-iterations", cfg.layout_iterations)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--k-min", cfg.k_min, "Smallest degree in the power-law fit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--unweighted", cfg.unweighted_communities, "Ignore weights in Louvain");
  app.add_option("--out,-o", out, "Output directory (ATLAS_OUT)")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();

  auto add_sub = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    return sub;
  };
  IngestArgs ingest_args;
  auto* ingest = add_sub("ingest", "Threshold activity into memberships");
  ingest->add_option("--url", ingest_args.url, "Download the dataset first");
  ingest->add_option("--dest", ingest_args.dest, "Where the download lands (default: --input)");
  auto* project = add_sub("project", "Forum co-membership network");
  auto* backbone = add_sub("backbone", "Disparity-filter backbone at --alpha");
  auto* analyze = add_sub("analyze", "Network statistics of the backbone");
  auto* sweep = add_sub("sweep", "Statistics across the --alphas grid");
  auto* communities = add_sub("communities", "Louvain communities of the backbone");
  auto* map = add_sub("map", "Laid-out interest map (JSON and GEXF)");
  auto* run = add_sub("run", "Every stage except serve");
  ServeArgs serve_args;
  auto* serve_cmd = add_sub("serve", "HTTP API over a built map");
  serve_cmd->add_option("--map", serve_args.map_path, "Map JSON (default <out>/maps/map.json)");
  serve_cmd->add_option("--port", serve_args.port)->check(CLI::Range(0, 65535))->capture_default_str();
  serve_cmd->add_option("--host", serve_args.host)->capture_default_str();
  serve_cmd->add_option("--static-root", serve_args.static_root, "Directory served under /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  cfg.format = *atlas::parse_activity_format(format);
  cfg.out_dir = out;
  if (threads > 0) atlas::set_worker_count(threads);

  try {
    if (serve_cmd->parsed()) return serve(serve_args, out);

    if (ingest->parsed() && !ingest_args.url.empty()) {
      const fs::path dest = ingest_args.dest.empty() ? fs::path(input) : fs::path(ingest_args.dest);
      if (dest.empty()) {
        std::cerr << "atlas: ingest --url needs --dest or --input\n";
        return kUsageError;
      }
      std::cerr << "atlas: fetching " << ingest_args.url << '\n';
      atlas::fetch_dataset(ingest_args.url, dest);
      if (input.empty()) input = dest.string();
    }
    if (input.empty()) {
      std::cerr << "atlas: --input is required\n";
      return kUsageError;
    }
    cfg.input = input;

    atlas::Pipeline pipeline(cfg, [](std::string_view msg) { std::cerr << "atlas: " << msg << '\n'; });
    if (ingest->parsed()) print_paths(pipeline.write_ingest());
    if (project->parsed()) print_paths(pipeline.write_projection());
    if (backbone->parsed()) print_paths(pipeline.write_backbone());
    if (analyze->parsed()) print_paths(pipeline.write_analysis());
    if (sweep->parsed()) print_paths(pipeline.write_sweep());
    if (communities->parsed()) print_paths(pipeline.write_communities());
    if (map->parsed()) print_paths(pipeline.write_map());
    if (run->parsed()) {
      print_paths(pipeline.write_ingest());
      print_paths(pipeline.write_projection());
      print_paths(pipeline.write_backbone());
      print_paths(pipeline.write_analysis());
      print_paths(pipeline.write_communities());
      print_paths(pipeline.write_map());
      print_paths(pipeline.write_sweep());
    }
  } catch (const atlas::ParameterError& e) {
    std::cerr << "atlas: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "atlas: error: " << e.what() << '\n';
    return kFailure;
  }
  return 0;
}
