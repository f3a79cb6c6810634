#include "atlas/server.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <httplib.h>

#include "atlas/error.hpp"

namespace atlas {

namespace {

using ojson = nlohmann::ordered_json;

Response json_response(int status, const ojson& body) { return {status, body.dump()}; }

Response error_response(int status, std::string_view code, std::string_view detail = {}) {
  ojson body;
  body["error"] = code;
  if (!detail.empty()) body["detail"] = detail;
  return json_response(status, body);
}

Response not_loaded() { return error_response(503, "map_not_loaded"); }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

struct MapService::State {
  explicit State(InterestMap m) : map(std::move(m)), index(map) {
    lowered.reserve(map.nodes.size());
    for (const auto& n : map.nodes) lowered.push_back(lower(n.label));
  }
  InterestMap map;
  MapIndex index;  // refers into map; State is never moved
  std::vector<std::string> lowered;
};

MapService::MapService(InterestMap map) : state_(std::make_unique<const State>(std::move(map))) {}

MapService::MapService() = default;
MapService::~MapService() = default;

const InterestMap* MapService::map() const { return state_ ? &state_->map : nullptr; }

Response MapService::get_map(MapDetail detail) const {
  if (!state_) return not_loaded();
  const auto& map = state_->map;
  if (detail == MapDetail::Full) return json_response(200, to_json(map));

  ojson body;
  body["meta"] = to_json(map)["meta"];
  auto& list = body["communities"] = ojson::array();
  const auto& index = state_->index;
  for (std::uint32_t c = 0; c < index.community_count(); ++c) {
    const auto& members = index.members(c);
    if (members.empty()) continue;
    ojson rec;
    rec["id"] = c;
    rec["size"] = members.size();
    auto& top = rec["top"] = ojson::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(10, members.size()); ++i) {
      const auto& node = map.nodes[members[i]];
      ojson t;
      t["id"] = node.id;
      t["label"] = node.label;
      t["pagerank"] = node.pagerank;
      top.push_back(std::move(t));
    }
    list.push_back(std::move(rec));
  }
  return json_response(200, body);
}

Response MapService::get_recommendations(std::string_view forum, std::size_t limit) const {
  if (!state_) return not_loaded();
  if (!state_->index.node_index(forum)) return error_response(404, "unknown_forum");
  auto body = ojson::array();
  for (const auto& r : state_->index.recommend(forum, limit)) {
    ojson rec;
    rec["forum"] = r.forum;
    rec["score"] = r.score;
    rec["relation"] = to_string(r.relation);
    body.push_back(std::move(rec));
  }
  return json_response(200, body);
}

Response MapService::search(std::string_view prefix, std::size_t limit) const {
  if (!state_) return not_loaded();
  const auto needle = lower(prefix);
  auto body = ojson::array();
  for (auto idx : state_->index.by_rank()) {
    if (body.size() >= limit) break;
    if (!state_->lowered[idx].starts_with(needle)) continue;
    const auto& node = state_->map.nodes[idx];
    ojson hit;
    hit["id"] = node.id;
    hit["label"] = node.label;
    hit["community"] = node.community;
    body.push_back(std::move(hit));
  }
  return json_response(200, body);
}

Response MapService::health() const {
  ojson body;
  body["status"] = "ok";
  body["map_loaded"] = loaded();
  body["nodes"] = state_ ? state_->map.nodes.size() : 0;
  return json_response(200, body);
}

struct HttpServer::Impl {
  Impl(const MapService& s, ServerOptions o) : service(s), options(std::move(o)) {}
  const MapService& service;
  ServerOptions options;
  httplib::Server http;
  int bound_port = -1;
};

namespace {

std::optional<std::size_t> parse_limit(const httplib::Request& req, std::size_t fallback) {
  if (!req.has_param("limit")) return fallback;
  const auto text = req.get_param_value("limit");
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json; charset=utf-8");
}

}  // namespace

HttpServer::HttpServer(const MapService& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  auto& http = impl_->http;
  const auto& svc = impl_->service;

  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Methods", "GET, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});
  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  http.Get("/api/health", [&svc](const httplib::Request&, httplib::Response& res) {
    send(res, svc.health());
  });
  http.Get("/api/map", [&svc](const httplib::Request& req, httplib::Response& res) {
    const auto detail = req.has_param("detail") ? req.get_param_value("detail") : "full";
    if (detail != "full" && detail != "summary") {
      return send(res, error_response(400, "bad_request", "detail must be full or summary"));
    }
    send(res, svc.get_map(detail == "full" ? MapDetail::Full : MapDetail::Summary));
  });
  http.Get("/api/recommend", [&svc](const httplib::Request& req, httplib::Response& res) {
    const auto limit = parse_limit(req, 10);
    if (!req.has_param("forum") || !limit) {
      return send(res, error_response(400, "bad_request", "need forum and integer limit"));
    }
    send(res, svc.get_recommendations(req.get_param_value("forum"), *limit));
  });
  http.Get("/api/search", [&svc](const httplib::Request& req, httplib::Response& res) {
    const auto limit = parse_limit(req, 20);
    if (!limit) return send(res, error_response(400, "bad_request", "limit must be an integer"));
    const auto prefix = req.has_param("prefix") ? req.get_param_value("prefix") : "";
    send(res, svc.search(prefix, *limit));
  });

  if (impl_->options.static_root) {
    if (!http.set_mount_point("/", impl_->options.static_root->string())) {
      throw IoError("static root not found: " + impl_->options.static_root->string());
    }
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    impl_->bound_port = impl_->http.bind_to_any_port(o.host);
  } else if (impl_->http.bind_to_port(o.host, o.port)) {
    impl_->bound_port = o.port;
  }
  if (impl_->bound_port < 0) {
    throw IoError("cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return impl_->bound_port;
}

void HttpServer::listen() { impl_->http.listen_after_bind(); }

void HttpServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

void HttpServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace atlas
