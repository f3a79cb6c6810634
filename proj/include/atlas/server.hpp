#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "atlas/interest_map.hpp"

namespace atlas {

struct Response {
  int status = 200;
  std::string body;  // JSON
};

enum class MapDetail { Full, Summary };

// Transport-independent request handling over an immutable map. All
// methods are const and safe to call concurrently.
class MapService {
 public:
  MapService();  // nothing loaded: map endpoints answer 503
  explicit MapService(InterestMap map);
  ~MapService();

  MapService(const MapService&) = delete;
  MapService& operator=(const MapService&) = delete;

  bool loaded() const { return state_ != nullptr; }
  const InterestMap* map() const;

  Response get_map(MapDetail detail) const;
  Response get_recommendations(std::string_view forum, std::size_t limit) const;
  // Case-insensitive label prefix match, highest PageRank first.
  Response search(std::string_view prefix, std::size_t limit) const;
  Response health() const;

 private:
  struct State;
  std::unique_ptr<const State> state_;
};

struct ServerOptions {
  std::string host = "0.0.0.0";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_root;
};

// Routes: GET /api/map[?detail=full|summary], /api/recommend?forum=&limit=,
// /api/search?prefix=&limit=, /api/health, static files under /.
class HttpServer {
 public:
  HttpServer(const MapService& service, ServerOptions options);
  ~HttpServer();

  // Binds and returns the port actually bound; throws IoError on failure.
  int bind();
  // Blocks until stop(); bind() must have succeeded.
  void listen();
  // Returns once a listen() running on another thread accepts requests.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace atlas
