#include "atlas/interest_map.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "atlas/community.hpp"
#include "atlas/error.hpp"
#include "atlas/parallel.hpp"

namespace atlas {

std::vector<Point> layout(const WeightedGraph& g, const LayoutOptions& opts) {
  const std::size_t n = g.node_count();
  std::vector<Point> pos(n);
  if (n <= 1) return pos;
  if (!(opts.spring_length > 0.0)) throw ParameterError("spring length must be positive");

  const double k = opts.spring_length;
  const double k2 = k * k;
  const double radius = k * std::sqrt(static_cast<double>(n));
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> coord(-radius, radius);
  for (auto& p : pos) {
    p.x = coord(rng);
    p.y = coord(rng);
  }

  const int iterations = std::max(0, opts.iterations);
  const double t_start = std::max(k, 0.5 * radius);
  const double t_end = 1e-3 * k;
  const double cooling =
      iterations > 0 ? std::pow(t_end / t_start, 1.0 / static_cast<double>(iterations)) : 1.0;
  double temperature = t_start;

  std::vector<Point> disp(n);
  for (int it = 0; it < iterations; ++it) {
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        double fx = 0.0, fy = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          double dx = pos[i].x - pos[j].x;
          double dy = pos[i].y - pos[j].y;
          double d2 = dx * dx + dy * dy;
          if (d2 < 1e-18) {
            // coincident: push apart along a fixed index-dependent direction
            dx = i < j ? -1e-9 : 1e-9;
            dy = 0.0;
            d2 = 1e-18;
          }
          const double f = k2 / d2;  // (k^2 / d) along the unit vector
          fx += dx * f;
          fy += dy * f;
        }
        for (const auto& nb : g.neighbors(static_cast<NodeId>(i))) {
          const double dx = pos[i].x - pos[nb.node].x;
          const double dy = pos[i].y - pos[nb.node].y;
          const double d = std::sqrt(dx * dx + dy * dy);
          const double f = d / k;  // (d^2 / k) along the unit vector
          fx -= dx * f;
          fy -= dy * f;
        }
        disp[i] = {fx, fy};
      }
    });
    for (std::size_t i = 0; i < n; ++i) {
      const double len = std::hypot(disp[i].x, disp[i].y);
      if (len > 0.0) {
        const double step = std::min(len, temperature) / len;
        pos[i].x += disp[i].x * step;
        pos[i].y += disp[i].y * step;
      }
    }
    temperature *= cooling;
  }

  double cx = 0.0, cy = 0.0;
  for (const auto& p : pos) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  for (auto& p : pos) {
    p.x -= cx;
    p.y -= cy;
  }
  return pos;
}

const MapNode* InterestMap::find(std::string_view id) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                                   [](const MapNode& n, std::string_view v) { return n.id < v; });
  if (it == nodes.end() || it->id != id) return nullptr;
  return &*it;
}

namespace {

template <typename Map>
void check_coverage(const WeightedGraph& lcc, const Map& keyed, const char* what) {
  std::vector<std::string> missing, unexpected;
  for (const auto& label : lcc.labels()) {
    if (!keyed.contains(label)) missing.push_back(label);
  }
  for (const auto& [label, _] : keyed) {
    if (!lcc.find(label)) unexpected.push_back(label);
  }
  if (missing.empty() && unexpected.empty()) return;
  std::sort(unexpected.begin(), unexpected.end());
  std::ostringstream msg;
  msg << what << " do not match the backbone component";
  auto list = [&msg](const char* name, const std::vector<std::string>& ids) {
    if (ids.empty()) return;
    msg << "; " << name << " (" << ids.size() << "):";
    for (std::size_t i = 0; i < std::min<std::size_t>(ids.size(), 20); ++i) msg << ' ' << ids[i];
    if (ids.size() > 20) msg << " ...";
  };
  list("missing", missing);
  list("unexpected", unexpected);
  throw InputError(msg.str());
}

}  // namespace

InterestMap build_map(const BackboneGraph& backbone,
                      const std::unordered_map<std::string, std::uint32_t>& communities,
                      const std::unordered_map<std::string, double>& ranks,
                      const MapBuildOptions& opts) {
  const auto lcc = largest_component(backbone.graph);
  check_coverage(lcc, communities, "community labels");
  check_coverage(lcc, ranks, "pagerank scores");

  double rank_sum = 0.0;
  for (const auto& [_, r] : ranks) rank_sum += r;
  if (!lcc.empty() && std::abs(rank_sum - 1.0) > 1e-6) {
    throw InputError("pagerank scores sum to " + format_double(rank_sum) + ", expected 1");
  }

  auto pos = layout(lcc, opts.layout);
  double extent = 0.0;
  for (const auto& p : pos) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  if (extent > 0.0) {
    for (auto& p : pos) {
      p.x /= extent;
      p.y /= extent;
    }
  }

  InterestMap map;
  std::set<std::uint32_t> distinct;
  map.nodes.reserve(lcc.node_count());
  for (NodeId i = 0; i < lcc.node_count(); ++i) {
    const auto& id = lcc.label(i);
    const auto community = communities.at(id);
    distinct.insert(community);
    map.nodes.push_back({id, id, community, ranks.at(id), pos[i].x, pos[i].y, lcc.degree(i)});
  }
  map.edges.reserve(lcc.edge_count());
  for (const auto& e : lcc.edges()) {
    map.edges.push_back({lcc.label(e.u), lcc.label(e.v), e.weight});
  }
  map.meta.alpha = backbone.alpha_cutoff;
  map.meta.q = lcc.empty() ? 0.0 : modularity(lcc, communities);
  map.meta.communities = distinct.size();
  map.meta.built_at = opts.built_at;
  map.meta.source = backbone.source_fingerprint;
  map.meta.layout_seed = opts.layout.seed;
  map.meta.community_seed = opts.community_seed;
  return map;
}

std::string_view to_string(Relation r) {
  return r == Relation::Neighbor ? "neighbor" : "same-community";
}

MapIndex::MapIndex(const InterestMap& map) : map_(&map) {
  const auto& nodes = map.nodes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!by_id_.emplace(nodes[i].id, i).second) {
      throw InputError("duplicate node id '" + nodes[i].id + "'");
    }
  }
  auto higher_rank = [&](std::size_t a, std::size_t b) {
    if (nodes[a].pagerank != nodes[b].pagerank) return nodes[a].pagerank > nodes[b].pagerank;
    return nodes[a].id < nodes[b].id;
  };

  by_rank_.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    by_rank_[i] = i;
    if (nodes[i].community >= members_.size()) members_.resize(nodes[i].community + 1);
    members_[nodes[i].community].push_back(i);
  }
  std::sort(by_rank_.begin(), by_rank_.end(), higher_rank);
  for (auto& m : members_) std::sort(m.begin(), m.end(), higher_rank);

  adjacency_.resize(nodes.size());
  for (const auto& e : map.edges) {
    const auto s = node_index(e.source);
    const auto t = node_index(e.target);
    if (!s || !t) throw InputError("edge " + e.source + " - " + e.target + " has an unknown endpoint");
    adjacency_[*s].push_back(*t);
    adjacency_[*t].push_back(*s);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

std::optional<std::size_t> MapIndex::node_index(std::string_view id) const {
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::size_t>& MapIndex::members(std::uint32_t community) const {
  static const std::vector<std::size_t> none;
  return community < members_.size() ? members_[community] : none;
}

bool MapIndex::adjacent(std::size_t a, std::size_t b) const {
  return std::binary_search(adjacency_[a].begin(), adjacency_[a].end(), b);
}

std::vector<Recommendation> MapIndex::recommend(std::string_view forum, std::size_t limit) const {
  const auto query = node_index(forum);
  if (!query) throw LookupError("unknown forum '" + std::string(forum) + "'");
  std::vector<Recommendation> out;
  const auto& nodes = map_->nodes;
  for (auto idx : members(nodes[*query].community)) {
    if (out.size() >= limit) break;
    if (idx == *query) continue;
    out.push_back({nodes[idx].id, nodes[idx].pagerank,
                   adjacent(*query, idx) ? Relation::Neighbor : Relation::SameCommunity});
  }
  return out;
}

std::vector<Recommendation> recommend(const InterestMap& map, std::string_view forum,
                                      std::size_t limit) {
  return MapIndex(map).recommend(forum, limit);
}

nlohmann::ordered_json to_json(const InterestMap& map) {
  nlohmann::ordered_json j;
  auto& meta = j["meta"];
  meta["alpha"] = map.meta.alpha;
  meta["q"] = map.meta.q;
  meta["communities"] = map.meta.communities;
  meta["built_at"] = map.meta.built_at;
  meta["source"] = map.meta.source;
  meta["layout_seed"] = map.meta.layout_seed;
  meta["community_seed"] = map.meta.community_seed;
  auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : map.nodes) {
    nlohmann::ordered_json node;
    node["id"] = n.id;
    node["label"] = n.label;
    node["community"] = n.community;
    node["pagerank"] = n.pagerank;
    node["x"] = n.x;
    node["y"] = n.y;
    node["degree"] = n.degree;
    nodes.push_back(std::move(node));
  }
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : map.edges) {
    nlohmann::ordered_json edge;
    edge["source"] = e.source;
    edge["target"] = e.target;
    edge["weight"] = e.weight;
    edges.push_back(std::move(edge));
  }
  return j;
}

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                              bool (nlohmann::json::*check)() const noexcept,
                              const char* where) {
  if (!obj.is_object() || !obj.contains(key) || !(obj.at(key).*check)()) {
    throw InputError(std::string("map JSON: ") + where + "." + key + " missing or mistyped");
  }
  return obj.at(key);
}

}  // namespace

InterestMap map_from_json(const nlohmann::json& j) {
  using json = nlohmann::json;
  InterestMap map;
  const auto& meta = require(j, "meta", &json::is_object, "$");
  map.meta.alpha = require(meta, "alpha", &json::is_number, "meta").get<double>();
  map.meta.q = require(meta, "q", &json::is_number, "meta").get<double>();
  map.meta.communities =
      require(meta, "communities", &json::is_number_unsigned, "meta").get<std::size_t>();
  map.meta.built_at = meta.value("built_at", "");
  map.meta.source = meta.value("source", "");
  map.meta.layout_seed = meta.value("layout_seed", std::uint64_t{0});
  map.meta.community_seed = meta.value("community_seed", std::uint64_t{0});

  for (const auto& n : require(j, "nodes", &json::is_array, "$")) {
    MapNode node;
    node.id = require(n, "id", &json::is_string, "nodes[]").get<std::string>();
    node.label = require(n, "label", &json::is_string, "nodes[]").get<std::string>();
    node.community =
        require(n, "community", &json::is_number_unsigned, "nodes[]").get<std::uint32_t>();
    node.pagerank = require(n, "pagerank", &json::is_number, "nodes[]").get<double>();
    node.x = require(n, "x", &json::is_number, "nodes[]").get<double>();
    node.y = require(n, "y", &json::is_number, "nodes[]").get<double>();
    node.degree = require(n, "degree", &json::is_number_unsigned, "nodes[]").get<std::size_t>();
    map.nodes.push_back(std::move(node));
  }
  if (!std::is_sorted(map.nodes.begin(), map.nodes.end(),
                      [](const MapNode& a, const MapNode& b) { return a.id < b.id; })) {
    std::sort(map.nodes.begin(), map.nodes.end(),
              [](const MapNode& a, const MapNode& b) { return a.id < b.id; });
  }
  for (std::size_t i = 1; i < map.nodes.size(); ++i) {
    if (map.nodes[i].id == map.nodes[i - 1].id) {
      throw InputError("map JSON: duplicate node id '" + map.nodes[i].id + "'");
    }
  }
  for (const auto& e : require(j, "edges", &json::is_array, "$")) {
    MapEdge edge;
    edge.source = require(e, "source", &json::is_string, "edges[]").get<std::string>();
    edge.target = require(e, "target", &json::is_string, "edges[]").get<std::string>();
    edge.weight = require(e, "weight", &json::is_number, "edges[]").get<double>();
    if (!map.find(edge.source) || !map.find(edge.target)) {
      throw InputError("map JSON: edge endpoint not among nodes");
    }
    map.edges.push_back(std::move(edge));
  }
  return map;
}

InterestMap import_map_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError("map JSON: not valid JSON");
  return map_from_json(j);
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string to_gexf(const InterestMap& map) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<gexf xmlns=\"http://www.gexf.net/1.2draft\""
      << " xmlns:viz=\"http://www.gexf.net/1.2draft/viz\""
      << " xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\""
      << " xsi:schemaLocation=\"http://www.gexf.net/1.2draft"
      << " http://www.gexf.net/1.2draft/gexf.xsd\" version=\"1.2\">\n"
      << "  <meta>\n"
      << "    <creator>interest-atlas</creator>\n"
      << "    <description>alpha=" << format_double(map.meta.alpha)
      << " q=" << format_double(map.meta.q) << " communities=" << map.meta.communities
      << "</description>\n"
      << "  </meta>\n"
      << "  <graph mode=\"static\" defaultedgetype=\"undirected\">\n"
      << "    <attributes class=\"node\" mode=\"static\">\n"
      << "      <attribute id=\"community\" title=\"community\" type=\"integer\"/>\n"
      << "      <attribute id=\"pagerank\" title=\"pagerank\" type=\"double\"/>\n"
      << "      <attribute id=\"x\" title=\"x\" type=\"double\"/>\n"
      << "      <attribute id=\"y\" title=\"y\" type=\"double\"/>\n"
      << "      <attribute id=\"degree\" title=\"degree\" type=\"integer\"/>\n"
      << "    </attributes>\n"
      << "    <nodes count=\"" << map.nodes.size() << "\">\n";
  for (const auto& n : map.nodes) {
    out << "      <node id=\"" << xml_escape(n.id) << "\" label=\"" << xml_escape(n.label)
        << "\">\n"
        << "        <attvalues>\n"
        << "          <attvalue for=\"community\" value=\"" << n.community << "\"/>\n"
        << "          <attvalue for=\"pagerank\" value=\"" << format_double(n.pagerank) << "\"/>\n"
        << "          <attvalue for=\"x\" value=\"" << format_double(n.x) << "\"/>\n"
        << "          <attvalue for=\"y\" value=\"" << format_double(n.y) << "\"/>\n"
        << "          <attvalue for=\"degree\" value=\"" << n.degree << "\"/>\n"
        << "        </attvalues>\n"
        << "        <viz:position x=\"" << format_double(n.x) << "\" y=\""
        << format_double(n.y) << "\" z=\"0.0\"/>\n"
        << "      </node>\n";
  }
  out << "    </nodes>\n"
      << "    <edges count=\"" << map.edges.size() << "\">\n";
  for (std::size_t i = 0; i < map.edges.size(); ++i) {
    const auto& e = map.edges[i];
    out << "      <edge id=\"" << i << "\" source=\"" << xml_escape(e.source)
        << "\" target=\"" << xml_escape(e.target) << "\" weight=\""
        << format_double(e.weight) << "\"/>\n";
  }
  out << "    </edges>\n"
      << "  </graph>\n"
      << "</gexf>\n";
  return out.str();
}

}  // namespace

std::string export_map(const InterestMap& map, MapFormat format) {
  if (format == MapFormat::Gexf) return to_gexf(map);
  return to_json(map).dump(2) + "\n";
}

}  // namespace atlas
