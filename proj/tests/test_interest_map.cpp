#include <doctest.h>

#include <cmath>
#include <numeric>

#include "atlas/community.hpp"
#include "atlas/error.hpp"
#include "atlas/interest_map.hpp"
#include "atlas/metrics.hpp"
#include "support/generators.hpp"

using namespace atlas;

namespace {

BackboneGraph as_backbone(WeightedGraph g) { return {std::move(g), 0.05, "test"}; }

InterestMap map_of(const WeightedGraph& g, std::uint64_t seed = 42) {
  const auto lcc = largest_component(g);
  const auto comm = louvain(lcc);
  const auto pr = pagerank(lcc);
  std::unordered_map<std::string, std::uint32_t> labels;
  std::unordered_map<std::string, double> ranks;
  for (NodeId i = 0; i < lcc.node_count(); ++i) {
    labels[lcc.label(i)] = comm.labels[i];
    ranks[lcc.label(i)] = pr[i];
  }
  MapBuildOptions opts;
  opts.layout.seed = seed;
  opts.built_at = "2020-01-01T00:00:00Z";
  return build_map(as_backbone(g), labels, ranks, opts);
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Hand-built map for recommendation cases.
InterestMap sports_map() {
  InterestMap m;
  m.meta.built_at = "x";
  auto node = [](std::string id, std::uint32_t c, double pr) {
    return MapNode{id, id, c, pr, 0.0, 0.0, 1};
  };
  m.nodes = {node("dolphins", 0, 0.2), node("heat", 0, 0.3), node("knitting", 1, 0.1),
             node("nba", 0, 0.4)};
  m.edges = {{"heat", "nba", 1.0}, {"dolphins", "nba", 1.0}};
  return m;
}

}  // namespace

TEST_CASE("triangle map") {
  const auto m = map_of(testsupport::from_pairs(3, {{0, 1}, {1, 2}, {0, 2}}));
  REQUIRE(m.nodes.size() == 3);
  CHECK(m.edges.size() == 3);
  CHECK(m.meta.communities == 1);
  for (const auto& n : m.nodes) {
    CHECK(n.pagerank == doctest::Approx(1.0 / 3).epsilon(1e-9));
    CHECK(n.community == 0);
    CHECK(std::abs(n.x) <= 1.0);
    CHECK(std::abs(n.y) <= 1.0);
  }
}

TEST_CASE("layout conventions") {
  CHECK(layout(testsupport::from_pairs(1, {})).at(0).x == 0.0);
  CHECK(layout(WeightedGraph{}).empty());
  const auto g = testsupport::barabasi_albert(60, 2, 3);
  const auto a = layout(g, {.seed = 4});
  const auto b = layout(g, {.seed = 4});
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(std::isfinite(a[i].x));
    CHECK(std::isfinite(a[i].y));
  }
}

TEST_CASE("two connected nodes settle near the spring length") {
  const auto pos = layout(testsupport::from_pairs(2, {{0, 1}}));
  const double d = dist(pos[0], pos[1]);
  CHECK(d >= 0.5);
  CHECK(d <= 2.0);
}

TEST_CASE("star hub sits inside the leaves' hull") {
  std::vector<std::pair<std::size_t, std::size_t>> spokes;
  for (std::size_t i = 1; i <= 8; ++i) spokes.emplace_back(0, i);
  const auto pos = layout(testsupport::from_pairs(9, spokes));
  // Inside the hull iff the hub is on the same side of every hull edge;
  // equivalently, no half-plane through the hub leaves all leaves on one side.
  // Sort leaves by angle around the hub and check no angular gap exceeds pi.
  std::vector<double> angles;
  for (std::size_t i = 1; i <= 8; ++i) angles.push_back(std::atan2(pos[i].y - pos[0].y, pos[i].x - pos[0].x));
  std::sort(angles.begin(), angles.end());
  double max_gap = angles.front() + 2 * M_PI - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  CHECK(max_gap < M_PI);
}

TEST_CASE("cliques lay out tighter than the bridge") {
  const auto g = testsupport::clique_pair();
  const auto pos = layout(g);
  double intra = 0, inter = 0;
  int n_intra = 0, n_inter = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = i + 1; j < 10; ++j) {
      if ((i < 5) == (j < 5)) {
        intra += dist(pos[i], pos[j]);
        ++n_intra;
      } else {
        inter += dist(pos[i], pos[j]);
        ++n_inter;
      }
    }
  }
  CHECK(intra / n_intra < inter / n_inter);
}

TEST_CASE("map covers the largest component only") {
  // Triangle plus a detached pair.
  const auto g = testsupport::from_pairs(5, {{0, 1}, {1, 2}, {0, 2}, {3, 4}});
  const auto m = map_of(g);
  CHECK(m.nodes.size() == 3);
  CHECK(m.find(testsupport::node_label(3)) == nullptr);
}

TEST_CASE("build_map rejects mismatched inputs") {
  const auto bb = as_backbone(testsupport::from_pairs(3, {{0, 1}, {1, 2}}));
  std::unordered_map<std::string, std::uint32_t> labels{{"v00000", 0}, {"v00001", 0}, {"zzz", 0}};
  std::unordered_map<std::string, double> ranks{{"v00000", 0.3}, {"v00001", 0.4}, {"v00002", 0.3}};
  try {
    build_map(bb, labels, ranks);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    const std::string what = e.what();
    CHECK(what.find("v00002") != std::string::npos);
    CHECK(what.find("zzz") != std::string::npos);
  }
  labels = {{"v00000", 0}, {"v00001", 0}, {"v00002", 0}};
  ranks["v00000"] = 0.9;
  CHECK_THROWS_AS(build_map(bb, labels, ranks), InputError);
}

TEST_CASE("recommendations") {
  const auto m = sports_map();
  SUBCASE("unlinked same-community forum is still offered") {
    const auto recs = recommend(m, "heat", 10);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0] == Recommendation{"nba", 0.4, Relation::Neighbor});
    CHECK(recs[1] == Recommendation{"dolphins", 0.2, Relation::SameCommunity});
    CHECK(to_string(recs[1].relation) == "same-community");
  }
  SUBCASE("limit") {
    CHECK(recommend(m, "heat", 0).empty());
    CHECK(recommend(m, "heat", 1).size() == 1);
    CHECK(recommend(m, "knitting", 5).empty());
  }
  SUBCASE("unknown forum") { CHECK_THROWS_AS(recommend(m, "curling", 5), LookupError); }
}

TEST_CASE("clique members are all neighbours") {
  InterestMap m;
  for (std::string id : {"A", "B", "C"}) m.nodes.push_back({id, id, 0, 1.0 / 3, 0, 0, 2});
  m.edges = {{"A", "B", 1}, {"A", "C", 1}, {"B", "C", 1}};
  const auto recs = recommend(m, "A", 2);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].forum == "B");
  CHECK(recs[1].forum == "C");
  for (const auto& r : recs) CHECK(r.relation == Relation::Neighbor);
}

TEST_CASE("json round trip is identity") {
  const auto m = map_of(testsupport::barabasi_albert(80, 2, 6));
  CHECK(import_map_json(export_map(m, MapFormat::Json)) == m);
  CHECK(export_map(m, MapFormat::Json) == export_map(m, MapFormat::Json));
}

TEST_CASE("json schema violations") {
  CHECK_THROWS_AS(import_map_json("[]"), InputError);
  CHECK_THROWS_AS(import_map_json("{"), InputError);
  auto j = to_json(sports_map());
  j["nodes"][0].erase("pagerank");
  CHECK_THROWS_AS(map_from_json(j), InputError);
  auto k = to_json(sports_map());
  k["edges"][0]["target"] = "ghost";
  CHECK_THROWS_AS(map_from_json(k), InputError);
}

TEST_CASE("gexf with no edges") {
  InterestMap m;
  m.nodes.push_back({"solo", "solo", 0, 1.0, 0, 0, 0});
  const auto xml = export_map(m, MapFormat::Gexf);
  CHECK(xml.find("<gexf") != std::string::npos);
  CHECK(xml.find("<edge ") == std::string::npos);
  CHECK(xml.find("<node id=\"solo\"") != std::string::npos);
}

TEST_CASE("gexf escapes markup in labels") {
  InterestMap m;
  m.nodes.push_back({"a&b", "<a&b>", 0, 1.0, 0, 0, 0});
  const auto xml = export_map(m, MapFormat::Gexf);
  CHECK(xml.find("a&amp;b") != std::string::npos);
  CHECK(xml.find("&lt;a&amp;b&gt;") != std::string::npos);
}
