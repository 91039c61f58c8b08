#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "fairmap/errors.hpp"
#include "fairmap/nerve.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fairmap;

namespace {

using Indexed = std::vector<std::vector<std::vector<std::size_t>>>;

std::vector<std::string> ids_for(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(testing::point_id(i));
  return ids;
}

// One cluster per interval, wired as a graph on `v` vertices from explicit edges
// by giving each edge a private shared point.
SimplicialComplex graph(std::size_t v, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  Indexed clusters(v, std::vector<std::vector<std::size_t>>(1));
  std::size_t point = 0;
  for (std::size_t i = 0; i < v; ++i) clusters[i][0].push_back(point++);
  for (auto [a, b] : edges) {
    clusters[a][0].push_back(point);
    clusters[b][0].push_back(point++);
  }
  auto ids = ids_for(point);
  return build_nerve_indexed(clusters, ids, 1);
}

std::vector<std::set<std::size_t>> node_sets(const SimplicialComplex& c) {
  std::vector<std::set<std::size_t>> out;
  for (const auto& node : c.nodes) {
    std::set<std::size_t> s;
    for (const auto& id : node.members) s.insert(std::stoul(id.substr(1)));
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("nerve examples") {
  std::vector<std::vector<Cluster>> one{{Cluster{{"a", "b"}}}};
  auto c1 = build_nerve(one, 1);
  CHECK(c1.nodes.size() == 1);
  CHECK(c1.edge_count() == 0);

  std::vector<std::vector<Cluster>> two{{Cluster{{"1", "2"}}}, {Cluster{{"2", "3"}}}};
  auto c2 = build_nerve(two, 1);
  REQUIRE(c2.nodes.size() == 2);
  REQUIRE(c2.edge_count() == 1);
  CHECK(c2.edges()[0] == Simplex{{0, 1}, 1});
  CHECK(c2.nodes[1].interval_index == 1);
  CHECK(c2.nodes[1].cluster_index == 0);

  CHECK_THROWS_AS(build_nerve(two, 0), InvalidArgumentError);
  CHECK_THROWS_AS(build_nerve(two, 4), InvalidArgumentError);
}

TEST_CASE("node ids follow interval then cluster order") {
  std::vector<std::vector<Cluster>> per{{Cluster{{"a"}}, Cluster{{"b"}}}, {}, {Cluster{{"a", "c"}}}};
  auto c = build_nerve(per, 2);
  REQUIRE(c.nodes.size() == 3);
  CHECK(c.nodes[0].members == std::vector<std::string>{"a"});
  CHECK(c.nodes[2].interval_index == 2);
  CHECK(c.nodes[2].node_id == 2);
  CHECK(c.edge_count() == 1);
  CHECK(c.simplices.size() == 2);
  CHECK(c.simplices[1].empty());
}

TEST_CASE("a point shared by four nodes spans a 3-simplex") {
  Indexed clusters{{{0, 1}}, {{0, 2}}, {{0, 3}}, {{0, 4}}};
  auto ids = ids_for(5);
  auto c = build_nerve_indexed(clusters, ids, 3);
  CHECK(c.simplices[0].size() == 6);
  CHECK(c.simplices[1].size() == 4);
  REQUIRE(c.simplices[2].size() == 1);
  CHECK(c.simplices[2][0] == Simplex{{0, 1, 2, 3}, 1});
  auto limited = build_nerve_indexed(clusters, ids, 2);
  CHECK(limited.simplices.size() == 2);
}

TEST_CASE("nerve equals brute-force subset enumeration") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t points = 1 + trial % 50, max_dim = 1 + trial % 3;
    auto clusters = oracle::random_clusters(rng, points, 12);
    auto ids = ids_for(points);
    auto c = build_nerve_indexed(clusters, ids, max_dim, 1 + trial % 4);
    CHECK(oracle::flatten(c) == oracle::nerve(node_sets(c), max_dim));

    // Closure: every face of a recorded simplex is recorded.
    auto flat = oracle::flatten(c);
    for (const auto& [verts, w] : flat) {
      if (verts.size() < 3) continue;
      for (std::size_t drop = 0; drop < verts.size(); ++drop) {
        auto face = verts;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
        CHECK(flat.count(face) == 1);
        CHECK(flat[face] >= w);
      }
    }
    // Sorted storage and Euler consistency.
    for (const auto& dim : c.simplices) CHECK(std::is_sorted(dim.begin(), dim.end(), [](auto& a, auto& b) {
      return a.vertices < b.vertices;
    }));
    auto b = betti_numbers_1skeleton(c);
    CHECK(static_cast<long>(c.nodes.size()) - static_cast<long>(c.edge_count()) ==
          static_cast<long>(b.betti0) - static_cast<long>(b.betti1));
  }
}

TEST_CASE("named and indexed construction agree") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    auto clusters = oracle::random_clusters(rng, 30, 10);
    auto ids = ids_for(30);
    std::vector<std::vector<Cluster>> named;
    for (const auto& interval : clusters) {
      named.emplace_back();
      for (const auto& cl : interval) {
        Cluster c;
        for (auto i : cl) c.members.push_back(ids[i]);
        named.back().push_back(c);
      }
    }
    auto a = build_nerve(named, 3), b = build_nerve_indexed(clusters, ids, 3, 3);
    CHECK(oracle::flatten(a) == oracle::flatten(b));
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) CHECK(a.nodes[i].members == b.nodes[i].members);
  }
}

TEST_CASE("components and betti numbers") {
  auto cycle = graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  CHECK(connected_components(cycle).size() == 1);
  CHECK(betti_numbers_1skeleton(cycle) == BettiNumbers{1, 1});

  auto split = graph(4, {{0, 1}, {2, 3}});
  CHECK(connected_components(split) == std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}});

  auto isolated = graph(3, {});
  CHECK(connected_components(isolated).size() == 3);
  CHECK(betti_numbers_1skeleton(isolated) == BettiNumbers{3, 0});

  auto tree = graph(6, {{0, 1}, {0, 2}, {2, 3}, {2, 4}, {4, 5}});
  CHECK(betti_numbers_1skeleton(tree) == BettiNumbers{1, 0});

  CHECK(betti_numbers_1skeleton(SimplicialComplex{}) == BettiNumbers{0, 0});
}

TEST_CASE("mean lens per node") {
  std::vector<std::vector<Cluster>> per{{Cluster{{"a", "b"}}}, {Cluster{{"b", "c"}}}};
  auto c = build_nerve(per, 1);
  attach_mean_lens(c, LensValues({"a", "b", "c"}, {-1.0, 0.0, 0.5}));
  CHECK(c.nodes[0].mean_lens == -0.5);
  CHECK(c.nodes[1].mean_lens == 0.25);
}

TEST_CASE("separation report") {
  SUBCASE("two pure components") {
    std::vector<std::vector<Cluster>> per{{Cluster{{"a1", "a2"}}, Cluster{{"b1", "b2"}}}};
    auto r = separation_report(build_nerve(per, 1), {{"a1", 1}, {"a2", 1}, {"b1", -1}, {"b2", -1}});
    CHECK(r.component_count == 2);
    CHECK(r.per_component_purity == std::vector<std::optional<double>>{1.0, 1.0});
    CHECK(r.cross_edges == 0);
    CHECK(r.shared_nodes.empty());
    CHECK(r.labeled_memberships == 4);
  }
  SUBCASE("edge between opposite pure nodes") {
    std::vector<std::vector<Cluster>> per{{Cluster{{"p", "s"}}}, {Cluster{{"n", "s"}}}};
    auto r = separation_report(build_nerve(per, 1), {{"p", 1}, {"n", -1}});
    CHECK(r.cross_edges == 1);
    CHECK(r.component_count == 1);
    CHECK(r.per_component_purity[0] == 0.5);
    CHECK(r.betti0 == 1);
    CHECK(r.betti1 == 0);
  }
  SUBCASE("mixed node and ties") {
    std::vector<std::vector<Cluster>> per{{Cluster{{"p1", "n1"}}}, {Cluster{{"p1", "p2", "n1"}}}};
    auto r = separation_report(build_nerve(per, 1), {{"p1", 1}, {"p2", 1}, {"n1", -1}});
    CHECK(r.node_labels[0].majority() == 0);
    CHECK(r.node_labels[1].majority() == 1);
    CHECK(r.shared_nodes == std::vector<std::size_t>{0, 1});
    CHECK(r.cross_edges == 0);
    // Memberships count once per node: p1 twice, p2 once, n1 twice.
    CHECK(r.per_component_purity[0] == doctest::Approx(3.0 / 5.0));
  }
  SUBCASE("unlabeled") {
    std::vector<std::vector<Cluster>> per{{Cluster{{"x"}}}};
    auto r = separation_report(build_nerve(per, 1), {});
    CHECK(r.labeled_memberships == 0);
    CHECK_FALSE(r.per_component_purity[0].has_value());
    CHECK(r.node_labels[0].unlabeled == 1);
  }
}
