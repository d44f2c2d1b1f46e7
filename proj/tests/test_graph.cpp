#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "exsamp/graph.hpp"
#include "exsamp/rng.hpp"
#include "helpers.hpp"

using namespace exsamp;
using namespace exsamp::testing;

TEST_SUITE("graph") {
  TEST_CASE("from_edges builds K2") {
    Graph g = k2();
    CHECK(g.vertex_count() == 2);
    CHECK(g.edge_count() == 1);
    CHECK(g.neighbors(0).size() == 1);
    CHECK(g.neighbors(0)[0] == 1);
    CHECK(g.neighbors(1)[0] == 0);
  }

  TEST_CASE("from_edges builds P3") {
    Graph g = p3();
    CHECK(g.degree(0) == 1);
    CHECK(g.degree(1) == 2);
    CHECK(g.degree(2) == 1);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 2));
    CHECK(!g.has_edge(0, 2));
  }

  TEST_CASE("duplicate edges collapse, isolated vertices persist") {
    Graph g = Graph::from_edges(3, {{0, 1}, {1, 0}});
    CHECK(g.edge_count() == 1);
    CHECK(g.degree(2) == 0);
  }

  TEST_CASE("self-loops and out-of-range endpoints are rejected") {
    CHECK_THROWS(Graph::from_edges(2, {{0, 0}}));
    CHECK_THROWS(Graph::from_edges(2, {{0, 2}}));
    CHECK_THROWS(Graph::from_edges(2, {{-1, 0}}));
  }

  TEST_CASE("k-hop balls on C5") {
    Graph g = c5();
    CHECK(g.k_hop_ball(0, 1) == std::vector<int>{0, 1, 4});
    CHECK(g.k_hop_ball(0, 0) == std::vector<int>{0});
    CHECK(g.k_hop_ball(0, 3) == std::vector<int>{0, 1, 2, 3, 4});
  }

  TEST_CASE("balls are nested in the radius") {
    Graph g = generate_graph("erdos_renyi", {{"n", "20"}, {"prob", "0.2"}}, 3);
    for (int v = 0; v < g.vertex_count(); ++v)
      for (int k = 0; k < 4; ++k) {
        auto a = g.k_hop_ball(v, k), b = g.k_hop_ball(v, k + 1);
        CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
      }
  }

  TEST_CASE("delta_k on cycles") {
    CHECK(c5().delta_k(1) == 2);
    CHECK(c6().delta_k(2) == 4);
  }

  TEST_CASE("delta_2 bounded by degree polynomial") {
    for (std::uint64_t seed : {1, 2, 3}) {
      Graph g = generate_graph("erdos_renyi", {{"n", "30"}, {"prob", "0.15"}}, seed);
      int d = g.max_degree();
      CHECK(g.delta_k(2) <= d + d * (d - 1));
    }
  }

  TEST_CASE("generators") {
    Graph c = generate_graph("cycle", {{"n", "5"}}, 99);
    CHECK(c.vertex_count() == 5);
    CHECK(c.edge_count() == 5);
    for (int v = 0; v < 5; ++v) CHECK(c.degree(v) == 2);

    Graph p1 = generate_graph("path", {{"n", "1"}}, 0);
    CHECK(p1.vertex_count() == 1);
    CHECK(p1.edge_count() == 0);

    Graph grid = generate_graph("grid", {{"rows", "2"}, {"cols", "3"}}, 0);
    CHECK(grid.vertex_count() == 6);
    CHECK(grid.edge_count() == 7);
  }

  TEST_CASE("random regular is deterministic and regular") {
    Graph a = generate_graph("random_regular", {{"n", "8"}, {"d", "3"}}, 7);
    Graph b = generate_graph("random_regular", {{"n", "8"}, {"d", "3"}}, 7);
    for (int v = 0; v < 8; ++v) {
      CHECK(a.degree(v) == 3);
      auto na = a.neighbors(v), nb = b.neighbors(v);
      CHECK(std::equal(na.begin(), na.end(), nb.begin(), nb.end()));
    }
  }

  TEST_CASE("distance and set diameter") {
    Graph g = c6();
    CHECK(g.distance(0, 3) == 3);
    CHECK(g.distance(0, 0) == 0);
    std::vector<int> vs{0, 1, 2};
    CHECK(g.set_diameter(vs) == 2);
    Graph two = Graph::from_edges(4, {{0, 1}, {2, 3}});
    CHECK(two.distance(0, 2) == -1);
  }

  TEST_CASE("spec parsing and file round trip") {
    Graph g = parse_graph_spec("cycle:n=7", 1);
    CHECK(g.vertex_count() == 7);
    CHECK_THROWS(parse_graph_spec("klein_bottle:n=3", 1));

    std::stringstream ss;
    write_graph_file(g, ss);
    Graph h = read_graph_file(ss);
    CHECK(h.vertex_count() == 7);
    CHECK(h.edge_count() == 7);
    for (int v = 0; v < 7; ++v) {
      auto a = g.neighbors(v), b = h.neighbors(v);
      CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    }
  }
}
