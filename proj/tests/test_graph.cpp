#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "spinchain/errors.hpp"
#include "spinchain/graph.hpp"

using namespace spinchain;

namespace {

Graph parse_edges(const std::string& text) {
  std::istringstream in(text);
  return load_graph(in, GraphFormat::edge_list);
}

}  // namespace

TEST(Graph, EdgeListPath) {
  const Graph g = parse_edges("0 1\n1 2");
  ASSERT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.degree(0), 1u);
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_EQ(g.degree(2), 1u);
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_FALSE(g.has_edge(0, 2));
}

TEST(Graph, EdgeListCommentsAndDuplicates) {
  const Graph g = parse_edges("# triangle\n0 1\n1 0\n  1   2\n2 0 # closing edge\n");
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 3u);
  EXPECT_EQ(g.max_degree(), 2u);
}

TEST(Graph, SelfLoopRejected) { EXPECT_THROW(parse_edges("0 1\n3 3"), GraphError); }

TEST(Graph, MalformedLineRejected) { EXPECT_THROW(parse_edges("0 x\n"), Error); }

TEST(Graph, BinaryRoundTrip) {
  Rng rng(3);
  const Graph g = generate_random_regular(20, 3, rng);
  std::stringstream buf;
  save_graph(buf, g, GraphFormat::binary);
  const Graph h = load_graph(buf, GraphFormat::binary);
  EXPECT_EQ(g, h);
}

TEST(Graph, EdgeListRoundTrip) {
  const Graph g = complete_bipartite(3, 5);
  std::stringstream buf;
  save_graph(buf, g, GraphFormat::edge_list);
  EXPECT_EQ(load_graph(buf, GraphFormat::edge_list), g);
}

TEST(Graph, FormatFromExtension) {
  EXPECT_EQ(format_from_path("g.bin"), GraphFormat::binary);
  EXPECT_EQ(format_from_path("g.adj"), GraphFormat::binary);
  EXPECT_EQ(format_from_path("g.el"), GraphFormat::edge_list);
}

TEST(Graph, RandomNeighborUniformOnStar) {
  const Graph g = star_graph(5);
  Rng rng(11);
  const int draws = 100000;
  std::vector<int> hits(6, 0);
  for (int t = 0; t < draws; ++t) ++hits[random_neighbor(g, 0, rng)];
  EXPECT_EQ(hits[0], 0);
  const double p = 0.2, sigma = std::sqrt(p * (1 - p) / draws);
  for (int leaf = 1; leaf <= 5; ++leaf) EXPECT_NEAR(hits[leaf] / double(draws), p, 4 * sigma) << leaf;
}

TEST(Graph, RandomNeighborForcedAtDegreeOne) {
  const Graph g = path_graph(3);
  Rng rng(1);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(random_neighbor(g, 0, rng), 1u);
}

TEST(Graph, RandomNeighborIsolatedVertex) {
  const Graph g = Graph::from_edges(2, std::vector<Edge>{});
  Rng rng(1);
  EXPECT_THROW(random_neighbor(g, 0, rng), GraphError);
}

TEST(Graph, RandomRegularSmall) {
  Rng rng(5);
  const Graph k4 = generate_random_regular(4, 3, rng);
  EXPECT_EQ(k4, complete_graph(4));

  const Graph g = generate_random_regular(8, 3, rng);
  for (Vertex v = 0; v < 8; ++v) EXPECT_EQ(g.degree(v), 3u);
  EXPECT_EQ(g.num_edges(), 12u);

  EXPECT_THROW(generate_random_regular(3, 3, rng), Error);
  EXPECT_THROW(generate_random_regular(5, 3, rng), Error);
}

TEST(Graph, RandomRegularDeterministic) {
  Rng a(9), b(9);
  EXPECT_EQ(generate_random_regular(30, 4, a), generate_random_regular(30, 4, b));
}

TEST(Graph, Constructors) {
  EXPECT_EQ(cycle_graph(5).num_edges(), 5u);
  EXPECT_EQ(complete_graph(5).num_edges(), 10u);
  EXPECT_EQ(star_graph(7).max_degree(), 7u);
  EXPECT_EQ(complete_bipartite(3, 5).num_edges(), 15u);
  const std::vector<Vertex> keep{0, 1, 2};
  EXPECT_EQ(induced_subgraph(cycle_graph(6), keep).num_edges(), 2u);
}
