#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spinchain/rng.hpp"

namespace spinchain {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

// Immutable undirected simple graph in compressed adjacency form. Neighbor lists
// are sorted and contiguous, so degree and random-neighbor queries are O(1).
class Graph {
 public:
  Graph() = default;

  // Deduplicates edges (in either orientation); rejects self-loops and ids >= n.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  // Builds from per-vertex lists; the lists must already be symmetric.
  static Graph from_adjacency(std::vector<std::vector<Vertex>> lists);

  std::size_t num_vertices() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return adjacency_.size() / 2; }
  std::size_t max_degree() const { return max_degree_; }

  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  bool has_edge(Vertex u, Vertex v) const;
  std::vector<Edge> edges() const;

  bool operator==(const Graph& other) const = default;

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<Vertex> adjacency_;
  std::size_t max_degree_ = 0;
};

enum class GraphFormat { edge_list, binary };

// ".bin" and ".adj" select the binary format; anything else is an edge list.
GraphFormat format_from_path(const std::filesystem::path& path);

// Edge lists have one "u v" pair per line, '#' comments and arbitrary whitespace.
// Without `n`, the vertex count is one more than the largest id seen.
Graph load_graph(std::istream& in, GraphFormat format, std::optional<std::size_t> n = {});
Graph load_graph_file(const std::filesystem::path& path, std::optional<GraphFormat> format = {});

void save_graph(std::ostream& out, const Graph& g, GraphFormat format);
void save_graph_file(const std::filesystem::path& path, const Graph& g,
                     std::optional<GraphFormat> format = {});

inline Vertex random_neighbor_unchecked(const Graph& g, Vertex v, Rng& rng) {
  const auto nb = g.neighbors(v);
  return nb[uniform_below(rng, nb.size())];
}

Vertex random_neighbor(const Graph& g, Vertex v, Rng& rng);

// Configuration model; a pairing with a loop or repeated edge is discarded whole.
Graph generate_random_regular(std::size_t n, std::size_t d, Rng& rng,
                              std::size_t max_attempts = 100000);

Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph complete_graph(std::size_t n);
Graph star_graph(std::size_t leaves);
Graph complete_bipartite(std::size_t a, std::size_t b);

// Subgraph induced on `keep`, relabelled 0..keep.size()-1 in the given order.
Graph induced_subgraph(const Graph& g, std::span<const Vertex> keep);

}  // namespace spinchain
