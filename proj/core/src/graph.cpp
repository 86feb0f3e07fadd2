#include "spinchain/graph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "spinchain/errors.hpp"

namespace spinchain {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  if (n > std::numeric_limits<Vertex>::max()) throw GraphError("vertex count exceeds 32-bit ids");
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) {
      throw GraphError("vertex id out of range: edge (" + std::to_string(u) + ", " +
                       std::to_string(v) + ") with n = " + std::to_string(n));
    }
    if (u == v) throw GraphError("self-loop at vertex " + std::to_string(u));
    canon.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  Graph g;
  g.offsets_.assign(n + 1, 0);
  for (auto [u, v] : canon) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.adjacency_.resize(2 * canon.size());
  std::vector<std::uint64_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (auto [u, v] : canon) {
    g.adjacency_[fill[u]++] = v;
    g.adjacency_[fill[v]++] = u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
    g.max_degree_ = std::max<std::size_t>(g.max_degree_, g.offsets_[v + 1] - g.offsets_[v]);
  }
  return g;
}

Graph Graph::from_adjacency(std::vector<std::vector<Vertex>> lists) {
  const std::size_t n = lists.size();
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < n; ++v) {
    auto& nb = lists[v];
    std::sort(nb.begin(), nb.end());
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const Vertex u = nb[i];
      if (u >= n) throw GraphError("vertex id out of range: " + std::to_string(u));
      if (u == v) throw GraphError("self-loop at vertex " + std::to_string(v));
      if (i > 0 && nb[i - 1] == u) {
        throw GraphError("duplicate neighbor " + std::to_string(u) + " of vertex " + std::to_string(v));
      }
      edges.emplace_back(static_cast<Vertex>(v), u);
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    for (Vertex u : lists[v]) {
      if (!std::binary_search(lists[u].begin(), lists[u].end(), static_cast<Vertex>(v))) {
        throw GraphError("asymmetric adjacency: " + std::to_string(u) + " in list of " +
                         std::to_string(v) + " but not conversely");
      }
    }
  }
  return from_edges(n, edges);
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (Vertex v = 0; v < num_vertices(); ++v) {
    for (Vertex u : neighbors(v)) {
      if (v < u) out.emplace_back(v, u);
    }
  }
  return out;
}

GraphFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".bin" || ext == ".adj") return GraphFormat::binary;
  return GraphFormat::edge_list;
}

namespace {

Graph load_edge_list(std::istream& in, std::optional<std::size_t> n) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t max_id = 0;
  bool any = false;
  std::optional<std::size_t> n_hint;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      // "# n=<count>" records trailing isolated vertices written by save_graph.
      std::istringstream comment(line.substr(hash + 1));
      std::string tok;
      if (!n_hint && comment >> tok && tok.rfind("n=", 0) == 0) {
        try {
          n_hint = std::stoull(tok.substr(2));
        } catch (const std::exception&) {
        }
      }
      line.resize(hash);
    }
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    auto parse_id = [&](const std::string& tok) -> std::uint64_t {
      std::uint64_t value = 0;
      if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw ParseError("line " + std::to_string(line_no) + ": expected a vertex id, got '" + tok + "'");
      }
      try {
        value = std::stoull(tok);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": vertex id too large: " + tok);
      }
      if (value > std::numeric_limits<Vertex>::max() - 1) {
        throw GraphError("line " + std::to_string(line_no) + ": vertex id out of range: " + tok);
      }
      return value;
    };
    if (!(fields >> b)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected two vertex ids");
    }
    if (fields >> extra) {
      throw ParseError("line " + std::to_string(line_no) + ": trailing token '" + extra + "'");
    }
    const auto u = parse_id(a);
    const auto v = parse_id(b);
    if (u == v) throw GraphError("line " + std::to_string(line_no) + ": self-loop at vertex " + a);
    if (n && (u >= *n || v >= *n)) {
      throw GraphError("line " + std::to_string(line_no) + ": vertex id out of range for n = " +
                       std::to_string(*n));
    }
    max_id = std::max({max_id, u, v});
    any = true;
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  std::size_t count = any ? static_cast<std::size_t>(max_id) + 1 : 0;
  if (n) {
    count = *n;
  } else if (n_hint && *n_hint >= count) {
    count = *n_hint;
  }
  return Graph::from_edges(count, edges);
}

template <class T>
T read_le(std::istream& in, std::uint64_t& offset) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw ParseError("binary graph truncated at byte offset " + std::to_string(offset));
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(buf[i]) << (8 * i);
  offset += sizeof(T);
  return value;
}

template <class T>
void write_le(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

Graph load_binary(std::istream& in) {
  std::uint64_t offset = 0;
  const auto n = read_le<std::uint64_t>(in, offset);
  if (n > std::numeric_limits<Vertex>::max()) {
    throw ParseError("binary graph: vertex count " + std::to_string(n) + " exceeds 32-bit ids");
  }
  std::vector<std::vector<Vertex>> lists(n);
  for (std::uint64_t v = 0; v < n; ++v) {
    const std::uint64_t at = offset;
    const auto len = read_le<std::uint64_t>(in, offset);
    if (len >= n) {
      throw ParseError("binary graph: degree " + std::to_string(len) + " of vertex " + std::to_string(v) +
                       " at byte offset " + std::to_string(at) + " exceeds n - 1");
    }
    lists[v].resize(len);
    for (auto& u : lists[v]) {
      const std::uint64_t id_at = offset;
      u = read_le<Vertex>(in, offset);
      if (u >= n) {
        throw GraphError("binary graph: vertex id " + std::to_string(u) + " out of range at byte offset " +
                         std::to_string(id_at));
      }
    }
  }
  return Graph::from_adjacency(std::move(lists));
}

}  // namespace

Graph load_graph(std::istream& in, GraphFormat format, std::optional<std::size_t> n) {
  if (format == GraphFormat::binary) {
    Graph g = load_binary(in);
    if (n && g.num_vertices() != *n) {
      throw GraphError("binary graph has " + std::to_string(g.num_vertices()) + " vertices, expected " +
                       std::to_string(*n));
    }
    return g;
  }
  return load_edge_list(in, n);
}

Graph load_graph_file(const std::filesystem::path& path, std::optional<GraphFormat> format) {
  const auto fmt = format.value_or(format_from_path(path));
  std::ifstream in(path, fmt == GraphFormat::binary ? std::ios::binary : std::ios::in);
  if (!in) throw ParseError("cannot open graph file " + path.string());
  return load_graph(in, fmt);
}

void save_graph(std::ostream& out, const Graph& g, GraphFormat format) {
  if (format == GraphFormat::binary) {
    write_le<std::uint64_t>(out, g.num_vertices());
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      write_le<std::uint64_t>(out, g.degree(v));
      for (Vertex u : g.neighbors(v)) write_le<Vertex>(out, u);
    }
    return;
  }
  out << "# n=" << g.num_vertices() << " m=" << g.num_edges() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void save_graph_file(const std::filesystem::path& path, const Graph& g, std::optional<GraphFormat> format) {
  const auto fmt = format.value_or(format_from_path(path));
  std::ofstream out(path, fmt == GraphFormat::binary ? std::ios::binary : std::ios::out);
  if (!out) throw ParseError("cannot write graph file " + path.string());
  save_graph(out, g, fmt);
}

Vertex random_neighbor(const Graph& g, Vertex v, Rng& rng) {
  if (v >= g.num_vertices()) throw GraphError("vertex id out of range: " + std::to_string(v));
  if (g.degree(v) == 0) throw GraphError("random_neighbor on isolated vertex " + std::to_string(v));
  return random_neighbor_unchecked(g, v, rng);
}

Graph generate_random_regular(std::size_t n, std::size_t d, Rng& rng, std::size_t max_attempts) {
  if ((n * d) % 2 != 0) throw GraphError("random regular graph infeasible: n*d is odd");
  if (d >= n && n > 0) throw GraphError("random regular graph infeasible: need d < n");
  std::vector<Vertex> stubs(n * d);
  std::vector<Edge> edges;
  edges.reserve(n * d / 2);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    for (std::size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<Vertex>(i / d);
    // Fisher-Yates with the portable bounded draw.
    for (std::size_t i = stubs.size(); i > 1; --i) {
      std::swap(stubs[i - 1], stubs[uniform_below(rng, i)]);
    }
    edges.clear();
    bool simple = true;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      Vertex u = stubs[i], v = stubs[i + 1];
      if (u == v) {
        simple = false;
        break;
      }
      edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    if (!simple) continue;
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;
    return Graph::from_edges(n, edges);
  }
  throw GraphError("random regular graph: retry limit exceeded after " + std::to_string(max_attempts) +
                   " pairings");
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}

Graph cycle_graph(std::size_t n) {
  if (n < 3) throw GraphError("cycle needs at least 3 vertices");
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, e);
}

Graph complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

Graph star_graph(std::size_t leaves) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph::from_edges(leaves + 1, e);
}

Graph complete_bipartite(std::size_t a, std::size_t b) {
  std::vector<Edge> e;
  e.reserve(a * b);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) e.emplace_back(i, a + j);
  return Graph::from_edges(a + b, e);
}

Graph induced_subgraph(const Graph& g, std::span<const Vertex> keep) {
  std::vector<std::int64_t> relabel(g.num_vertices(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= g.num_vertices()) throw GraphError("induced_subgraph: vertex out of range");
    relabel[keep[i]] = static_cast<std::int64_t>(i);
  }
  std::vector<Edge> e;
  for (auto [u, v] : g.edges()) {
    if (relabel[u] >= 0 && relabel[v] >= 0) e.emplace_back(relabel[u], relabel[v]);
  }
  return Graph::from_edges(keep.size(), e);
}

}  // namespace spinchain
