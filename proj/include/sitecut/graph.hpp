#pragma once

#include <algorithm>
#include <compare>
#include <cstdlib>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sitecut/errors.hpp"

namespace sitecut {

using Vertex = std::uint32_t;

/// Undirected edge stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  Edge() = default;
  Edge(Vertex a, Vertex b) : u(std::min(a, b)), v(std::max(a, b)) {}

  bool touches(Vertex w) const { return u == w || v == w; }
  Vertex other(Vertex w) const { return w == u ? v : u; }

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Display coordinates attached by the generators.
struct Label {
  int x = 0;
  int y = 0;
  friend bool operator==(const Label&, const Label&) = default;
};

/// Finite simple undirected graph with dense vertex indices 0..n-1.
class Graph {
public:
  Graph() = default;

  std::size_t vertex_count() const { return adjacency_.size(); }

  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_.at(v); }

  std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }

  bool has_edge(Vertex a, Vertex b) const {
    if (a >= vertex_count() || b >= vertex_count()) {
      return false;
    }
    const auto& nb = adjacency_[a];
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  /// All edges in increasing (u, v) order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (Vertex u = 0; u < vertex_count(); ++u) {
      for (Vertex v : adjacency_[u]) {
        if (u < v) {
          out.emplace_back(u, v);
        }
      }
    }
    return out;
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& nb : adjacency_) {
      twice += nb.size();
    }
    return twice / 2;
  }

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<Label>& labels() const { return labels_; }

  std::optional<Vertex> find_label(Label l) const {
    for (Vertex v = 0; v < labels_.size(); ++v) {
      if (labels_[v] == l) {
        return v;
      }
    }
    return std::nullopt;
  }

  void set_labels(std::vector<Label> labels) {
    require(labels.empty() || labels.size() == vertex_count(),
            "label count must match vertex count");
    labels_ = std::move(labels);
  }

  friend Graph build_graph(const std::vector<Edge>& edges, std::size_t n);

private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<Label> labels_;
};

/// Builds a graph from an edge list; rejects self-loops, duplicates and
/// out-of-range endpoints.
inline Graph build_graph(const std::vector<Edge>& edges, std::size_t n) {
  Graph g;
  g.adjacency_.assign(n, {});
  for (const Edge& e : edges) {
    require(e.u < n && e.v < n, "edge endpoint out of range");
    require(e.u != e.v, "self-loop rejected");
    g.adjacency_[e.u].push_back(e.v);
    g.adjacency_[e.v].push_back(e.u);
  }
  for (auto& nb : g.adjacency_) {
    std::sort(nb.begin(), nb.end());
    require(std::adjacent_find(nb.begin(), nb.end()) == nb.end(),
            "duplicate edge rejected");
  }
  return g;
}

/// Sorted set of vertex indices.
class VertexSet {
public:
  VertexSet() = default;
  VertexSet(std::vector<Vertex> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }
  VertexSet(std::initializer_list<Vertex> members)
      : VertexSet(std::vector<Vertex>(members)) {}

  bool contains(Vertex v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
  }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<Vertex>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  VertexSet with(Vertex v) const {
    auto m = members_;
    m.push_back(v);
    return VertexSet(std::move(m));
  }

  bool subset_of(const VertexSet& other) const {
    return std::includes(other.members_.begin(), other.members_.end(),
                         members_.begin(), members_.end());
  }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

private:
  std::vector<Vertex> members_;
};

/// {v in s : every neighbor of v is in s}.
inline VertexSet interior_of(const Graph& g, const VertexSet& s) {
  std::vector<Vertex> out;
  for (Vertex v : s) {
    require(v < g.vertex_count(), "set member out of range");
    const auto nb = g.neighbors(v);
    if (std::all_of(nb.begin(), nb.end(), [&](Vertex w) { return s.contains(w); })) {
      out.push_back(v);
    }
  }
  return VertexSet(std::move(out));
}

/// Finite truncation of an infinite graph. Ghost vertices stand for the
/// exterior; they carry no percolation state.
class Patch {
public:
  Patch(Graph graph, Vertex root, const std::vector<Vertex>& ghosts)
      : graph_(std::move(graph)), root_(root), ghost_(graph_.vertex_count(), false) {
    const auto n = graph_.vertex_count();
    require(root_ < n, "root out of range");
    for (Vertex g : ghosts) {
      require(g < n, "ghost out of range");
      ghost_[g] = true;
    }
    require(!ghost_[root_], "root must not be a ghost");
    require(!ghosts.empty(), "a patch needs at least one ghost vertex");
    require_ghosts_attached();
    require(reaches_frontier(root_), "root must be connected to the ghost frontier");
  }

  const Graph& graph() const { return graph_; }
  Vertex root() const { return root_; }
  std::size_t vertex_count() const { return graph_.vertex_count(); }
  bool is_ghost(Vertex v) const { return ghost_.at(v); }

  std::vector<Vertex> ghosts() const {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < ghost_.size(); ++v) {
      if (ghost_[v]) {
        out.push_back(v);
      }
    }
    return out;
  }

  /// Non-ghost vertices, ascending.
  std::vector<Vertex> real_vertices() const {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < ghost_.size(); ++v) {
      if (!ghost_[v]) {
        out.push_back(v);
      }
    }
    return out;
  }

  std::size_t real_count() const {
    return static_cast<std::size_t>(std::count(ghost_.begin(), ghost_.end(), false));
  }

  /// Non-ghost vertex adjacent to at least one ghost.
  bool is_frontier(Vertex v) const {
    if (ghost_.at(v)) {
      return false;
    }
    const auto nb = graph_.neighbors(v);
    return std::any_of(nb.begin(), nb.end(), [&](Vertex w) { return ghost_[w]; });
  }

  std::vector<Vertex> frontier() const {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < ghost_.size(); ++v) {
      if (is_frontier(v)) {
        out.push_back(v);
      }
    }
    return out;
  }

  /// Whether v can reach a ghost through non-ghost vertices, ignoring states.
  bool reaches_frontier(Vertex v) const {
    if (ghost_.at(v)) {
      return false;
    }
    std::vector<bool> seen(vertex_count(), false);
    std::vector<Vertex> stack{v};
    seen[v] = true;
    while (!stack.empty()) {
      const Vertex u = stack.back();
      stack.pop_back();
      for (Vertex w : graph_.neighbors(u)) {
        if (ghost_[w]) {
          return true;
        }
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    return false;
  }

  std::optional<Vertex> find_label(Label l) const { return graph_.find_label(l); }

private:
  // Each connected group of ghosts must touch a non-ghost vertex. A lattice
  // ring's corner ghosts only touch other ghosts, which is fine.
  void require_ghosts_attached() const {
    std::vector<bool> seen(vertex_count(), false);
    for (Vertex g = 0; g < ghost_.size(); ++g) {
      if (!ghost_[g] || seen[g]) {
        continue;
      }
      bool attached = false;
      std::vector<Vertex> stack{g};
      seen[g] = true;
      while (!stack.empty()) {
        const Vertex u = stack.back();
        stack.pop_back();
        for (Vertex w : graph_.neighbors(u)) {
          if (!ghost_[w]) {
            attached = true;
          } else if (!seen[w]) {
            seen[w] = true;
            stack.push_back(w);
          }
        }
      }
      require(attached, "every ghost component needs a non-ghost neighbor");
    }
  }

  Graph graph_;
  Vertex root_;
  std::vector<bool> ghost_;
};

namespace detail {

/// True iff some ghost is reachable from `from` using only non-ghost,
/// non-removed vertices and non-blocked edges.
inline bool escapes(const Patch& patch, Vertex from, const std::vector<bool>& removed,
                    const std::vector<Edge>& blocked) {
  if (removed[from]) {
    return false;
  }
  const Graph& g = patch.graph();
  std::vector<bool> seen(g.vertex_count(), false);
  std::vector<Vertex> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (Vertex w : g.neighbors(u)) {
      if (std::binary_search(blocked.begin(), blocked.end(), Edge(u, w))) {
        continue;
      }
      if (patch.is_ghost(w)) {
        return true;
      }
      if (!seen[w] && !removed[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return false;
}

inline std::vector<Edge> sorted_edges(std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

} // namespace detail

/// Set of non-ghost vertices meant to separate the root from the frontier.
/// The root itself may be a member.
struct VertexCutset {
  VertexSet members;
  friend bool operator==(const VertexCutset&, const VertexCutset&) = default;
};

/// Set of graph edges meant to separate the root from the frontier.
struct EdgeCutset {
  std::vector<Edge> members; // sorted, unique

  EdgeCutset() = default;
  EdgeCutset(std::vector<Edge> edges) : members(detail::sorted_edges(std::move(edges))) {}

  bool contains(const Edge& e) const {
    return std::binary_search(members.begin(), members.end(), e);
  }
  std::size_t size() const { return members.size(); }
  friend bool operator==(const EdgeCutset&, const EdgeCutset&) = default;
};

/// Whether deleting the cut's vertices disconnects x from every ghost;
/// x itself being a member counts as separation.
inline bool separates_vertex(const Patch& patch, Vertex x, const VertexCutset& cut) {
  require(x < patch.vertex_count() && !patch.is_ghost(x), "x must be a non-ghost vertex");
  std::vector<bool> removed(patch.vertex_count(), false);
  for (Vertex v : cut.members) {
    require(v < patch.vertex_count(), "cut member out of range");
    require(!patch.is_ghost(v), "vertex cut members must be non-ghost");
    removed[v] = true;
  }
  return !detail::escapes(patch, x, removed, {});
}

/// Whether deleting the cut's edges disconnects x from every ghost.
inline bool separates_edge(const Patch& patch, Vertex x, const EdgeCutset& cut) {
  require(x < patch.vertex_count() && !patch.is_ghost(x), "x must be a non-ghost vertex");
  for (const Edge& e : cut.members) {
    require(patch.graph().has_edge(e.u, e.v), "cut member is not an edge of the graph");
  }
  std::vector<bool> removed(patch.vertex_count(), false);
  return !detail::escapes(patch, x, removed, cut.members);
}

inline bool validate_vertex_cutset(const Patch& patch, const VertexCutset& cut) {
  return separates_vertex(patch, patch.root(), cut);
}

inline bool validate_edge_cutset(const Patch& patch, const EdgeCutset& cut) {
  return separates_edge(patch, patch.root(), cut);
}

// ---------------------------------------------------------------------------
// Generators

/// Path on -radius..radius, root at 0, ghosts at both ends.
inline Patch gen_line(int radius) {
  require(radius >= 1, "radius must be positive");
  const auto n = static_cast<std::size_t>(2 * radius + 1);
  std::vector<Edge> edges;
  std::vector<Label> labels;
  for (int i = 0; i < 2 * radius; ++i) {
    edges.emplace_back(i, i + 1);
  }
  for (int x = -radius; x <= radius; ++x) {
    labels.push_back({x, 0});
  }
  Graph g = build_graph(edges, n);
  g.set_labels(std::move(labels));
  return Patch(std::move(g), static_cast<Vertex>(radius),
               {0, static_cast<Vertex>(2 * radius)});
}

/// L-infinity ball of the square lattice; the outer ring is ghost.
inline Patch gen_grid2d(int radius) {
  require(radius >= 1, "radius must be positive");
  const int side = 2 * radius + 1;
  auto index = [&](int x, int y) {
    return static_cast<Vertex>((y + radius) * side + (x + radius));
  };
  std::vector<Edge> edges;
  std::vector<Label> labels;
  std::vector<Vertex> ghosts;
  for (int y = -radius; y <= radius; ++y) {
    for (int x = -radius; x <= radius; ++x) {
      labels.push_back({x, y});
      if (x < radius) {
        edges.emplace_back(index(x, y), index(x + 1, y));
      }
      if (y < radius) {
        edges.emplace_back(index(x, y), index(x, y + 1));
      }
      if (std::max(std::abs(x), std::abs(y)) == radius) {
        ghosts.push_back(index(x, y));
      }
    }
  }
  Graph g = build_graph(edges, static_cast<std::size_t>(side * side));
  g.set_labels(std::move(labels));
  return Patch(std::move(g), index(0, 0), ghosts);
}

/// Rooted tree in which every internal vertex has `branching` children;
/// the leaves at `depth` are ghosts. Vertices are numbered breadth first and
/// labelled (depth, position within level).
inline Patch gen_tree(int branching, int depth) {
  require(branching >= 2, "branching must be at least 2");
  require(depth >= 1, "depth must be positive");
  std::vector<Edge> edges;
  std::vector<Label> labels{{0, 0}};
  std::vector<Vertex> ghosts;
  std::vector<Vertex> level{0};
  Vertex next = 1;
  for (int d = 1; d <= depth; ++d) {
    std::vector<Vertex> children;
    for (Vertex parent : level) {
      for (int c = 0; c < branching; ++c) {
        edges.emplace_back(parent, next);
        labels.push_back({d, static_cast<int>(children.size())});
        children.push_back(next++);
      }
    }
    level = std::move(children);
  }
  ghosts = level;
  Graph g = build_graph(edges, next);
  g.set_labels(std::move(labels));
  return Patch(std::move(g), 0, ghosts);
}

// ---------------------------------------------------------------------------
// Text format:
//   n <count> root <idx>
//   g <idx>          one per ghost, ascending
//   e <u> <v>        one per edge, u < v, ascending

inline void write_patch(std::ostream& os, const Patch& patch) {
  os << "n " << patch.vertex_count() << " root " << patch.root() << '\n';
  for (Vertex g : patch.ghosts()) {
    os << "g " << g << '\n';
  }
  for (const Edge& e : patch.graph().edges()) {
    os << "e " << e.u << ' ' << e.v << '\n';
  }
}

inline std::string to_text(const Patch& patch) {
  std::ostringstream os;
  write_patch(os, patch);
  return os.str();
}

inline Patch read_patch(std::istream& is) {
  std::string line;
  std::optional<std::size_t> count;
  Vertex root = 0;
  std::vector<Vertex> ghosts;
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') {
      continue;
    }
    const std::string where = "patch line " + std::to_string(line_no) + ": ";
    if (tag == "n") {
      std::string root_tag;
      std::size_t c = 0;
      require(static_cast<bool>(ls >> c >> root_tag >> root) && root_tag == "root",
              where + "expected 'n <count> root <idx>'");
      count = c;
    } else if (tag == "g") {
      Vertex g = 0;
      require(static_cast<bool>(ls >> g), where + "expected 'g <idx>'");
      ghosts.push_back(g);
    } else if (tag == "e") {
      long long u = -1;
      long long v = -1;
      require(static_cast<bool>(ls >> u >> v) && u >= 0 && v >= 0,
              where + "expected 'e <u> <v>'");
      edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    } else {
      throw ContractError(where + "unknown record '" + tag + "'");
    }
  }
  require(count.has_value(), "patch header 'n <count> root <idx>' missing");
  return Patch(build_graph(edges, *count), root, ghosts);
}

inline Patch patch_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_patch(is);
}

} // namespace sitecut
