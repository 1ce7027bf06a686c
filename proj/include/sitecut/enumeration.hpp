#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "sitecut/errors.hpp"
#include "sitecut/graph.hpp"

namespace sitecut {

/// Knobs for exact enumeration.
struct EngineOptions {
  std::size_t cap = 24;  // max number of enumerated vertex states
  unsigned threads = 1;  // >1 partitions the configuration space
};

/// An increasing connection event: `start` is open and joined to some
/// vertex of a target group by a path whose vertices all lie in `support`
/// and are all open, avoiding `blocked` edges; every vertex in `required`
/// is open as well. Each target group yields its own indicator.
struct ConnectionQuery {
  std::vector<Vertex> support;
  Vertex start = 0;
  std::vector<std::vector<Vertex>> target_groups;
  std::vector<Vertex> required;
  std::vector<Edge> blocked;
};

/// The query restricted to the vertices whose states can matter, in local
/// indices (ascending global order). Targets outside the start component
/// are dropped; required vertices outside it become isolated bits.
struct LocalFrame {
  bool feasible = false; // start lies in support
  std::vector<Vertex> vertices;
  std::vector<std::vector<std::uint32_t>> adjacency;
  std::uint32_t start = 0;
  std::vector<std::uint32_t> required;
  std::vector<std::vector<std::uint32_t>> target_groups;

  std::size_t size() const { return vertices.size(); }
};

inline LocalFrame build_frame(const Graph& g, const ConnectionQuery& q) {
  LocalFrame frame;
  frame.target_groups.resize(q.target_groups.size());
  const auto n = g.vertex_count();
  std::vector<bool> in_support(n, false);
  for (Vertex v : q.support) {
    require(v < n, "support vertex out of range");
    in_support[v] = true;
  }
  require(q.start < n, "start vertex out of range");
  if (!in_support[q.start]) {
    return frame;
  }
  frame.feasible = true;
  const auto blocked = detail::sorted_edges(q.blocked);
  auto is_blocked = [&](Vertex a, Vertex b) {
    return !blocked.empty() && std::binary_search(blocked.begin(), blocked.end(), Edge(a, b));
  };

  std::vector<bool> in_component(n, false);
  std::vector<Vertex> stack{q.start};
  in_component[q.start] = true;
  std::vector<Vertex> component;
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    component.push_back(u);
    for (Vertex w : g.neighbors(u)) {
      if (in_support[w] && !in_component[w] && !is_blocked(u, w)) {
        in_component[w] = true;
        stack.push_back(w);
      }
    }
  }

  std::vector<bool> is_local = in_component;
  for (Vertex r : q.required) {
    require(r < n, "required vertex out of range");
    is_local[r] = true;
  }
  std::vector<std::uint32_t> local_of(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (is_local[v]) {
      local_of[v] = static_cast<std::uint32_t>(frame.vertices.size());
      frame.vertices.push_back(v);
    }
  }
  frame.adjacency.resize(frame.vertices.size());
  for (std::uint32_t i = 0; i < frame.vertices.size(); ++i) {
    const Vertex u = frame.vertices[i];
    if (!in_component[u]) {
      continue;
    }
    for (Vertex w : g.neighbors(u)) {
      if (in_component[w] && !is_blocked(u, w)) {
        frame.adjacency[i].push_back(local_of[w]);
      }
    }
  }
  frame.start = local_of[q.start];
  for (Vertex r : q.required) {
    frame.required.push_back(local_of[r]);
  }
  std::sort(frame.required.begin(), frame.required.end());
  frame.required.erase(std::unique(frame.required.begin(), frame.required.end()),
                       frame.required.end());
  for (std::size_t k = 0; k < q.target_groups.size(); ++k) {
    for (Vertex t : q.target_groups[k]) {
      require(t < n, "target vertex out of range");
      if (in_component[t]) {
        frame.target_groups[k].push_back(local_of[t]);
      }
    }
  }
  return frame;
}

/// Number of satisfying configurations per count of open vertices among the
/// `bits` enumerated states. P_p = sum_k counts[k] p^k (1-p)^(bits-k).
struct OpenCountTable {
  std::size_t bits = 0;
  std::vector<std::uint64_t> counts{0};

  double probability(double p) const {
    const double q = 1.0 - p;
    std::vector<double> q_pow(bits + 1, 1.0);
    for (std::size_t k = 1; k <= bits; ++k) {
      q_pow[k] = q_pow[k - 1] * q;
    }
    double total = 0.0;
    double p_pow = 1.0;
    for (std::size_t k = 0; k <= bits; ++k) {
      if (counts[k] != 0) {
        total += static_cast<double>(counts[k]) * p_pow * q_pow[bits - k];
      }
      p_pow *= p;
    }
    return total;
  }
};

namespace detail {

using Mask = std::uint64_t;

struct MaskFrame {
  std::size_t bits = 0;
  std::vector<Mask> adjacency;
  Mask start = 0;
  Mask must = 0; // start | required
  std::vector<Mask> targets;
};

inline MaskFrame to_masks(const LocalFrame& frame, std::size_t cap) {
  const std::size_t limit = std::min<std::size_t>(cap, 62);
  if (frame.size() > limit) {
    throw SizeError("exact enumeration needs " + std::to_string(frame.size()) +
                    " vertex states, cap is " + std::to_string(limit));
  }
  MaskFrame m;
  m.bits = frame.size();
  m.adjacency.assign(m.bits, 0);
  for (std::size_t i = 0; i < m.bits; ++i) {
    for (auto j : frame.adjacency[i]) {
      m.adjacency[i] |= Mask{1} << j;
    }
  }
  m.start = Mask{1} << frame.start;
  m.must = m.start;
  for (auto r : frame.required) {
    m.must |= Mask{1} << r;
  }
  for (const auto& group : frame.target_groups) {
    Mask t = 0;
    for (auto j : group) {
      t |= Mask{1} << j;
    }
    m.targets.push_back(t);
  }
  return m;
}

/// Open vertices reachable from the start through open vertices.
inline Mask flood(const MaskFrame& m, Mask open) {
  Mask reach = m.start;
  Mask todo = m.start;
  while (todo != 0) {
    const int i = std::countr_zero(todo);
    todo &= todo - 1;
    const Mask fresh = m.adjacency[static_cast<std::size_t>(i)] & open & ~reach;
    reach |= fresh;
    todo |= fresh;
  }
  return reach;
}

inline Mask scatter(std::uint64_t idx, Mask positions) {
  Mask out = 0;
  while (idx != 0 && positions != 0) {
    const Mask low = positions & (~positions + 1);
    if (idx & 1u) {
      out |= low;
    }
    idx >>= 1;
    positions &= positions - 1;
  }
  return out;
}

/// Enumerates the supersets of `m.must` whose rank among them lies in
/// [first, last), in increasing order.
inline void count_range(const MaskFrame& m, std::uint64_t first, std::uint64_t last,
                        std::vector<std::vector<std::uint64_t>>& counts) {
  const Mask full = m.bits == 64 ? ~Mask{0} : ((Mask{1} << m.bits) - 1);
  const Mask free = full & ~m.must;
  Mask sub = scatter(first, free);
  for (std::uint64_t idx = first; idx < last; ++idx) {
    const Mask open = m.must | sub;
    const Mask reach = flood(m, open);
    const auto ones = static_cast<std::size_t>(std::popcount(open));
    for (std::size_t k = 0; k < m.targets.size(); ++k) {
      if ((reach & m.targets[k]) != 0) {
        ++counts[k][ones];
      }
    }
    sub = (sub - free) & free;
  }
}

} // namespace detail

/// Exact open-count tables, one per target group of the query.
inline std::vector<OpenCountTable> count_query(const Graph& g, const ConnectionQuery& q,
                                               const EngineOptions& opts = {}) {
  const LocalFrame frame = build_frame(g, q);
  std::vector<OpenCountTable> out(q.target_groups.size());
  if (!frame.feasible) {
    return out;
  }
  const detail::MaskFrame m = detail::to_masks(frame, opts.cap);
  const int free_bits = static_cast<int>(m.bits) - std::popcount(m.must);
  const std::uint64_t total = std::uint64_t{1} << free_bits;
  const unsigned threads =
      (opts.threads > 1 && free_bits >= 14) ? opts.threads : 1u;

  std::vector<std::vector<std::vector<std::uint64_t>>> partial(
      threads, std::vector<std::vector<std::uint64_t>>(
                   m.targets.size(), std::vector<std::uint64_t>(m.bits + 1, 0)));
  if (threads == 1) {
    detail::count_range(m, 0, total, partial[0]);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t first = std::min(total, chunk * t);
      const std::uint64_t last = std::min(total, first + chunk);
      pool.emplace_back([&, t, first, last] { detail::count_range(m, first, last, partial[t]); });
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].bits = m.bits;
    out[k].counts.assign(m.bits + 1, 0);
    for (const auto& part : partial) {
      for (std::size_t j = 0; j <= m.bits; ++j) {
        out[k].counts[j] += part[k][j];
      }
    }
  }
  return out;
}

inline OpenCountTable count_single(const Graph& g, ConnectionQuery q,
                                   const EngineOptions& opts = {}) {
  require(q.target_groups.size() == 1, "single-target query expected");
  return count_query(g, q, opts).front();
}

} // namespace sitecut
