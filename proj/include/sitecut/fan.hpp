#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sitecut/cutset.hpp"
#include "sitecut/exact.hpp"
#include "sitecut/graph.hpp"

namespace sitecut {

/// Truncated bipartite fan: black vertices (2n,0) for n = 0..N, and 2^n white
/// vertices (2n+1,i) between (2n,0) and (2n+2,0). A single ghost hangs off
/// (2N,0). The infinite fan has p_c^site = 1.
struct FanPatch {
  int levels = 0;
  Patch patch;
  std::vector<Vertex> black;              // black[n] = (2n,0)
  std::vector<std::vector<Vertex>> white; // white[n][i-1] = (2n+1,i)
  Vertex ghost = 0;
};

inline constexpr int kMaxFanLevels = 20;

inline FanPatch fan_patch(int levels) {
  require(levels >= 1, "fan needs at least one level");
  if (levels > kMaxFanLevels) {
    throw SizeError("fan levels above " + std::to_string(kMaxFanLevels) + " are not supported");
  }
  std::vector<Edge> edges;
  std::vector<Label> labels;
  std::vector<Vertex> black;
  std::vector<std::vector<Vertex>> white(static_cast<std::size_t>(levels));
  Vertex next = 0;
  black.push_back(next++);
  labels.push_back({0, 0});
  for (int n = 0; n < levels; ++n) {
    const std::size_t width = std::size_t{1} << n;
    for (std::size_t i = 0; i < width; ++i) {
      white[n].push_back(next++);
      labels.push_back({2 * n + 1, static_cast<int>(i + 1)});
    }
    black.push_back(next++);
    labels.push_back({2 * n + 2, 0});
    for (Vertex w : white[n]) {
      edges.emplace_back(black[n], w);
      edges.emplace_back(w, black[n + 1]);
    }
  }
  const Vertex ghost = next++;
  labels.push_back({2 * levels + 1, 0});
  edges.emplace_back(black.back(), ghost);
  Graph g = build_graph(edges, next);
  g.set_labels(std::move(labels));
  return FanPatch{levels, Patch(std::move(g), black.front(), {ghost}), std::move(black),
                  std::move(white), ghost};
}

/// P_p((0,0) <-> (2n,0)): all n+1 blacks open and at least one open white at
/// each of the n levels in between.
inline double black_conn_exact(int n, double p) {
  require(n >= 0, "level must be nonnegative");
  require_probability(p);
  double value = std::pow(p, n + 1);
  double closed_all = 1.0 - p; // (1-p)^(2^k)
  for (int k = 0; k < n; ++k) {
    value *= 1.0 - closed_all;
    closed_all *= closed_all;
  }
  return value;
}

/// The 2^(n-1) edges from the level-(n-1) whites into (2n,0).
inline EdgeCutset level_cut(const FanPatch& fan, int n) {
  require(n >= 1 && n <= fan.levels, "level must lie in 1..N");
  std::vector<Edge> edges;
  for (Vertex w : fan.white[n - 1]) {
    edges.emplace_back(w, fan.black[n]);
  }
  return EdgeCutset(std::move(edges));
}

/// Each term: reach (2n-2,0), then the white and (2n,0) open.
inline double level_cut_sum_exact(int n, double p) {
  require(n >= 1, "level must be positive");
  return std::ldexp(1.0, n - 1) * p * p * black_conn_exact(n - 1, p);
}

/// Closed-form cut sums of every distance-level edge cut of fan_patch(N), in
/// order of distance k = 0..2N from the root; k = 2N is the ghost edge.
inline std::vector<double> distance_level_sums_exact(int levels, double p) {
  std::vector<double> out;
  for (int n = 0; n < levels; ++n) {
    out.push_back(std::ldexp(1.0, n) * p * black_conn_exact(n, p));
    out.push_back(level_cut_sum_exact(n + 1, p));
  }
  out.push_back(black_conn_exact(levels, p));
  return out;
}

/// 2^(N-1) p^(2N-1).
inline double cut_sum_bound(int n, double p) {
  require(n >= 1, "N must be positive");
  return std::ldexp(std::pow(p, 2 * n - 1), n - 1);
}

/// 2^(N-1) p^(2N+1): the bound with both endpoints of every cut edge and
/// the root counted as open vertices.
inline double open_endpoint_bound(int n, double p) {
  require(n >= 1, "N must be positive");
  return std::ldexp(std::pow(p, 2 * n + 1), n - 1);
}

/// Smallest n >= 1 such that the cut separates (0,0) from (2n,0); nullopt if
/// it separates none of the patch's blacks (only the ghost tail edge).
inline std::optional<int> separation_level(const FanPatch& fan, const EdgeCutset& cut) {
  const Graph& g = fan.patch.graph();
  std::vector<bool> seen(g.vertex_count(), false);
  std::vector<Vertex> stack{fan.black.front()};
  seen[fan.black.front()] = true;
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (Vertex w : g.neighbors(u)) {
      if (!seen[w] && !cut.contains(Edge(u, w))) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  for (int n = 1; n <= fan.levels; ++n) {
    if (!seen[fan.black[n]]) {
      return n;
    }
  }
  return std::nullopt;
}

struct Theorem34Row {
  std::string cut;
  std::optional<int> level; // N(cut)
  double p = 0.0;
  double cut_sum = 0.0;
  double bound = 0.0;           // cut_sum_bound(N(cut), p)
  double margin = 0.0;          // cut_sum - bound
  double open_bound = 0.0;      // open_endpoint_bound(N(cut), p)
  double open_margin = 0.0;
};

struct Theorem34Report {
  int levels = 0;
  std::size_t cutsets = 0;
  std::size_t tail_cutsets = 0; // separate only the ghost; no bound applies
  std::vector<Theorem34Row> rows;
  std::size_t violations = 0;       // cut_sum < bound - 1e-9
  std::size_t open_violations = 0;  // cut_sum < open_bound - 1e-9
  double min_margin = 0.0;
  double min_open_margin = 0.0;
};

/// Checks cut_sum(cut) >= 2^(N-1) p^(2N-1) with N = N(cut) for every minimal
/// edge cutset of fan_patch(levels) and every p of the grid, recording the
/// margins against both bounds.
inline Theorem34Report verify_theorem34(int levels, const std::vector<double>& p_grid,
                                        const EngineOptions& engine = {}) {
  const FanPatch fan = fan_patch(levels);
  const auto cuts = enumerate_minimal_cutsets(fan.patch, fan.black.front(), CutKind::edge);
  Theorem34Report report;
  report.levels = levels;
  report.cutsets = cuts.size();
  bool first = true;
  for (const auto& any : cuts) {
    const auto& cut = std::get<EdgeCutset>(any);
    const auto level = separation_level(fan, cut);
    if (!level) {
      ++report.tail_cutsets;
    }
    for (double p : p_grid) {
      Theorem34Row row;
      row.cut = members_string(any);
      row.level = level;
      row.p = p;
      row.cut_sum = cut_sum(fan.patch, fan.black.front(), any, p, CutSumOptions{engine, false, {}}).total;
      if (level) {
        row.bound = cut_sum_bound(*level, p);
        row.margin = row.cut_sum - row.bound;
        row.open_bound = open_endpoint_bound(*level, p);
        row.open_margin = row.cut_sum - row.open_bound;
        if (row.margin < -1e-9) {
          ++report.violations;
        }
        if (row.open_margin < -1e-9) {
          ++report.open_violations;
        }
        if (first || row.margin < report.min_margin) {
          report.min_margin = row.margin;
        }
        if (first || row.open_margin < report.min_open_margin) {
          report.min_open_margin = row.open_margin;
        }
        first = false;
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

/// P_p((0,0) <-> (2N,0)) for each N of the grid.
inline std::vector<std::pair<int, double>> pc_trend(double p, const std::vector<int>& levels) {
  require_probability(p);
  std::vector<std::pair<int, double>> out;
  for (int n : levels) {
    out.emplace_back(n, black_conn_exact(n, p));
  }
  return out;
}

} // namespace sitecut
