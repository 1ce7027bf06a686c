#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "sitecut/enumeration.hpp"
#include "sitecut/graph.hpp"

namespace sitecut {

/// Site configuration over a patch: one state per non-ghost vertex.
/// Ghost entries are stored but always closed and never consulted.
class Configuration {
public:
  explicit Configuration(const Patch& patch)
      : open_(patch.vertex_count(), 0), ghost_(patch.vertex_count(), 0) {
    for (Vertex g : patch.ghosts()) {
      ghost_[g] = 1;
    }
  }

  bool is_open(Vertex v) const { return open_.at(v) != 0; }

  void set(Vertex v, bool open) {
    require(ghost_.at(v) == 0, "ghost vertices carry no state");
    open_[v] = open ? 1 : 0;
  }

  /// omega^y: same configuration with y forced open.
  Configuration with_open(Vertex y) const {
    Configuration c = *this;
    c.set(y, true);
    return c;
  }

  /// omega_y: same configuration with y forced closed.
  Configuration with_closed(Vertex y) const {
    Configuration c = *this;
    c.set(y, false);
    return c;
  }

  std::size_t open_count() const {
    std::size_t n = 0;
    for (auto b : open_) {
      n += b;
    }
    return n;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;

private:
  std::vector<std::uint8_t> open_;
  std::vector<std::uint8_t> ghost_;
};

/// phi_p^v(S) with its per-boundary-vertex terms.
struct PhiReport {
  double p = 0.0;
  VertexSet set;
  Vertex center = 0;
  double value = 0.0;
  std::vector<std::pair<Vertex, double>> contributions; // ascending y
  bool degenerate = false;
};

namespace detail {

inline void require_real_subset(const Patch& patch, const VertexSet& s, const char* what) {
  for (Vertex v : s) {
    require(v < patch.vertex_count(), std::string(what) + " member out of range");
    require(!patch.is_ghost(v), std::string(what) + " must not contain ghost vertices");
  }
}

/// Vertices of s with at least one neighbor outside s.
inline std::vector<Vertex> boundary_of(const Graph& g, const VertexSet& s) {
  std::vector<Vertex> out;
  for (Vertex y : s) {
    const auto nb = g.neighbors(y);
    if (std::any_of(nb.begin(), nb.end(), [&](Vertex w) { return !s.contains(w); })) {
      out.push_back(y);
    }
  }
  return out;
}

inline std::vector<Vertex> neighbors_in(const Graph& g, Vertex y, const VertexSet& s) {
  std::vector<Vertex> out;
  for (Vertex w : g.neighbors(y)) {
    if (s.contains(w)) {
      out.push_back(w);
    }
  }
  return out;
}

inline ConnectionQuery frontier_query(const Patch& patch, Vertex v) {
  ConnectionQuery q;
  q.support = patch.real_vertices();
  q.start = v;
  q.target_groups = {patch.frontier()};
  return q;
}

inline ConnectionQuery interior_query(const Patch& patch, const VertexSet& interior, Vertex v,
                                      const std::vector<Vertex>& ys) {
  ConnectionQuery q;
  q.support = interior.members();
  q.start = v;
  for (Vertex y : ys) {
    q.target_groups.push_back(neighbors_in(patch.graph(), y, interior));
  }
  return q;
}

inline ConnectionQuery restricted_query(const Patch& patch, const VertexSet& a, Vertex u,
                                        const VertexSet& b) {
  ConnectionQuery q;
  q.support = a.members();
  q.start = u;
  std::vector<Vertex> targets;
  for (Vertex t : b) {
    require(t < patch.vertex_count(), "target set member out of range");
    if (!patch.is_ghost(t)) {
      targets.push_back(t);
      if (!a.contains(t)) {
        q.support.push_back(t);
      }
    }
  }
  // a ghost target is reached from any neighboring vertex of a
  for (Vertex x : a) {
    for (Vertex w : patch.graph().neighbors(x)) {
      if (patch.is_ghost(w) && b.contains(w)) {
        targets.push_back(x);
        break;
      }
    }
  }
  q.target_groups = {targets};
  return q;
}

} // namespace detail

/// P_p(v <-> frontier through open non-ghost vertices), as an open-count table.
inline OpenCountTable frontier_table(const Patch& patch, Vertex v, const EngineOptions& opts = {}) {
  require(v < patch.vertex_count() && !patch.is_ghost(v), "v must be a non-ghost vertex");
  return count_single(patch.graph(), detail::frontier_query(patch, v), opts);
}

inline double conn_frontier_prob(const Patch& patch, Vertex v, double p,
                                 const EngineOptions& opts = {}) {
  require_probability(p);
  return frontier_table(patch, v, opts).probability(p);
}

/// P_p(v <->_{S°} ∂y): v reaches a neighbor of y through open vertices of S°.
inline double conn_interior_prob(const Patch& patch, const VertexSet& s, Vertex v, Vertex y,
                                 double p, const EngineOptions& opts = {}) {
  require_probability(p);
  detail::require_real_subset(patch, s, "S");
  const VertexSet interior = interior_of(patch.graph(), s);
  require(interior.contains(v), "v must be an interior vertex of S");
  require(s.contains(y), "y must belong to S");
  const auto nb = patch.graph().neighbors(y);
  require(std::any_of(nb.begin(), nb.end(), [&](Vertex w) { return !s.contains(w); }),
          "y must have a neighbor outside S");
  return count_single(patch.graph(), detail::interior_query(patch, interior, v, {y}), opts)
      .probability(p);
}

inline PhiReport phi(const Patch& patch, const VertexSet& s, Vertex v, double p,
                     const EngineOptions& opts = {}) {
  require_probability(p);
  detail::require_real_subset(patch, s, "S");
  require(s.contains(v), "v must belong to S");
  PhiReport report;
  report.p = p;
  report.set = s;
  report.center = v;
  const VertexSet interior = interior_of(patch.graph(), s);
  if (!interior.contains(v)) {
    report.degenerate = true;
    report.value = 1.0;
    return report;
  }
  const auto ys = detail::boundary_of(patch.graph(), s);
  const auto tables =
      count_query(patch.graph(), detail::interior_query(patch, interior, v, ys), opts);
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const double term = tables[k].probability(p);
    report.contributions.emplace_back(ys[k], term);
    report.value += term;
  }
  return report;
}

/// P_p(u <->_A B): u joined to B by an open path whose vertices other than
/// the final one lie in A. A non-ghost endpoint in B must be open; a ghost
/// endpoint carries no state.
inline double restricted_conn_prob(const Patch& patch, const VertexSet& a, Vertex u,
                                   const VertexSet& b, double p,
                                   const EngineOptions& opts = {}) {
  require_probability(p);
  detail::require_real_subset(patch, a, "A");
  require(a.contains(u), "u must belong to A");
  return count_single(patch.graph(), detail::restricted_query(patch, a, u, b), opts)
      .probability(p);
}

/// Sum over y of P_p(y is pivotal for v <-> frontier).
inline double pivotal_sum(const Patch& patch, Vertex v, double p, const EngineOptions& opts = {}) {
  require_probability(p);
  require(v < patch.vertex_count() && !patch.is_ghost(v), "v must be a non-ghost vertex");
  const LocalFrame frame = build_frame(patch.graph(), detail::frontier_query(patch, v));
  if (opts.cap < 1 || frame.size() > opts.cap - 1) {
    throw SizeError("pivotal enumeration needs " + std::to_string(frame.size()) +
                    " vertex states, limit is cap-1 = " + std::to_string(opts.cap - 1));
  }
  const detail::MaskFrame m = detail::to_masks(frame, opts.cap);
  if (m.targets.front() == 0) {
    return 0.0;
  }
  const std::uint64_t total = std::uint64_t{1} << m.bits;
  std::vector<bool> holds(total, false);
  for (std::uint64_t open = 0; open < total; ++open) {
    if ((open & m.start) != 0) {
      holds[open] = (detail::flood(m, open) & m.targets.front()) != 0;
    }
  }
  // counts over the m-1 states other than y, indexed by their open count
  double sum = 0.0;
  for (std::size_t y = 0; y < m.bits; ++y) {
    const std::uint64_t bit = std::uint64_t{1} << y;
    OpenCountTable table;
    table.bits = m.bits - 1;
    table.counts.assign(m.bits, 0);
    for (std::uint64_t open = 0; open < total; ++open) {
      if ((open & bit) != 0 && holds[open] && !holds[open ^ bit]) {
        ++table.counts[static_cast<std::size_t>(std::popcount(open)) - 1];
      }
    }
    sum += table.probability(p);
  }
  return sum;
}

struct RussoReport {
  double lhs_fd = 0.0;
  double rhs_pivotal = 0.0;
  double gap = 0.0;
};

/// Central finite difference of P_p(v <-> frontier) against the pivotal sum.
inline RussoReport russo_check(const Patch& patch, Vertex v, double p, double h,
                               const EngineOptions& opts = {}) {
  require(h > 0.0 && h <= 1e-2, "finite-difference step must lie in (0, 1e-2]");
  require(p - h > 0.0 && p + h < 1.0, "p +- h must lie in (0,1)");
  const OpenCountTable f = frontier_table(patch, v, opts);
  RussoReport r;
  r.lhs_fd = (f.probability(p + h) - f.probability(p - h)) / (2.0 * h);
  r.rhs_pivotal = pivotal_sum(patch, v, p, opts);
  r.gap = std::abs(r.lhs_fd - r.rhs_pivotal);
  return r;
}

struct InfPhiResult {
  double min_value = 1.0;
  VertexSet argmin;
};

/// Exact minimum of phi_p^v(S) over all S ⊆ non-ghost vertices with v ∈ S.
/// Ties (within 1e-12) go to the smaller set, then the lexicographically
/// smaller member list.
inline InfPhiResult exhaustive_inf_phi(const Patch& patch, Vertex v, double p,
                                       const EngineOptions& opts = {}) {
  require_probability(p);
  require(v < patch.vertex_count() && !patch.is_ghost(v), "v must be a non-ghost vertex");
  constexpr std::size_t kMaxReal = 12;
  if (patch.real_count() > kMaxReal) {
    throw SizeError("exhaustive inf over S needs at most 12 non-ghost vertices");
  }
  std::vector<Vertex> others;
  for (Vertex w : patch.real_vertices()) {
    if (w != v) {
      others.push_back(w);
    }
  }
  InfPhiResult best;
  bool have = false;
  const std::uint64_t total = std::uint64_t{1} << others.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::vector<Vertex> members{v};
    for (std::size_t i = 0; i < others.size(); ++i) {
      if ((mask >> i) & 1u) {
        members.push_back(others[i]);
      }
    }
    VertexSet s(std::move(members));
    const double value = phi(patch, s, v, p, opts).value;
    bool better = !have || value < best.min_value - 1e-12;
    if (!better && std::abs(value - best.min_value) <= 1e-12) {
      better = s.size() < best.argmin.size() ||
               (s.size() == best.argmin.size() && s.members() < best.argmin.members());
    }
    if (better) {
      best.min_value = value;
      best.argmin = std::move(s);
      have = true;
    }
  }
  return best;
}

struct DifferentialReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double min_phi = 0.0;
  double frontier_prob = 0.0;
  bool holds = false;
};

/// d/dp P_p(v <-> frontier) >= (1/(1-p)) [inf_S phi_p^v(S)] (1 - P_p(v <-> frontier)).
/// The derivative is a Richardson-extrapolated central difference (steps h
/// and h/2, error O(h^4)): the inequality can be an equality, and plain
/// central differences are off by O(h^2), far above the tolerance.
inline DifferentialReport l72_check(const Patch& patch, Vertex v, double p, double h,
                                    const EngineOptions& opts = {}, double tolerance = 1e-9) {
  require(p < 1.0, "p must be below 1");
  require(h > 0.0 && h <= 1e-2, "finite-difference step must lie in (0, 1e-2]");
  require(p - h > 0.0 && p + h < 1.0, "p +- h must lie in (0,1)");
  const OpenCountTable f = frontier_table(patch, v, opts);
  DifferentialReport r;
  const double wide = (f.probability(p + h) - f.probability(p - h)) / (2.0 * h);
  const double narrow = (f.probability(p + h / 2) - f.probability(p - h / 2)) / h;
  r.lhs = (4.0 * narrow - wide) / 3.0;
  r.frontier_prob = f.probability(p);
  r.min_phi = exhaustive_inf_phi(patch, v, p, opts).min_value;
  r.rhs = r.min_phi * (1.0 - r.frontier_prob) / (1.0 - p);
  r.holds = r.lhs >= r.rhs - tolerance;
  return r;
}

} // namespace sitecut
