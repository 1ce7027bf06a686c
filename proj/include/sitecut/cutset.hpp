#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "sitecut/events.hpp"
#include "sitecut/graph.hpp"
#include "sitecut/monte_carlo.hpp"

namespace sitecut {

enum class CutKind { vertex, edge };

inline const char* to_string(CutKind k) { return k == CutKind::vertex ? "vertex" : "edge"; }

using AnyCutset = std::variant<VertexCutset, EdgeCutset>;

inline CutKind kind_of(const AnyCutset& cut) {
  return std::holds_alternative<VertexCutset>(cut) ? CutKind::vertex : CutKind::edge;
}

/// "3;5;7" for vertex cuts, "0-1;1-2" for edge cuts.
inline std::string members_string(const AnyCutset& cut) {
  std::string out;
  if (const auto* vc = std::get_if<VertexCutset>(&cut)) {
    for (Vertex v : vc->members) {
      out += (out.empty() ? "" : ";") + std::to_string(v);
    }
  } else {
    for (const Edge& e : std::get<EdgeCutset>(cut).members) {
      out += (out.empty() ? "" : ";") + std::to_string(e.u) + "-" + std::to_string(e.v);
    }
  }
  return out;
}

/// Sum over the cut of the members' cut-event probabilities. Terms follow the
/// cut's member order.
struct CutSumReport {
  CutKind kind = CutKind::vertex;
  AnyCutset cut;
  double p = 0.0;
  std::vector<double> terms;
  double total = 0.0;
  bool exact = true;       // false if any term was estimated
  double std_error = 0.0;  // of the total, from estimated terms
};

struct CutSumOptions {
  EngineOptions engine;
  bool allow_mc = false;
  McOptions mc;
};

inline double vertex_cut_event_prob(const Patch& patch, Vertex x, Vertex v,
                                    const VertexCutset& cut, double p,
                                    const EngineOptions& opts = {}) {
  return exact_event_prob(patch, events::VertexCutEvent{x, v, cut}, p, opts);
}

inline double edge_cut_event_prob(const Patch& patch, Vertex x, const Edge& e,
                                  const EdgeCutset& cut, double p,
                                  const EngineOptions& opts = {}) {
  return exact_event_prob(patch, events::EdgeCutEvent{x, e, cut}, p, opts);
}

inline CutSumReport cut_sum(const Patch& patch, Vertex x, const AnyCutset& cut, double p,
                            const CutSumOptions& opts = {}) {
  require_probability(p);
  CutSumReport r;
  r.kind = kind_of(cut);
  r.cut = cut;
  r.p = p;
  std::vector<EventSpec> terms;
  if (const auto* vc = std::get_if<VertexCutset>(&cut)) {
    require(separates_vertex(patch, x, *vc), "vertex cutset does not separate x from the frontier");
    for (Vertex v : vc->members) {
      terms.emplace_back(events::VertexCutEvent{x, v, *vc});
    }
  } else {
    const auto& ec = std::get<EdgeCutset>(cut);
    require(separates_edge(patch, x, ec), "edge cutset does not separate x from the frontier");
    for (const Edge& e : ec.members) {
      terms.emplace_back(events::EdgeCutEvent{x, e, ec});
    }
  }
  double variance = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double value = 0.0;
    try {
      value = exact_event_prob(patch, terms[i], p, opts.engine);
    } catch (const SizeError&) {
      if (!opts.allow_mc) {
        throw;
      }
      McOptions mc = opts.mc;
      mc.seed = mix_seed(opts.mc.seed, i);
      const MCEstimate est = mc_event_prob(patch, terms[i], p, mc);
      value = est.mean;
      variance += est.std_error * est.std_error;
      r.exact = false;
    }
    r.terms.push_back(value);
    r.total += value;
  }
  r.std_error = std::sqrt(variance);
  return r;
}

namespace detail {

/// Bitmask separation oracle over a small patch (at most 64 vertices).
class SeparationMasks {
public:
  SeparationMasks(const Patch& patch, Vertex x, CutKind kind) : patch_(patch), x_(x), kind_(kind) {
    require(x < patch.vertex_count() && !patch.is_ghost(x), "x must be a non-ghost vertex");
    if (patch.vertex_count() > 64) {
      throw SizeError("exhaustive cutset enumeration supports at most 64 vertices");
    }
    const Graph& g = patch.graph();
    if (kind == CutKind::vertex) {
      elements_v_ = patch.real_vertices();
    } else {
      for (const Edge& e : g.edges()) {
        if (!patch.is_ghost(e.u) || !patch.is_ghost(e.v)) {
          elements_e_.push_back(e);
        }
      }
    }
    incident_.resize(g.vertex_count());
    for (std::size_t i = 0; i < elements_e_.size(); ++i) {
      incident_[elements_e_[i].u].push_back(i);
      incident_[elements_e_[i].v].push_back(i);
    }
  }

  std::size_t element_count() const {
    return kind_ == CutKind::vertex ? elements_v_.size() : elements_e_.size();
  }

  bool separates(std::uint64_t chosen) const {
    const Graph& g = patch_.graph();
    std::uint64_t removed = 0; // vertex bits
    if (kind_ == CutKind::vertex) {
      for (std::size_t i = 0; i < elements_v_.size(); ++i) {
        if ((chosen >> i) & 1u) {
          removed |= std::uint64_t{1} << elements_v_[i];
        }
      }
      if ((removed >> x_) & 1u) {
        return true;
      }
    }
    std::uint64_t seen = std::uint64_t{1} << x_;
    std::uint64_t todo = seen;
    while (todo != 0) {
      const auto u = static_cast<Vertex>(std::countr_zero(todo));
      todo &= todo - 1;
      for (Vertex w : g.neighbors(u)) {
        if (kind_ == CutKind::edge && is_blocked(chosen, u, w)) {
          continue;
        }
        if (patch_.is_ghost(w)) {
          return false;
        }
        const std::uint64_t bit = std::uint64_t{1} << w;
        if ((seen & bit) == 0 && (removed & bit) == 0) {
          seen |= bit;
          todo |= bit;
        }
      }
    }
    return true;
  }

  AnyCutset make(std::uint64_t chosen) const {
    if (kind_ == CutKind::vertex) {
      std::vector<Vertex> m;
      for (std::size_t i = 0; i < elements_v_.size(); ++i) {
        if ((chosen >> i) & 1u) {
          m.push_back(elements_v_[i]);
        }
      }
      return VertexCutset{VertexSet(std::move(m))};
    }
    std::vector<Edge> m;
    for (std::size_t i = 0; i < elements_e_.size(); ++i) {
      if ((chosen >> i) & 1u) {
        m.push_back(elements_e_[i]);
      }
    }
    return EdgeCutset(std::move(m));
  }

private:
  bool is_blocked(std::uint64_t chosen, Vertex u, Vertex w) const {
    for (std::size_t i : incident_[u]) {
      if (elements_e_[i].touches(w) && ((chosen >> i) & 1u)) {
        return true;
      }
    }
    return false;
  }

  const Patch& patch_;
  Vertex x_;
  CutKind kind_;
  std::vector<Vertex> elements_v_;
  std::vector<Edge> elements_e_;
  std::vector<std::vector<std::size_t>> incident_;
};

inline bool cut_order(const AnyCutset& a, const AnyCutset& b) {
  if (const auto* va = std::get_if<VertexCutset>(&a)) {
    const auto& vb = std::get<VertexCutset>(b);
    if (va->members.size() != vb.members.size()) {
      return va->members.size() < vb.members.size();
    }
    return va->members.members() < vb.members.members();
  }
  const auto& ea = std::get<EdgeCutset>(a);
  const auto& eb = std::get<EdgeCutset>(b);
  if (ea.size() != eb.size()) {
    return ea.size() < eb.size();
  }
  return ea.members < eb.members;
}

} // namespace detail

/// Every cutset separating x from the frontier, or only the inclusion-minimal
/// ones, by exhaustive subset filtering. Elements are the non-ghost vertices
/// (vertex kind) or the edges with a non-ghost endpoint (edge kind). Output is
/// ordered by size, then lexicographically.
inline std::vector<AnyCutset> enumerate_cutsets(const Patch& patch, Vertex x, CutKind kind,
                                                bool minimal_only = true,
                                                std::size_t cap_elements = 20) {
  const detail::SeparationMasks masks(patch, x, kind);
  const std::size_t m = masks.element_count();
  if (m > cap_elements) {
    throw SizeError("cutset enumeration over " + std::to_string(m) +
                    " elements exceeds the cap of " + std::to_string(cap_elements));
  }
  const std::uint64_t total = std::uint64_t{1} << m;
  std::vector<bool> valid(total, false);
  for (std::uint64_t s = 0; s < total; ++s) {
    valid[s] = masks.separates(s);
  }
  std::vector<AnyCutset> out;
  for (std::uint64_t s = 0; s < total; ++s) {
    if (!valid[s]) {
      continue;
    }
    bool keep = true;
    if (minimal_only) {
      for (std::uint64_t rest = s; rest != 0 && keep; rest &= rest - 1) {
        const std::uint64_t low = rest & (~rest + 1);
        keep = !valid[s ^ low];
      }
    }
    if (keep) {
      out.push_back(masks.make(s));
    }
  }
  std::sort(out.begin(), out.end(), detail::cut_order);
  return out;
}

inline std::vector<AnyCutset> enumerate_minimal_cutsets(const Patch& patch, Vertex x, CutKind kind,
                                                        std::size_t cap_elements = 20) {
  return enumerate_cutsets(patch, x, kind, true, cap_elements);
}

/// Graph-distance level cuts around x: the non-ghost vertices at distance k
/// (vertex kind) or the edges from distance k to distance k + 1 (edge kind),
/// for every k at which they separate.
inline std::vector<AnyCutset> level_cutsets(const Patch& patch, Vertex x, CutKind kind) {
  require(x < patch.vertex_count() && !patch.is_ghost(x), "x must be a non-ghost vertex");
  const Graph& g = patch.graph();
  constexpr auto kFar = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.vertex_count(), kFar);
  std::vector<Vertex> queue{x};
  dist[x] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex u = queue[head];
    for (Vertex w : g.neighbors(u)) {
      if (dist[w] == kFar) {
        dist[w] = dist[u] + 1;
        if (!patch.is_ghost(w)) {
          queue.push_back(w);
        }
      }
    }
  }
  std::size_t max_real = 0;
  for (Vertex v : patch.real_vertices()) {
    if (dist[v] != kFar) {
      max_real = std::max(max_real, dist[v]);
    }
  }
  std::vector<AnyCutset> out;
  for (std::size_t k = 0; k <= max_real; ++k) {
    if (kind == CutKind::vertex) {
      std::vector<Vertex> m;
      for (Vertex v : patch.real_vertices()) {
        if (dist[v] == k) {
          m.push_back(v);
        }
      }
      VertexCutset cut{VertexSet(std::move(m))};
      if (!cut.members.empty() && separates_vertex(patch, x, cut)) {
        out.emplace_back(std::move(cut));
      }
    } else {
      std::vector<Edge> m;
      for (const Edge& e : g.edges()) {
        for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
          if (!patch.is_ghost(a) && dist[a] == k && dist[b] == k + 1) {
            m.push_back(e);
          }
        }
      }
      EdgeCutset cut(std::move(m));
      if (cut.size() > 0 && separates_edge(patch, x, cut)) {
        out.emplace_back(std::move(cut));
      }
    }
  }
  return out;
}

enum class CutFamily { enumerated, level_cuts };

inline const char* to_string(CutFamily f) {
  return f == CutFamily::enumerated ? "enumerated" : "level_cuts";
}

struct InfCutResult {
  CutFamily family = CutFamily::enumerated;
  std::size_t family_size = 0;
  double min_total = 0.0;
  AnyCutset argmin_cut;
};

/// Minimum cut sum over a cutset family; the first minimum in family order wins.
inline InfCutResult inf_cut_sum(const Patch& patch, Vertex x, CutKind kind, double p,
                                CutFamily family, const CutSumOptions& opts = {}) {
  const auto cuts = family == CutFamily::enumerated ? enumerate_minimal_cutsets(patch, x, kind)
                                                    : level_cutsets(patch, x, kind);
  require(!cuts.empty(), "cutset family is empty");
  InfCutResult r;
  r.family = family;
  r.family_size = cuts.size();
  bool have = false;
  for (const auto& cut : cuts) {
    const double total = cut_sum(patch, x, cut, p, opts).total;
    if (!have || total < r.min_total) {
      r.min_total = total;
      r.argmin_cut = cut;
      have = true;
    }
  }
  return r;
}

} // namespace sitecut
