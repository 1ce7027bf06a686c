#pragma once

#include <string>
#include <variant>

#include "sitecut/exact.hpp"
#include "sitecut/graph.hpp"

namespace sitecut {

namespace events {

/// v <-> ghost frontier.
struct FrontierConn {
  Vertex v = 0;
};

/// v <->_{S°} ∂y.
struct InteriorConn {
  VertexSet s;
  Vertex v = 0;
  Vertex y = 0;
};

/// A(x, v, Π_V): x joined to the cut member v by an open path avoiding the
/// other members; v itself open.
struct VertexCutEvent {
  Vertex x = 0;
  Vertex v = 0;
  VertexCutset cut;
};

/// A(x, e, Π_E): x joined to an endpoint of e without using other cut
/// edges, with both (non-ghost) endpoints of e open.
struct EdgeCutEvent {
  Vertex x = 0;
  Edge e;
  EdgeCutset cut;
};

/// u <->_A B.
struct Restricted {
  VertexSet a;
  Vertex u = 0;
  VertexSet b;
};

} // namespace events

using EventSpec = std::variant<events::FrontierConn, events::InteriorConn,
                               events::VertexCutEvent, events::EdgeCutEvent,
                               events::Restricted>;

inline std::string event_name(const EventSpec& event) {
  struct Visitor {
    std::string operator()(const events::FrontierConn&) const { return "frontier_conn"; }
    std::string operator()(const events::InteriorConn&) const { return "interior_conn"; }
    std::string operator()(const events::VertexCutEvent&) const { return "vertex_cut_event"; }
    std::string operator()(const events::EdgeCutEvent&) const { return "edge_cut_event"; }
    std::string operator()(const events::Restricted&) const { return "restricted"; }
  };
  return std::visit(Visitor{}, event);
}

namespace detail {

inline void require_real_vertex(const Patch& patch, Vertex v, const char* what) {
  require(v < patch.vertex_count() && !patch.is_ghost(v),
          std::string(what) + " must be a non-ghost vertex");
}

inline ConnectionQuery vertex_cut_query(const Patch& patch, const events::VertexCutEvent& ev) {
  require_real_vertex(patch, ev.x, "x");
  require(ev.cut.members.contains(ev.v), "v must be a member of the cut");
  require(separates_vertex(patch, ev.x, ev.cut), "vertex cutset does not separate x from the frontier");
  ConnectionQuery q;
  for (Vertex w : patch.real_vertices()) {
    if (w == ev.v || !ev.cut.members.contains(w)) {
      q.support.push_back(w);
    }
  }
  q.start = ev.x;
  q.target_groups = {{ev.v}};
  return q;
}

inline ConnectionQuery edge_cut_query(const Patch& patch, const events::EdgeCutEvent& ev) {
  require_real_vertex(patch, ev.x, "x");
  require(ev.cut.contains(ev.e), "e must be a member of the cut");
  require(separates_edge(patch, ev.x, ev.cut), "edge cutset does not separate x from the frontier");
  ConnectionQuery q;
  q.support = patch.real_vertices();
  q.start = ev.x;
  for (const Edge& f : ev.cut.members) {
    if (!(f == ev.e)) {
      q.blocked.push_back(f);
    }
  }
  std::vector<Vertex> ends;
  for (Vertex w : {ev.e.u, ev.e.v}) {
    if (!patch.is_ghost(w)) {
      ends.push_back(w);
    }
  }
  q.target_groups = {ends};
  q.required = ends;
  return q;
}

} // namespace detail

/// Validates the event against the patch and lowers it to a connection query.
inline ConnectionQuery to_query(const Patch& patch, const EventSpec& event) {
  struct Visitor {
    const Patch& patch;
    ConnectionQuery operator()(const events::FrontierConn& ev) const {
      detail::require_real_vertex(patch, ev.v, "v");
      return detail::frontier_query(patch, ev.v);
    }
    ConnectionQuery operator()(const events::InteriorConn& ev) const {
      detail::require_real_subset(patch, ev.s, "S");
      const VertexSet interior = interior_of(patch.graph(), ev.s);
      require(interior.contains(ev.v), "v must be an interior vertex of S");
      require(ev.s.contains(ev.y), "y must belong to S");
      const auto nb = patch.graph().neighbors(ev.y);
      require(std::any_of(nb.begin(), nb.end(), [&](Vertex w) { return !ev.s.contains(w); }),
              "y must have a neighbor outside S");
      return detail::interior_query(patch, interior, ev.v, {ev.y});
    }
    ConnectionQuery operator()(const events::VertexCutEvent& ev) const {
      return detail::vertex_cut_query(patch, ev);
    }
    ConnectionQuery operator()(const events::EdgeCutEvent& ev) const {
      return detail::edge_cut_query(patch, ev);
    }
    ConnectionQuery operator()(const events::Restricted& ev) const {
      detail::require_real_subset(patch, ev.a, "A");
      require(ev.a.contains(ev.u), "u must belong to A");
      return detail::restricted_query(patch, ev.a, ev.u, ev.b);
    }
  };
  return std::visit(Visitor{patch}, event);
}

/// Exact probability of any event kind.
inline double exact_event_prob(const Patch& patch, const EventSpec& event, double p,
                               const EngineOptions& opts = {}) {
  require_probability(p);
  return count_single(patch.graph(), to_query(patch, event), opts).probability(p);
}

} // namespace sitecut
