#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "oracle.hpp"
#include "sitecut/cutset.hpp"
#include "sitecut/report_io.hpp"

using namespace sitecut;

namespace {

VertexSet line_set(const Patch& line, std::initializer_list<int> coords) {
  std::vector<Vertex> out;
  for (int x : coords) {
    out.push_back(*line.find_label({x, 0}));
  }
  return VertexSet(out);
}

Edge line_edge(const Patch& line, int a, int b) {
  return Edge(*line.find_label({a, 0}), *line.find_label({b, 0}));
}

std::set<std::pair<Vertex, Vertex>> edge_keys(const EdgeCutset& cut) {
  std::set<std::pair<Vertex, Vertex>> out;
  for (const Edge& e : cut.members) {
    out.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
  }
  return out;
}

// Oracle cut sum: per-member event probabilities by direct enumeration.
double oracle_cut_sum(const Patch& patch, Vertex x, const AnyCutset& cut, double p) {
  double total = 0.0;
  if (const auto* vc = std::get_if<VertexCutset>(&cut)) {
    const std::set<Vertex> members(vc->members.begin(), vc->members.end());
    for (Vertex v : members) {
      total += oracle::vertex_cut_event_prob(patch, x, v, members, p);
    }
  } else {
    const auto& ec = std::get<EdgeCutset>(cut);
    for (const Edge& e : ec.members) {
      total += oracle::edge_cut_event_prob(patch, x, e, edge_keys(ec), p);
    }
  }
  return total;
}

// Oracle enumeration: every subset of the elements that stops x from
// escaping, keeping those from which no single element can be dropped.
std::vector<std::set<Vertex>> oracle_minimal_vertex_cuts(const Patch& patch, Vertex x) {
  const auto a = oracle::adjacency(patch);
  const auto real = patch.real_vertices();
  std::vector<std::set<Vertex>> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << real.size()); ++s) {
    std::set<Vertex> cut;
    for (std::size_t i = 0; i < real.size(); ++i) {
      if ((s >> i) & 1U) {
        cut.insert(real[i]);
      }
    }
    if (oracle::escapes(a, x, cut, {})) {
      continue;
    }
    bool minimal = true;
    for (Vertex v : cut) {
      auto smaller = cut;
      smaller.erase(v);
      minimal = minimal && oracle::escapes(a, x, smaller, {});
    }
    if (minimal) {
      out.push_back(cut);
    }
  }
  return out;
}

std::vector<std::set<std::pair<Vertex, Vertex>>> oracle_minimal_edge_cuts(const Patch& patch,
                                                                          Vertex x) {
  const auto a = oracle::adjacency(patch);
  std::vector<std::pair<Vertex, Vertex>> elements;
  for (const Edge& e : patch.graph().edges()) {
    if (!patch.is_ghost(e.u) || !patch.is_ghost(e.v)) {
      elements.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
    }
  }
  std::vector<std::set<std::pair<Vertex, Vertex>>> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << elements.size()); ++s) {
    std::set<std::pair<Vertex, Vertex>> cut;
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if ((s >> i) & 1U) {
        cut.insert(elements[i]);
      }
    }
    if (oracle::escapes(a, x, {}, cut)) {
      continue;
    }
    bool minimal = true;
    for (const auto& e : cut) {
      auto smaller = cut;
      smaller.erase(e);
      minimal = minimal && oracle::escapes(a, x, {}, smaller);
    }
    if (minimal) {
      out.push_back(cut);
    }
  }
  return out;
}

std::size_t edge_elements(const Patch& patch) {
  std::size_t m = 0;
  for (const Edge& e : patch.graph().edges()) {
    m += (!patch.is_ghost(e.u) || !patch.is_ghost(e.v)) ? 1 : 0;
  }
  return m;
}

} // namespace

TEST(CutEvents, Examples) {
  const Patch l = gen_line(2);
  const VertexCutset vc{line_set(l, {-1, 1})};
  const Vertex plus = *l.find_label({1, 0});
  EXPECT_NEAR(vertex_cut_event_prob(l, l.root(), plus, vc, 0.5), 0.25, 1e-15);
  EXPECT_NEAR(vertex_cut_event_prob(l, l.root(), l.root(), VertexCutset{VertexSet{l.root()}}, 0.3),
              0.3, 1e-15);

  const EdgeCutset ec({line_edge(l, -1, 0), line_edge(l, 0, 1)});
  EXPECT_NEAR(edge_cut_event_prob(l, l.root(), line_edge(l, 0, 1), ec, 0.5), 0.25, 1e-15);

  // 0 blocks every path from -1 to +1
  const Patch l3 = gen_line(3);
  const Vertex m1 = *l3.find_label({-1, 0});
  const VertexCutset blocked{line_set(l3, {-2, 0, 1})};
  EXPECT_EQ(vertex_cut_event_prob(l3, m1, *l3.find_label({1, 0}), blocked, 0.7), 0.0);

  // three-vertex line: the root edge with no other cut edge touching it
  const Patch l1 = gen_line(1);
  const Vertex left = *l1.find_label({-1, 0});
  const EdgeCutset pair({Edge(left, l1.root()), Edge(l1.root(), *l1.find_label({1, 0}))});
  for (double p : {0.1, 0.5, 0.9}) {
    // the ghost endpoint carries no state, so only the root must be open
    EXPECT_NEAR(edge_cut_event_prob(l1, l1.root(), Edge(left, l1.root()), pair, p), p, 1e-15);
  }
  const Patch l2b = gen_line(3);
  const EdgeCutset inner({line_edge(l2b, -1, 0), line_edge(l2b, 0, 1)});
  for (double p : {0.1, 0.5, 0.9}) {
    EXPECT_GE(edge_cut_event_prob(l2b, l2b.root(), line_edge(l2b, 0, 1), inner, p), p * p - 1e-15);
  }
}

TEST(CutEvents, RejectInvalidCuts) {
  const Patch l = gen_line(2);
  const VertexCutset half{line_set(l, {1})};
  EXPECT_THROW(vertex_cut_event_prob(l, l.root(), *l.find_label({1, 0}), half, 0.5), ContractError);
  const VertexCutset vc{line_set(l, {-1, 1})};
  EXPECT_THROW(vertex_cut_event_prob(l, l.root(), l.root(), vc, 0.5), ContractError);
  const EdgeCutset one({line_edge(l, 0, 1)});
  EXPECT_THROW(edge_cut_event_prob(l, l.root(), line_edge(l, 0, 1), one, 0.5), ContractError);
}

TEST(CutSum, Examples) {
  const Patch l = gen_line(2);
  const auto r = cut_sum(l, l.root(), VertexCutset{line_set(l, {-1, 1})}, 0.5);
  EXPECT_NEAR(r.total, 0.5, 1e-15);
  ASSERT_EQ(r.terms.size(), 2u);
  EXPECT_EQ(r.total, r.terms[0] + r.terms[1]);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.kind, CutKind::vertex);

  for (double p : {0.0, 0.25, 1.0}) {
    EXPECT_NEAR(cut_sum(l, l.root(), VertexCutset{VertexSet{l.root()}}, p).total, p, 1e-15);
  }
  EXPECT_EQ(members_string(VertexCutset{line_set(l, {-1, 1})}),
            std::to_string(*l.find_label({-1, 0})) + ";" + std::to_string(*l.find_label({1, 0})));
}

TEST(CutSum, MatchesOracleOnRandomPatches) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 60; ++t) {
    const Patch patch = oracle::random_patch(rng, 2 + t % 6);
    const Vertex x = patch.root();
    const double p = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    for (CutKind kind : {CutKind::vertex, CutKind::edge}) {
      if (kind == CutKind::edge && edge_elements(patch) > 14) {
        continue;
      }
      for (const auto& cut : enumerate_minimal_cutsets(patch, x, kind)) {
        const auto r = cut_sum(patch, x, cut, p);
        EXPECT_NEAR(r.total, oracle_cut_sum(patch, x, cut, p), 1e-12);
        for (double term : r.terms) {
          EXPECT_GE(term, 0.0);
          EXPECT_LE(term, 1.0);
        }
      }
    }
  }
}

TEST(CutSum, FallsBackToMonteCarloWhenAllowed) {
  const Patch grid = gen_grid2d(3);
  std::vector<Vertex> ring;
  for (Vertex v : grid.real_vertices()) {
    const auto l = grid.graph().labels()[v];
    if (std::max(std::abs(l.x), std::abs(l.y)) == 2) {
      ring.push_back(v);
    }
  }
  const VertexCutset cut{VertexSet(ring)};
  CutSumOptions tight;
  tight.engine.cap = 8;
  EXPECT_THROW(cut_sum(grid, grid.root(), cut, 0.5, tight), SizeError);
  tight.allow_mc = true;
  tight.mc.samples = 20000;
  const auto est = cut_sum(grid, grid.root(), cut, 0.5, tight);
  EXPECT_FALSE(est.exact);
  EXPECT_GT(est.std_error, 0.0);
  const double exact = cut_sum(grid, grid.root(), cut, 0.5, CutSumOptions{{26}, false, {}}).total;
  EXPECT_NEAR(est.total, exact, 4.0 * est.std_error + 1e-12);
}

TEST(Enumerate, LineExamples) {
  const Patch l = gen_line(2);
  const auto vcuts = enumerate_minimal_cutsets(l, l.root(), CutKind::vertex);
  ASSERT_EQ(vcuts.size(), 2u);
  EXPECT_EQ(std::get<VertexCutset>(vcuts[0]).members, VertexSet{l.root()});
  EXPECT_EQ(std::get<VertexCutset>(vcuts[1]).members, line_set(l, {-1, 1}));

  const auto ecuts = enumerate_minimal_cutsets(l, l.root(), CutKind::edge);
  ASSERT_EQ(ecuts.size(), 4u);
  std::set<std::vector<Edge>> got;
  for (const auto& c : ecuts) {
    got.insert(std::get<EdgeCutset>(c).members);
  }
  for (auto left : {line_edge(l, -1, 0), line_edge(l, -2, -1)}) {
    for (auto right : {line_edge(l, 0, 1), line_edge(l, 1, 2)}) {
      EXPECT_TRUE(got.contains(EdgeCutset({left, right}).members));
    }
  }
}

TEST(Enumerate, StarCenter) {
  std::vector<Edge> edges;
  for (Vertex leaf = 1; leaf <= 5; ++leaf) {
    edges.emplace_back(0, leaf);
  }
  const Patch star(build_graph(edges, 6), 0, {1, 2, 3, 4, 5});
  const auto cuts = enumerate_minimal_cutsets(star, 0, CutKind::vertex);
  ASSERT_EQ(cuts.size(), 1u);
  EXPECT_EQ(std::get<VertexCutset>(cuts[0]).members, VertexSet{0});
}

TEST(Enumerate, CapIsEnforced) {
  const Patch grid = gen_grid2d(3);
  EXPECT_THROW(enumerate_minimal_cutsets(grid, grid.root(), CutKind::vertex), SizeError);
  EXPECT_NO_THROW(enumerate_minimal_cutsets(gen_grid2d(2), gen_grid2d(2).root(), CutKind::vertex));
}

TEST(Enumerate, MatchesOracleAndIsMinimal) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 80; ++t) {
    const Patch patch = oracle::random_patch(rng, 2 + t % 7, 0.25);
    const Vertex x = patch.real_vertices()[rng() % patch.real_count()];

    const auto vcuts = enumerate_minimal_cutsets(patch, x, CutKind::vertex);
    std::set<std::set<Vertex>> got;
    for (const auto& c : vcuts) {
      const auto& m = std::get<VertexCutset>(c).members;
      got.insert(std::set<Vertex>(m.begin(), m.end()));
      EXPECT_TRUE(separates_vertex(patch, x, std::get<VertexCutset>(c)));
      for (Vertex v : m) {
        std::vector<Vertex> rest;
        std::copy_if(m.begin(), m.end(), std::back_inserter(rest), [v](Vertex u) { return u != v; });
        EXPECT_FALSE(separates_vertex(patch, x, VertexCutset{VertexSet(rest)}));
      }
    }
    const auto expected = oracle_minimal_vertex_cuts(patch, x);
    EXPECT_EQ(got, std::set<std::set<Vertex>>(expected.begin(), expected.end()));
    EXPECT_EQ(vcuts.size(), expected.size());

    if (edge_elements(patch) > 14) {
      continue;
    }
    const auto ecuts = enumerate_minimal_cutsets(patch, x, CutKind::edge);
    using EdgeCutKeys = std::set<std::set<std::pair<Vertex, Vertex>>>;
    EdgeCutKeys egot;
    for (const auto& c : ecuts) {
      egot.insert(edge_keys(std::get<EdgeCutset>(c)));
    }
    const auto eexpected = oracle_minimal_edge_cuts(patch, x);
    EXPECT_EQ(egot, EdgeCutKeys(eexpected.begin(), eexpected.end()));
    EXPECT_EQ(ecuts.size(), eexpected.size());
  }
}

TEST(Enumerate, OrderIsDeterministic) {
  const Patch grid = gen_grid2d(2);
  const auto a = enumerate_minimal_cutsets(grid, grid.root(), CutKind::vertex);
  const auto b = enumerate_minimal_cutsets(grid, grid.root(), CutKind::vertex);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(members_string(a[i]), members_string(b[i]));
    if (i > 0) {
      EXPECT_FALSE(detail::cut_order(a[i], a[i - 1]));
    }
  }
}

TEST(LevelCuts, LineAndGrid) {
  const Patch l = gen_line(3);
  const auto v = level_cutsets(l, l.root(), CutKind::vertex);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(std::get<VertexCutset>(v[0]).members, VertexSet{l.root()});
  EXPECT_EQ(std::get<VertexCutset>(v[2]).members, line_set(l, {-2, 2}));
  const auto e = level_cutsets(l, l.root(), CutKind::edge);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(std::get<EdgeCutset>(e[2]).members,
            EdgeCutset({line_edge(l, -3, -2), line_edge(l, 2, 3)}).members);

  const Patch grid = gen_grid2d(3);
  const auto rings = level_cutsets(grid, grid.root(), CutKind::vertex);
  // distance 3 misses (2,0), which touches the ghost ring
  ASSERT_EQ(rings.size(), 3u);
  for (std::size_t k = 1; k < rings.size(); ++k) {
    EXPECT_EQ(std::get<VertexCutset>(rings[k]).members.size(), 4 * k);
  }
  for (const auto& c : level_cutsets(grid, grid.root(), CutKind::edge)) {
    EXPECT_TRUE(validate_edge_cutset(grid, std::get<EdgeCutset>(c)));
  }
}

TEST(InfCutSum, Examples) {
  const Patch l = gen_line(2);
  const auto r = inf_cut_sum(l, l.root(), CutKind::vertex, 0.5, CutFamily::enumerated);
  EXPECT_NEAR(r.min_total, 0.5, 1e-15);
  EXPECT_EQ(r.family_size, 2u);
  EXPECT_EQ(r.family, CutFamily::enumerated);
  // ties keep the first cut in family order
  EXPECT_EQ(std::get<VertexCutset>(r.argmin_cut).members, VertexSet{l.root()});

  for (auto family : {CutFamily::enumerated, CutFamily::level_cuts}) {
    for (auto kind : {CutKind::vertex, CutKind::edge}) {
      EXPECT_EQ(inf_cut_sum(gen_line(3), gen_line(3).root(), kind, 0.0, family).min_total, 0.0);
    }
  }

  const Patch l4 = gen_line(4);
  const auto ev = inf_cut_sum(l4, l4.root(), CutKind::edge, 0.9, CutFamily::enumerated);
  const auto lv = inf_cut_sum(l4, l4.root(), CutKind::edge, 0.9, CutFamily::level_cuts);
  EXPECT_LE(ev.min_total, lv.min_total + 1e-15);
}

TEST(CutSum, BoundsConnectionAndIsMonotone) {
  std::mt19937_64 rng(55);
  const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
  for (int t = 0; t < 40; ++t) {
    const Patch patch = oracle::random_patch(rng, 2 + t % 7, 0.25);
    const Vertex x = patch.root();
    for (CutKind kind : {CutKind::vertex, CutKind::edge}) {
      if (kind == CutKind::edge && edge_elements(patch) > 14) {
        continue;
      }
      for (const auto& cut : enumerate_minimal_cutsets(patch, x, kind)) {
        double last = -1.0;
        for (double p : grid) {
          const double total = cut_sum(patch, x, cut, p).total;
          EXPECT_LE(conn_frontier_prob(patch, x, p), total + 1e-9);
          EXPECT_GE(total, last - 1e-12);
          last = total;
        }
      }
    }
  }
}

TEST(CutSum, NonMinimalCutsNeverBeatMinimalOnes) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 40; ++t) {
    const Patch patch = oracle::random_patch(rng, 2 + t % 6, 0.25);
    const Vertex x = patch.root();
    for (CutKind kind : {CutKind::vertex, CutKind::edge}) {
      if (kind == CutKind::edge && edge_elements(patch) > 12) {
        continue;
      }
      for (double p : {0.2, 0.6, 0.95}) {
        double min_all = 1e300;
        for (const auto& cut : enumerate_cutsets(patch, x, kind, false)) {
          min_all = std::min(min_all, cut_sum(patch, x, cut, p).total);
        }
        const double min_minimal =
            inf_cut_sum(patch, x, kind, p, CutFamily::enumerated).min_total;
        EXPECT_NEAR(min_all, min_minimal, 1e-12);
      }
    }
  }
}

TEST(CutCsv, RowFormat) {
  const Patch l = gen_line(2);
  std::ostringstream os;
  os << kCutCsvHeader << '\n';
  write_cut_row(os, cut_sum(l, l.root(), VertexCutset{line_set(l, {-1, 1})}, 0.5));
  const std::string members =
      std::to_string(*l.find_label({-1, 0})) + ";" + std::to_string(*l.find_label({1, 0}));
  EXPECT_EQ(os.str(), "kind,p,cut_members,total\nvertex,0.5," + members + ",0.5\n");
}
