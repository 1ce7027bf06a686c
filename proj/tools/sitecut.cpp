// sitecut: command-line front end for the percolation toolkit.
//
// Every run echoes its fully resolved options ahead of the results, so an
// output file carries what is needed to reproduce it.

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sitecut/report_io.hpp"
#include "sitecut/sitecut.hpp"

using namespace sitecut;

namespace {

struct RunSpec {
  std::string subcommand;
  std::string graph = "line";
  int radius = 4;
  std::vector<int> radii;
  int levels = 2; // fan depth N
  std::string set;
  std::string v = "root";
  std::string y;
  std::string target;
  std::string cut;
  std::string kind = "vertex";
  std::string family = "enumerated";
  std::string event = "frontier";
  std::string op = "verify34";
  std::vector<double> p;
  std::string p_grid;
  double p_lo = 0.3;
  double p_hi = 0.6;
  double tol = 1e-3;
  double h = 1e-4;
  double epsilon0 = 0.01;
  std::size_t budget = 64;
  std::size_t interior_cap = 16;
  std::size_t cap = 24;
  bool allow_mc = false;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t samples = 100000;
  std::string format;
  std::string out;
  unsigned threads = 1;
  bool deterministic = false;
};

const std::map<std::string, std::string> kDefaultFormat = {
    {"phi", "json"},   {"certify", "json"}, {"mc", "csv"},  {"cutsum", "csv"},
    {"infcut", "json"}, {"russo", "json"},  {"fan", "csv"}, {"trend", "csv"}};

std::vector<std::pair<std::string, std::string>> echo(const RunSpec& s) {
  auto num = [](double x) { return format_number(x); };
  std::string ps;
  for (double x : s.p) {
    ps += (ps.empty() ? "" : ",") + num(x);
  }
  std::string rs;
  for (int r : s.radii) {
    rs += (rs.empty() ? "" : ",") + std::to_string(r);
  }
  return {{"subcommand", s.subcommand},
          {"graph", s.graph},
          {"radius", std::to_string(s.radius)},
          {"radii", rs},
          {"N", std::to_string(s.levels)},
          {"set", s.set},
          {"v", s.v},
          {"y", s.y},
          {"target", s.target},
          {"cut", s.cut},
          {"kind", s.kind},
          {"family", s.family},
          {"event", s.event},
          {"op", s.op},
          {"p", ps},
          {"p_lo", num(s.p_lo)},
          {"p_hi", num(s.p_hi)},
          {"tol", num(s.tol)},
          {"h", num(s.h)},
          {"epsilon0", num(s.epsilon0)},
          {"budget", std::to_string(s.budget)},
          {"interior_cap", std::to_string(s.interior_cap)},
          {"cap", std::to_string(s.cap)},
          {"allow_mc", s.allow_mc ? "true" : "false"},
          {"seed", std::to_string(s.seed)},
          {"samples", std::to_string(s.samples)},
          {"format", s.format},
          {"threads", std::to_string(s.threads)},
          {"deterministic", s.deterministic ? "true" : "false"}};
}

// ---------------------------------------------------------------------------
// Argument parsing helpers

long parse_int(const std::string& text) {
  long value = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  require(res.ec == std::errc{} && res.ptr == end, "not an integer: '" + text + "'");
  return value;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  require(res.ec == std::errc{} && res.ptr == end, "not a number: '" + text + "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

struct Loaded {
  Patch patch;
  std::optional<FanPatch> fan;
  bool line = false;
};

Patch make_patch(const std::string& graph, int radius) {
  if (graph == "line") {
    return gen_line(radius);
  }
  if (graph == "grid2d") {
    return gen_grid2d(radius);
  }
  if (graph.rfind("tree:", 0) == 0) {
    return gen_tree(static_cast<int>(parse_int(graph.substr(5))), radius);
  }
  throw ContractError("unknown graph generator '" + graph + "'");
}

Loaded load(const RunSpec& s) {
  if (s.graph == "fan") {
    FanPatch fan = fan_patch(s.levels);
    Patch patch = fan.patch;
    return Loaded{std::move(patch), std::move(fan), false};
  }
  if (s.graph.rfind("file:", 0) == 0) {
    std::ifstream in(s.graph.substr(5));
    require(static_cast<bool>(in), "cannot open graph file '" + s.graph.substr(5) + "'");
    return Loaded{read_patch(in), std::nullopt, false};
  }
  return Loaded{make_patch(s.graph, s.radius), std::nullopt, s.graph == "line"};
}

/// "root", "x:y" (label), or an integer: a line coordinate on line graphs,
/// a vertex index elsewhere.
Vertex parse_vertex(const Loaded& g, const std::string& token) {
  if (token == "root") {
    return g.patch.root();
  }
  if (const auto colon = token.find(':'); colon != std::string::npos) {
    const Label l{static_cast<int>(parse_int(token.substr(0, colon))),
                  static_cast<int>(parse_int(token.substr(colon + 1)))};
    const auto v = g.patch.find_label(l);
    require(v.has_value(), "no vertex labelled " + token);
    return *v;
  }
  const long value = parse_int(token);
  if (g.line) {
    const auto v = g.patch.find_label(Label{static_cast<int>(value), 0});
    require(v.has_value(), "no line vertex at coordinate " + token);
    return *v;
  }
  require(value >= 0 && static_cast<std::size_t>(value) < g.patch.vertex_count(),
          "vertex index out of range: " + token);
  return static_cast<Vertex>(value);
}

/// Comma-separated vertices, ranges a..b (line coordinates or indices), or
/// ball:R around the center (non-ghost vertices within graph distance R).
VertexSet parse_set(const Loaded& g, const std::string& text, Vertex center) {
  std::vector<Vertex> out;
  for (const auto& token : split(text, ',')) {
    if (token.rfind("ball:", 0) == 0) {
      const long r = parse_int(token.substr(5));
      require(r >= 0, "ball radius must be nonnegative");
      std::vector<long> dist(g.patch.vertex_count(), -1);
      std::vector<Vertex> queue{center};
      dist[center] = 0;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const Vertex u = queue[head];
        out.push_back(u);
        if (dist[u] == r) {
          continue;
        }
        for (Vertex w : g.patch.graph().neighbors(u)) {
          if (dist[w] < 0 && !g.patch.is_ghost(w)) {
            dist[w] = dist[u] + 1;
            queue.push_back(w);
          }
        }
      }
    } else if (const auto dots = token.find("..", 1); dots != std::string::npos) {
      const long lo = parse_int(token.substr(0, dots));
      const long hi = parse_int(token.substr(dots + 2));
      require(lo <= hi, "empty range " + token);
      for (long x = lo; x <= hi; ++x) {
        out.push_back(parse_vertex(g, std::to_string(x)));
      }
    } else {
      out.push_back(parse_vertex(g, token));
    }
  }
  return VertexSet(std::move(out));
}

/// Edges as u-v index pairs separated by ';' or ','.
EdgeCutset parse_edges(const std::string& text) {
  std::vector<Edge> out;
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ';', ',');
  for (const auto& token : split(normalized, ',')) {
    const auto dash = token.find('-');
    require(dash != std::string::npos, "edge must be written u-v: " + token);
    const long u = parse_int(token.substr(0, dash));
    const long v = parse_int(token.substr(dash + 1));
    require(u >= 0 && v >= 0 && u != v, "bad edge " + token);
    out.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return EdgeCutset(std::move(out));
}

AnyCutset parse_cut(const Loaded& g, const RunSpec& s) {
  require(!s.cut.empty(), "--cut is required");
  if (s.kind == "vertex") {
    std::string normalized = s.cut;
    std::replace(normalized.begin(), normalized.end(), ';', ',');
    return VertexCutset{parse_set(g, normalized, g.patch.root())};
  }
  require(s.kind == "edge", "--kind must be vertex or edge");
  return parse_edges(s.cut);
}

CutKind parse_kind(const std::string& k) {
  require(k == "vertex" || k == "edge", "--kind must be vertex or edge");
  return k == "vertex" ? CutKind::vertex : CutKind::edge;
}

/// --p values followed by the --p-grid expansion lo:hi:count.
std::vector<double> p_values(const RunSpec& s) {
  std::vector<double> out = s.p;
  if (!s.p_grid.empty()) {
    const auto parts = split(s.p_grid, ':');
    require(parts.size() == 3, "--p-grid must be lo:hi:count");
    const double lo = parse_double(parts[0]);
    const double hi = parse_double(parts[1]);
    const long n = parse_int(parts[2]);
    require(n >= 1, "--p-grid count must be positive");
    for (long i = 0; i < n; ++i) {
      out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
  }
  require(!out.empty(), "at least one --p value is required");
  for (double p : out) {
    require_probability(p);
  }
  return out;
}

McOptions mc_options(const RunSpec& s) {
  McOptions mc;
  mc.samples = s.samples;
  mc.seed = s.seed;
  mc.shards = s.threads;
  mc.threads = s.threads;
  return mc;
}

EngineOptions engine(const RunSpec& s) { return EngineOptions{s.cap, s.threads}; }

// ---------------------------------------------------------------------------
// Output

class Table {
public:
  explicit Table(std::string header) : header_(std::move(header)) {}
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  void write(std::ostream& os) const {
    os << header_ << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        os << (i ? "," : "") << r[i];
      }
      os << '\n';
    }
  }

private:
  std::string header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Output {
  Table table{""};
  Json json = Json::array();
};

std::string num(double x) { return format_number(x); }

// ---------------------------------------------------------------------------
// Subcommands

Output run_phi(const RunSpec& s) {
  const Loaded g = load(s);
  const Vertex v = parse_vertex(g, s.v);
  require(!s.set.empty(), "--set is required");
  const VertexSet set = parse_set(g, s.set, v);
  Output o{Table("p,center,set_size,value,degenerate"), Json::array()};
  for (double p : p_values(s)) {
    const PhiReport r = phi(g.patch, set, v, p, engine(s));
    o.table.row({num(p), std::to_string(v), std::to_string(set.size()), num(r.value),
                 r.degenerate ? "true" : "false"});
    o.json.push_back(to_json(r));
  }
  return o;
}

Output run_certify(const RunSpec& s) {
  GrowOptions opts;
  opts.epsilon0 = s.epsilon0;
  opts.budget = s.budget;
  opts.exact_interior_cap = s.interior_cap;
  opts.allow_mc = s.allow_mc;
  opts.mc = McOptions{std::min<std::uint64_t>(s.samples, 100000), s.seed, 1, 1};
  opts.threads = s.threads;
  std::vector<int> radii = s.radii.empty() ? std::vector<int>{s.radius} : s.radii;
  std::function<Patch(int)> family;
  if (s.graph == "fan") {
    family = [](int r) { return fan_patch(r).patch; };
  } else if (s.graph.rfind("file:", 0) == 0) {
    const Patch fixed = load(s).patch;
    family = [fixed](int) { return fixed; };
    radii = {0};
  } else {
    family = [graph = s.graph](int r) { return make_patch(graph, r); };
  }
  const BisectResult r = certify_bisect(family, radii, s.p_lo, s.p_hi, s.tol, opts);
  Output o{Table("certified_p,radius,center,set_size,phi_value,method"), Json::array()};
  o.table.row({num(r.certified_p), std::to_string(r.radius), std::to_string(r.certificate.center),
               std::to_string(r.certificate.set.size()), num(r.certificate.phi_value),
               to_string(r.certificate.method)});
  o.json.push_back(Json{{"certified_p", require_finite(r.certified_p)},
                        {"radius", r.radius},
                        {"certificate", to_json(r.certificate)}});
  return o;
}

EventSpec parse_event(const Loaded& g, const RunSpec& s) {
  const Vertex v = parse_vertex(g, s.v);
  if (s.event == "frontier") {
    return events::FrontierConn{v};
  }
  if (s.event == "interior") {
    require(!s.set.empty() && !s.y.empty(), "interior events need --set and --y");
    return events::InteriorConn{parse_set(g, s.set, v), v, parse_vertex(g, s.y)};
  }
  if (s.event == "restricted") {
    require(!s.set.empty() && !s.target.empty(), "restricted events need --set and --target");
    return events::Restricted{parse_set(g, s.set, v), v, parse_set(g, s.target, v)};
  }
  throw ContractError("--event must be frontier, interior or restricted");
}

Output run_mc(const RunSpec& s) {
  const Loaded g = load(s);
  const EventSpec ev = parse_event(g, s);
  Output o{Table(kMcCsvHeader), Json::array()};
  for (double p : p_values(s)) {
    const MCEstimate e = mc_event_prob(g.patch, ev, p, mc_options(s));
    o.table.row({event_name(ev), num(p), std::to_string(e.samples), std::to_string(e.seed),
                 num(e.mean), num(e.std_error)});
    Json j{{"event", event_name(ev)}, {"p", p}};
    j.update(to_json(e));
    o.json.push_back(j);
  }
  return o;
}

Output run_cutsum(const RunSpec& s) {
  const Loaded g = load(s);
  const Vertex x = parse_vertex(g, s.v);
  parse_kind(s.kind);
  const AnyCutset cut = parse_cut(g, s);
  CutSumOptions opts{engine(s), s.allow_mc, mc_options(s)};
  Output o{Table(kCutCsvHeader), Json::array()};
  for (double p : p_values(s)) {
    const CutSumReport r = cut_sum(g.patch, x, cut, p, opts);
    o.table.row({to_string(r.kind), num(p), members_string(r.cut), num(r.total)});
    o.json.push_back(to_json(r));
  }
  return o;
}

Output run_infcut(const RunSpec& s) {
  const Loaded g = load(s);
  const Vertex x = parse_vertex(g, s.v);
  const CutKind kind = parse_kind(s.kind);
  require(s.family == "enumerated" || s.family == "level", "--family must be enumerated or level");
  const CutFamily family = s.family == "enumerated" ? CutFamily::enumerated : CutFamily::level_cuts;
  CutSumOptions opts{engine(s), false, {}};
  Output o{Table("kind,family,p,family_size,min_total,argmin_cut"), Json::array()};
  for (double p : p_values(s)) {
    const InfCutResult r = inf_cut_sum(g.patch, x, kind, p, family, opts);
    o.table.row({to_string(kind), to_string(family), num(p), std::to_string(r.family_size),
                 num(r.min_total), members_string(r.argmin_cut)});
    o.json.push_back(Json{{"kind", to_string(kind)},
                          {"family", to_string(family)},
                          {"p", p},
                          {"family_size", r.family_size},
                          {"min_total", require_finite(r.min_total)},
                          {"argmin_cut", members_string(r.argmin_cut)}});
  }
  return o;
}

Output run_russo(const RunSpec& s) {
  const Loaded g = load(s);
  const Vertex v = parse_vertex(g, s.v);
  Output o{Table("v,p,h,lhs_fd,rhs_pivotal,gap"), Json::array()};
  for (double p : p_values(s)) {
    const RussoReport r = russo_check(g.patch, v, p, s.h, engine(s));
    o.table.row({std::to_string(v), num(p), num(s.h), num(r.lhs_fd), num(r.rhs_pivotal), num(r.gap)});
    Json j{{"v", v}, {"p", p}, {"h", s.h}};
    j.update(to_json(r));
    o.json.push_back(j);
  }
  return o;
}

Output run_fan(const RunSpec& s) {
  const auto ps = p_values(s);
  if (s.op == "verify34") {
    const Theorem34Report r = verify_theorem34(s.levels, ps, engine(s));
    Output o{Table("cut,level,p,cut_sum,bound,margin,open_bound,open_margin"), Json::array()};
    for (const auto& row : r.rows) {
      const std::string level = row.level ? std::to_string(*row.level) : "na";
      if (row.level) {
        o.table.row({row.cut, level, num(row.p), num(row.cut_sum), num(row.bound), num(row.margin),
                     num(row.open_bound), num(row.open_margin)});
      } else {
        o.table.row({row.cut, level, num(row.p), num(row.cut_sum), "na", "na", "na", "na"});
      }
      Json j{{"cut", row.cut}, {"level", row.level ? Json(*row.level) : Json(nullptr)},
             {"p", row.p}, {"cut_sum", require_finite(row.cut_sum)}};
      if (row.level) {
        j["bound"] = row.bound;
        j["margin"] = row.margin;
        j["open_bound"] = row.open_bound;
        j["open_margin"] = row.open_margin;
      }
      o.json.push_back(j);
    }
    return o;
  }
  if (s.op == "trend") {
    std::vector<int> levels;
    for (int n = 1; n <= s.levels; ++n) {
      levels.push_back(n);
    }
    Output o{Table("N,p,black_conn"), Json::array()};
    for (double p : ps) {
      for (const auto& [n, value] : pc_trend(p, levels)) {
        o.table.row({std::to_string(n), num(p), num(value)});
        o.json.push_back(Json{{"N", n}, {"p", p}, {"black_conn", require_finite(value)}});
      }
    }
    return o;
  }
  if (s.op == "levels") {
    Output o{Table("n,p,black_conn,level_cut_sum"), Json::array()};
    for (double p : ps) {
      for (int n = 1; n <= s.levels; ++n) {
        const double bc = black_conn_exact(n, p);
        const double lc = level_cut_sum_exact(n, p);
        o.table.row({std::to_string(n), num(p), num(bc), num(lc)});
        o.json.push_back(Json{{"n", n}, {"p", p}, {"black_conn", bc}, {"level_cut_sum", lc}});
      }
    }
    return o;
  }
  throw ContractError("--op must be verify34, trend or levels");
}

/// Frontier connection and level-cut infima as the patch grows.
Output run_trend(const RunSpec& s) {
  require(s.graph != "fan" && s.graph.rfind("file:", 0) != 0,
          "trend needs a generator family (line, grid2d, tree:<b>)");
  const std::vector<int> radii = s.radii.empty() ? std::vector<int>{s.radius} : s.radii;
  CutSumOptions opts{engine(s), false, {}};
  Output o{Table("radius,p,frontier_prob,inf_level_vertex_cut,inf_level_edge_cut"), Json::array()};
  for (int r : radii) {
    const Patch patch = make_patch(s.graph, r);
    for (double p : p_values(s)) {
      const double conn = conn_frontier_prob(patch, patch.root(), p, engine(s));
      const double vcut =
          inf_cut_sum(patch, patch.root(), CutKind::vertex, p, CutFamily::level_cuts, opts).min_total;
      const double ecut =
          inf_cut_sum(patch, patch.root(), CutKind::edge, p, CutFamily::level_cuts, opts).min_total;
      o.table.row({std::to_string(r), num(p), num(conn), num(vcut), num(ecut)});
      o.json.push_back(Json{{"radius", r},
                            {"p", p},
                            {"frontier_prob", require_finite(conn)},
                            {"inf_level_vertex_cut", require_finite(vcut)},
                            {"inf_level_edge_cut", require_finite(ecut)}});
    }
  }
  return o;
}

void emit(std::ostream& os, const RunSpec& s, const Output& o) {
  if (s.format == "json") {
    Json run = Json::object();
    for (const auto& [k, v] : echo(s)) {
      run[k] = v;
    }
    const Json doc{{"schema_version", kSchemaVersion},
                   {"engine_version", kEngineVersion},
                   {"run", run},
                   {"results", o.json}};
    os << doc.dump(2) << '\n';
    return;
  }
  os << "# sitecut " << kEngineVersion << " schema_version=" << kSchemaVersion << '\n';
  for (const auto& [k, v] : echo(s)) {
    os << "# " << k << '=' << v << '\n';
  }
  o.table.write(os);
}

void add_common(CLI::App* sub, RunSpec& s) {
  sub->add_option("--graph", s.graph, "line | grid2d | tree:<b> | fan | file:<path>");
  sub->add_option("--radius", s.radius, "generator radius (tree depth)");
  sub->add_option("--radii", s.radii, "radius list for families")->delimiter(',');
  sub->add_option("--N", s.levels, "fan depth");
  sub->add_option("--p", s.p, "probabilities")->delimiter(',');
  sub->add_option("--p-grid", s.p_grid, "lo:hi:count");
  sub->add_option("--seed", s.seed, "master seed");
  sub->add_option("--samples", s.samples, "Monte Carlo samples");
  sub->add_option("--format", s.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", s.out, "output path (default stdout)");
  sub->add_option("--threads", s.threads, "worker threads")->check(CLI::Range(1u, 256u));
  sub->add_option("--cap", s.cap, "exact enumeration cap in free vertices")->check(CLI::Range(1, 62));
  sub->add_flag("--deterministic", s.deterministic, "single-threaded, fixed-order reductions");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Site percolation toolkit on finite patches"};
  app.require_subcommand(1);
  RunSpec s;

  auto* phi_cmd = app.add_subcommand("phi", "phi_p^v(S) on a patch");
  auto* certify_cmd = app.add_subcommand("certify", "bisect for the largest certified p");
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo event estimates");
  auto* cutsum_cmd = app.add_subcommand("cutsum", "cut-event sum of one cutset");
  auto* infcut_cmd = app.add_subcommand("infcut", "minimum cut sum over a cutset family");
  auto* russo_cmd = app.add_subcommand("russo", "Russo identity check");
  auto* fan_cmd = app.add_subcommand("fan", "fan-graph closed forms and cut bounds");
  app.add_subcommand("trend", "connection and level-cut infima versus radius");
  for (auto* sub : app.get_subcommands({})) {
    add_common(sub, s);
  }
  for (auto* sub : {phi_cmd, mc_cmd}) {
    sub->add_option("--set", s.set, "vertices, a..b ranges, x:y labels, ball:R");
  }
  for (auto* sub : {phi_cmd, mc_cmd, cutsum_cmd, infcut_cmd, russo_cmd}) {
    sub->add_option("--v", s.v, "center / start vertex (default root)");
  }
  mc_cmd->add_option("--event", s.event, "frontier | interior | restricted");
  mc_cmd->add_option("--y", s.y, "boundary vertex for interior events");
  mc_cmd->add_option("--target", s.target, "target set for restricted events");
  cutsum_cmd->add_option("--cut", s.cut, "vertex list, or u-v index pairs for edge cuts");
  for (auto* sub : {cutsum_cmd, infcut_cmd}) {
    sub->add_option("--kind", s.kind, "vertex | edge");
    sub->add_flag("--allow-mc", s.allow_mc, "estimate terms beyond the exact cap");
  }
  infcut_cmd->add_option("--family", s.family, "enumerated | level");
  certify_cmd->add_option("--p-lo", s.p_lo);
  certify_cmd->add_option("--p-hi", s.p_hi);
  certify_cmd->add_option("--tol", s.tol);
  certify_cmd->add_option("--epsilon0", s.epsilon0);
  certify_cmd->add_option("--budget", s.budget, "maximum set size");
  certify_cmd->add_option("--interior-cap", s.interior_cap, "exact phi up to this many interior vertices")
      ->check(CLI::Range(1, 24));
  certify_cmd->add_flag("--allow-mc", s.allow_mc, "Monte Carlo phi beyond the exact cap");
  russo_cmd->add_option("--step", s.h, "finite-difference step");
  fan_cmd->add_option("--op", s.op, "verify34 | trend | levels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  s.subcommand = app.get_subcommands().front()->get_name();
  if (s.format.empty()) {
    s.format = kDefaultFormat.at(s.subcommand);
  }
  if (s.deterministic) {
    s.threads = 1;
  }
  const std::map<std::string, std::function<Output(const RunSpec&)>> handlers = {
      {"phi", run_phi},       {"certify", run_certify}, {"mc", run_mc},
      {"cutsum", run_cutsum}, {"infcut", run_infcut},   {"russo", run_russo},
      {"fan", run_fan},       {"trend", run_trend}};

  try {
    const Output o = handlers.at(s.subcommand)(s);
    std::ostringstream buffer;
    emit(buffer, s, o);
    if (s.out.empty()) {
      std::cout << buffer.str();
    } else {
      std::ofstream file(s.out, std::ios::binary);
      require(static_cast<bool>(file), "cannot write '" + s.out + "'");
      file << buffer.str();
    }
  } catch (const SizeError& e) {
    std::cerr << "size error: " << e.what() << '\n';
    return 3;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
