#pragma once

#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sitecut/exact.hpp"
#include "sitecut/graph.hpp"
#include "sitecut/monte_carlo.hpp"

namespace sitecut {

enum class CertMethod { exact, monte_carlo };

inline const char* to_string(CertMethod m) {
  return m == CertMethod::exact ? "exact" : "monte_carlo";
}

/// Witness that p lies below the phi-threshold at `center`: a finite set S
/// with center in its interior and phi_p(S) <= 1 - epsilon0.
struct Certificate {
  double p = 0.0;
  double epsilon0 = 0.01;
  Vertex center = 0;
  VertexSet set;
  double phi_value = 0.0;
  CertMethod method = CertMethod::exact;
  // monte_carlo only; such certificates are not rigorous
  double phi_std_error = 0.0;
  std::uint64_t mc_samples = 0;
  std::uint64_t mc_seed = 0;
  double sigma_margin = 0.0;

  bool rigorous() const { return method == CertMethod::exact; }
};

struct GrowOptions {
  double epsilon0 = 0.01;
  std::size_t budget = 64;             // max |S|
  std::size_t exact_interior_cap = 16; // exact phi while the enumerated interior fits
  bool allow_mc = false;               // beyond the cap, fall back to mc_phi
  McOptions mc{2000, kDefaultSeed, 1, 1};
  double sigma_margin = 4.0;
  unsigned threads = 1; // parallel candidate evaluation
};

struct GrowResult {
  std::optional<Certificate> certificate;
  double best_phi = 1.0;
  VertexSet best_set;
  std::size_t steps = 0;
};

namespace detail {

struct PhiEval {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

inline std::optional<PhiEval> evaluate_phi(const Patch& patch, const VertexSet& s, Vertex v,
                                           double p, const GrowOptions& opts) {
  try {
    const auto r = phi(patch, s, v, p, EngineOptions{opts.exact_interior_cap, 1});
    return PhiEval{r.value, 0.0, true};
  } catch (const SizeError&) {
    if (!opts.allow_mc) {
      return std::nullopt;
    }
  }
  const auto r = mc_phi(patch, s, v, p, opts.mc);
  return PhiEval{r.total.mean, r.total.std_error, false};
}

inline bool meets(const PhiEval& e, const GrowOptions& opts) {
  const double threshold = 1.0 - opts.epsilon0;
  return e.exact ? e.value <= threshold : e.value + opts.sigma_margin * e.std_error <= threshold;
}

} // namespace detail

/// Greedy search for a certifying set: start from the closed neighborhood of
/// v and repeatedly add the outside neighbor giving the smallest phi (lowest
/// index on ties), until phi <= 1 - epsilon0 or |S| reaches the budget.
inline GrowResult grow_set(const Patch& patch, Vertex v, double p, const GrowOptions& opts = {}) {
  require_probability(p);
  require(v < patch.vertex_count() && !patch.is_ghost(v), "v must be a non-ghost vertex");
  require(opts.epsilon0 > 0.0 && opts.epsilon0 < 1.0, "epsilon0 must lie in (0,1)");
  const Graph& g = patch.graph();
  require(opts.budget >= 1 + g.degree(v), "budget must be at least 1 + deg(v)");

  GrowResult result;
  std::vector<Vertex> start{v};
  for (Vertex w : g.neighbors(v)) {
    if (patch.is_ghost(w)) {
      // v is frontier-adjacent: no ghost-free set has v in its interior
      result.best_set = VertexSet{v};
      return result;
    }
    start.push_back(w);
  }
  VertexSet s(std::move(start));
  auto current = detail::evaluate_phi(patch, s, v, p, opts);
  if (!current) {
    throw SizeError("phi of the closed neighborhood exceeds the exact cap and Monte Carlo is disabled");
  }
  result.best_phi = current->value;
  result.best_set = s;

  for (;;) {
    if (current->value < result.best_phi) {
      result.best_phi = current->value;
      result.best_set = s;
    }
    if (detail::meets(*current, opts)) {
      Certificate c;
      c.p = p;
      c.epsilon0 = opts.epsilon0;
      c.center = v;
      c.set = s;
      c.phi_value = current->value;
      if (!current->exact) {
        c.method = CertMethod::monte_carlo;
        c.phi_std_error = current->std_error;
        c.mc_samples = opts.mc.samples;
        c.mc_seed = opts.mc.seed;
        c.sigma_margin = opts.sigma_margin;
      }
      result.certificate = std::move(c);
      return result;
    }
    if (s.size() >= opts.budget) {
      return result;
    }
    std::vector<Vertex> candidates;
    for (Vertex u : s) {
      for (Vertex w : g.neighbors(u)) {
        if (!patch.is_ghost(w) && !s.contains(w)) {
          candidates.push_back(w);
        }
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.empty()) {
      return result;
    }

    std::vector<std::optional<detail::PhiEval>> evals(candidates.size());
    if (opts.threads > 1) {
      std::vector<std::future<std::optional<detail::PhiEval>>> futures;
      for (Vertex c : candidates) {
        futures.push_back(std::async(std::launch::async, [&, c] {
          return detail::evaluate_phi(patch, s.with(c), v, p, opts);
        }));
      }
      for (std::size_t i = 0; i < futures.size(); ++i) {
        evals[i] = futures[i].get();
      }
    } else {
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        evals[i] = detail::evaluate_phi(patch, s.with(candidates[i]), v, p, opts);
      }
    }
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (evals[i] && (!pick || evals[i]->value < evals[*pick]->value)) {
        pick = i;
      }
    }
    if (!pick) {
      return result;
    }
    s = s.with(candidates[*pick]);
    current = evals[*pick];
    ++result.steps;
  }
}

struct BisectResult {
  double certified_p = 0.0;
  Certificate certificate;
  int radius = 0;
};

/// Largest p (to within tol) at which some patch of the family, tried in
/// increasing radius order, yields a certificate at its root.
inline BisectResult certify_bisect(const std::function<Patch(int)>& family,
                                   const std::vector<int>& radii, double p_lo, double p_hi,
                                   double tol, const GrowOptions& opts = {}) {
  require(0.0 < p_lo && p_lo < p_hi && p_hi < 1.0, "need 0 < p_lo < p_hi < 1");
  require(tol > 0.0, "tolerance must be positive");
  require(!radii.empty(), "radius list must not be empty");
  std::vector<int> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  std::map<int, Patch> patches;
  for (int r : sorted) {
    patches.emplace(r, family(r));
  }

  double best_seen = 1.0;
  auto attempt = [&](double p) -> std::optional<BisectResult> {
    for (int r : sorted) {
      const Patch& patch = patches.at(r);
      auto res = grow_set(patch, patch.root(), p, opts);
      best_seen = std::min(best_seen, res.best_phi);
      if (res.certificate) {
        return BisectResult{p, *res.certificate, r};
      }
    }
    return std::nullopt;
  };

  auto low = attempt(p_lo);
  if (!low) {
    throw ContractError("no certificate at p_lo = " + std::to_string(p_lo) +
                        " (best phi " + std::to_string(best_seen) + ")");
  }
  if (auto high = attempt(p_hi)) {
    return *high;
  }
  double lo = p_lo;
  double hi = p_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (auto r = attempt(mid)) {
      lo = mid;
      low = std::move(r);
    } else {
      hi = mid;
    }
  }
  return *low;
}

/// 1 - ((1-p)/(1-p1))^(1-epsilon1): the percolation lower bound obtained by
/// integrating the differential inequality from p1 to p.
inline double integrated_bound(double p, double p1, double epsilon1) {
  require(0.0 < p1 && p1 <= p && p < 1.0, "need 0 < p1 <= p < 1");
  require(epsilon1 >= 0.0 && epsilon1 < 1.0, "epsilon1 must lie in [0,1)");
  return 1.0 - std::pow((1.0 - p) / (1.0 - p1), 1.0 - epsilon1);
}

struct IntegratedBoundReport {
  bool hypothesis_verified = false;
  double min_phi_on_grid = 0.0;
  double bound = 0.0;
  double actual = 0.0;
  bool holds = false;
};

/// Checks P_p(w <-> frontier) >= integrated_bound(p, p1, epsilon1) on the
/// patch, after verifying inf_S phi_{p'}^w(S) >= 1 - epsilon1 on a grid of p'
/// in [p1, p]. Without the hypothesis no claim is made.
inline IntegratedBoundReport check_integrated_bound(const Patch& patch, Vertex w, double p,
                                                    double p1, double epsilon1,
                                                    int grid_points = 5,
                                                    const EngineOptions& engine = {}) {
  IntegratedBoundReport r;
  r.bound = integrated_bound(p, p1, epsilon1);
  require(grid_points >= 1, "grid needs at least one point");
  r.min_phi_on_grid = 1.0;
  for (int i = 0; i < grid_points; ++i) {
    const double pp = grid_points == 1 ? p1 : p1 + (p - p1) * i / (grid_points - 1);
    r.min_phi_on_grid =
        std::min(r.min_phi_on_grid, exhaustive_inf_phi(patch, w, pp, engine).min_value);
  }
  r.hypothesis_verified = r.min_phi_on_grid >= 1.0 - epsilon1;
  r.actual = conn_frontier_prob(patch, w, p, engine);
  r.holds = r.hypothesis_verified && r.actual >= r.bound - 1e-9;
  return r;
}

} // namespace sitecut
