#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "sitecut/enumeration.hpp"
#include "sitecut/events.hpp"
#include "sitecut/exact.hpp"
#include "sitecut/union_find.hpp"

namespace sitecut {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eedULL;

/// Bernoulli source on top of std::mt19937_64, whose output sequence is fixed
/// by the standard. The uniform is built from the top 53 bits so the
/// conversion does not depend on the standard library's distributions.
class BernoulliSource {
public:
  explicit BernoulliSource(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool draw(double p) { return uniform() < p; }

private:
  std::mt19937_64 engine_;
};

/// splitmix64 finaliser; derives independent shard seeds.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t shard) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (shard + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct McOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  unsigned shards = 1;  // part of the result's identity
  unsigned threads = 1; // does not affect results
};

/// Independent Bernoulli(p) states for every non-ghost vertex, drawn in
/// ascending vertex order.
inline Configuration sample_config(const Patch& patch, double p, BernoulliSource& rng) {
  require_probability(p);
  Configuration c(patch);
  for (Vertex v : patch.real_vertices()) {
    c.set(v, rng.draw(p));
  }
  return c;
}

/// Open-cluster label per vertex (closed and ghost vertices get -1), built
/// with union-find over open neighbor pairs.
inline std::vector<long> cluster_labels(const Patch& patch, const Configuration& c) {
  const auto n = patch.vertex_count();
  UnionFind uf(n);
  for (const Edge& e : patch.graph().edges()) {
    if (!patch.is_ghost(e.u) && !patch.is_ghost(e.v) && c.is_open(e.u) && c.is_open(e.v)) {
      uf.unite(e.u, e.v);
    }
  }
  std::vector<long> out(n, -1);
  for (Vertex v = 0; v < n; ++v) {
    if (!patch.is_ghost(v) && c.is_open(v)) {
      out[v] = uf.find(v);
    }
  }
  return out;
}

namespace detail {

struct McTally {
  std::uint64_t samples = 0;
  std::vector<std::uint64_t> hits;
  std::uint64_t hit_sum = 0;   // sum over samples of #groups hit
  std::uint64_t hit_sumsq = 0; // sum of squares of the same

  void merge(const McTally& o) {
    samples += o.samples;
    for (std::size_t k = 0; k < hits.size(); ++k) {
      hits[k] += o.hits[k];
    }
    hit_sum += o.hit_sum;
    hit_sumsq += o.hit_sumsq;
  }
};

inline McTally run_frame(const LocalFrame& frame, double p, std::uint64_t samples,
                         std::uint64_t seed) {
  McTally t;
  t.hits.assign(frame.target_groups.size(), 0);
  t.samples = samples;
  if (!frame.feasible) {
    return t;
  }
  const auto m = frame.size();
  BernoulliSource rng(seed);
  UnionFind uf(m);
  std::vector<std::uint8_t> open(m, 0);
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < m; ++i) {
      open[i] = rng.draw(p) ? 1 : 0;
    }
    if (!open[frame.start]) {
      continue;
    }
    bool ok = true;
    for (auto r : frame.required) {
      ok = ok && open[r];
    }
    if (!ok) {
      continue;
    }
    uf.reset();
    for (std::uint32_t i = 0; i < m; ++i) {
      if (!open[i]) {
        continue;
      }
      for (auto j : frame.adjacency[i]) {
        if (j > i && open[j]) {
          uf.unite(i, j);
        }
      }
    }
    const auto root = uf.find(frame.start);
    std::uint64_t hit_here = 0;
    for (std::size_t k = 0; k < frame.target_groups.size(); ++k) {
      for (auto tv : frame.target_groups[k]) {
        if (open[tv] && uf.find(tv) == root) {
          ++t.hits[k];
          ++hit_here;
          break;
        }
      }
    }
    t.hit_sum += hit_here;
    t.hit_sumsq += hit_here * hit_here;
  }
  return t;
}

/// Shard s draws seed mix_seed(master, s); a single shard uses the master
/// seed itself. Merging integer tallies makes the result independent of the
/// thread count.
inline McTally run_sharded(const LocalFrame& frame, double p, const McOptions& opts) {
  require(opts.samples > 0, "sample count must be positive");
  require(opts.shards >= 1, "shard count must be positive");
  McTally total;
  total.hits.assign(frame.target_groups.size(), 0);
  if (opts.shards == 1) {
    total.merge(run_frame(frame, p, opts.samples, opts.seed));
    return total;
  }
  std::vector<McTally> parts(opts.shards);
  auto run_shard = [&](unsigned s) {
    const std::uint64_t n =
        opts.samples / opts.shards + (s < opts.samples % opts.shards ? 1 : 0);
    parts[s] = run_frame(frame, p, n, mix_seed(opts.seed, s));
  };
  if (opts.threads <= 1) {
    for (unsigned s = 0; s < opts.shards; ++s) {
      run_shard(s);
    }
  } else {
    for (unsigned base = 0; base < opts.shards; base += opts.threads) {
      std::vector<std::thread> pool;
      for (unsigned s = base; s < std::min(opts.shards, base + opts.threads); ++s) {
        pool.emplace_back(run_shard, s);
      }
      for (auto& th : pool) {
        th.join();
      }
    }
  }
  for (const auto& part : parts) {
    total.merge(part);
  }
  return total;
}

inline MCEstimate indicator_estimate(std::uint64_t hits, std::uint64_t samples,
                                     std::uint64_t seed) {
  MCEstimate e;
  e.samples = samples;
  e.seed = seed;
  e.mean = static_cast<double>(hits) / static_cast<double>(samples);
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(samples));
  return e;
}

} // namespace detail

/// Monte Carlo estimate of any event kind.
inline MCEstimate mc_event_prob(const Patch& patch, const EventSpec& event, double p,
                                const McOptions& opts = {}) {
  require_probability(p);
  require(opts.samples > 0, "sample count must be positive");
  const LocalFrame frame = build_frame(patch.graph(), to_query(patch, event));
  const detail::McTally t = detail::run_sharded(frame, p, opts);
  return detail::indicator_estimate(t.hits.front(), t.samples, opts.seed);
}

struct McPhiReport {
  std::vector<std::pair<Vertex, MCEstimate>> terms;
  MCEstimate total;
  bool degenerate = false;
};

/// Estimates every term of phi_p^v(S) from one shared stream of samples.
/// The total's standard error comes from the per-sample count of hit terms.
inline McPhiReport mc_phi(const Patch& patch, const VertexSet& s, Vertex v, double p,
                          const McOptions& opts = {}) {
  require_probability(p);
  require(opts.samples > 0, "sample count must be positive");
  detail::require_real_subset(patch, s, "S");
  require(s.contains(v), "v must belong to S");
  McPhiReport report;
  report.total.samples = opts.samples;
  report.total.seed = opts.seed;
  const VertexSet interior = interior_of(patch.graph(), s);
  if (!interior.contains(v)) {
    report.degenerate = true;
    report.total.mean = 1.0;
    return report;
  }
  const auto ys = detail::boundary_of(patch.graph(), s);
  const LocalFrame frame =
      build_frame(patch.graph(), detail::interior_query(patch, interior, v, ys));
  const detail::McTally t = detail::run_sharded(frame, p, opts);
  for (std::size_t k = 0; k < ys.size(); ++k) {
    report.terms.emplace_back(ys[k], detail::indicator_estimate(t.hits[k], t.samples, opts.seed));
  }
  const double n = static_cast<double>(t.samples);
  const double mean = static_cast<double>(t.hit_sum) / n;
  const double var = std::max(0.0, static_cast<double>(t.hit_sumsq) / n - mean * mean);
  report.total.mean = mean;
  report.total.std_error = std::sqrt(var / n);
  return report;
}

} // namespace sitecut
