#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hattree/builders.hpp"
#include "hattree/errors.hpp"
#include "hattree/spectral.hpp"
#include "hattree/weighted_graph.hpp"

namespace hattree {

struct BfsResult {
  std::vector<int> dist;  // -1 where unreachable
  bool complete = true;
};

inline BfsResult bfs_distances(const WeightedGraph& g, int src) {
  if (src < 0 || src >= g.vertex_count())
    throw Error(ErrorCode::invalid_parameter, "source out of range");
  BfsResult r;
  r.dist.assign(g.vertex_count(), -1);
  r.dist[src] = 0;
  std::queue<int> q;
  q.push(src);
  int reached = 1;
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (const auto& nb : g.neighbors(x))
      if (r.dist[nb.to] < 0) {
        r.dist[nb.to] = r.dist[x] + 1;
        ++reached;
        q.push(nb.to);
      }
  }
  r.complete = reached == g.vertex_count();
  return r;
}

enum class StatMode { exact, sampled };

struct DistanceStats {
  std::int64_t diameter = 0;  // sampled mode: largest observed distance
  double avg_sq_distance = 0.0;
  StatMode mode = StatMode::exact;
  std::int64_t sample_pairs = 0;
  std::uint64_t seed = 0;
  double std_error = 0.0;
};

/// Exact mode: all-pairs BFS, average over ordered pairs including x = y.
/// Sampled mode: uniformly random sources (clustered estimator) with a
/// cluster standard error.
inline DistanceStats distance_stats(const WeightedGraph& g,
                                    StatMode mode = StatMode::exact,
                                    std::int64_t sample_pairs = 0,
                                    std::uint64_t seed = 1) {
  const int n = g.vertex_count();
  if (n == 0) throw Error(ErrorCode::invalid_input, "empty graph");
  DistanceStats st;
  st.mode = mode;
  st.seed = seed;
  if (mode == StatMode::exact) {
    if (n > 50000)
      throw Error(ErrorCode::size_limit, "all-pairs BFS limited to 50000 vertices");
    double sum = 0.0;
    std::int64_t diam = 0;
    for (int s = 0; s < n; ++s) {
      BfsResult b = bfs_distances(g, s);
      if (!b.complete) throw Error(ErrorCode::invalid_input, "graph is disconnected");
      for (int v = 0; v < n; ++v) {
        double d = b.dist[v];
        sum += d * d;
        diam = std::max<std::int64_t>(diam, b.dist[v]);
      }
    }
    st.diameter = diam;
    st.avg_sq_distance = sum / (static_cast<double>(n) * static_cast<double>(n));
    return st;
  }
  if (sample_pairs < 1)
    throw Error(ErrorCode::invalid_parameter, "sampled mode needs sample_pairs >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  const std::int64_t sources =
      std::clamp<std::int64_t>(static_cast<std::int64_t>(std::sqrt(double(sample_pairs))),
                               1, std::min<std::int64_t>(n, 1024));
  const std::int64_t per_source = (sample_pairs + sources - 1) / sources;
  std::vector<double> cluster_means;
  std::int64_t diam = 0;
  for (std::int64_t s = 0; s < sources; ++s) {
    BfsResult b = bfs_distances(g, pick(rng));
    if (!b.complete) throw Error(ErrorCode::invalid_input, "graph is disconnected");
    double acc = 0.0;
    for (std::int64_t t = 0; t < per_source; ++t) {
      double d = b.dist[pick(rng)];
      acc += d * d;
      diam = std::max<std::int64_t>(diam, static_cast<std::int64_t>(d));
    }
    cluster_means.push_back(acc / static_cast<double>(per_source));
  }
  double mean = 0.0;
  for (double c : cluster_means) mean += c;
  mean /= static_cast<double>(cluster_means.size());
  double var = 0.0;
  for (double c : cluster_means) var += (c - mean) * (c - mean);
  if (cluster_means.size() > 1) var /= static_cast<double>(cluster_means.size() - 1);
  st.diameter = diam;
  st.avg_sq_distance = mean;
  st.sample_pairs = sources * per_source;
  st.std_error = std::sqrt(var / static_cast<double>(cluster_means.size()));
  return st;
}

/// pi(x) = weighted_degree(x) / total, the stationary law of the walk.
inline std::vector<double> stationary_distribution(const WeightedGraph& g) {
  if (!is_connected(g)) throw Error(ErrorCode::invalid_input, "graph is disconnected");
  std::vector<double> pi(g.vertex_count());
  double total = 0.0;
  for (int v = 0; v < g.vertex_count(); ++v) {
    pi[v] = g.weighted_degree(v);
    total += pi[v];
  }
  for (double& p : pi) p /= total;
  return pi;
}

namespace detail {

inline void check_distribution(const WeightedGraph& g, std::span<const double> p) {
  if (static_cast<int>(p.size()) != g.vertex_count())
    throw Error(ErrorCode::dimension_mismatch, "distribution has wrong length");
  double sum = 0.0;
  for (double x : p) {
    if (x < -1e-12) throw Error(ErrorCode::invalid_input, "negative probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorCode::invalid_input, "probabilities sum to " + std::to_string(sum));
}

// one application of the lazy kernel P = I/2 + D^-1 W / 2, acting on row
// vectors: p'(y) = p(y)/2 + sum_x p(x) w(x,y) / (2 deg_w(x))
inline void lazy_step(const WeightedGraph& g, const std::vector<double>& inv_wdeg,
                      const std::vector<double>& p, std::vector<double>& out) {
  const int n = g.vertex_count();
  for (int y = 0; y < n; ++y) {
    double s = 0.0;
    for (const auto& nb : g.neighbors(y)) s += p[nb.to] * nb.weight * inv_wdeg[nb.to];
    out[y] = 0.5 * p[y] + 0.5 * s;
  }
}

inline std::vector<double> inverse_weighted_degrees(const WeightedGraph& g) {
  std::vector<double> inv(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    double d = g.weighted_degree(v);
    if (d <= 0.0)
      throw Error(ErrorCode::invalid_input,
                  "isolated vertex " + std::to_string(v) + " has no walk kernel");
    inv[v] = 1.0 / d;
  }
  return inv;
}

}  // namespace detail

inline std::vector<double> evolve_distribution(const WeightedGraph& g,
                                               std::span<const double> p,
                                               std::int64_t steps) {
  detail::check_distribution(g, p);
  if (steps < 0) throw Error(ErrorCode::invalid_parameter, "negative step count");
  std::vector<double> cur(p.begin(), p.end());
  if (steps == 0 || g.vertex_count() == 0) return cur;
  std::vector<double> inv = detail::inverse_weighted_degrees(g);
  std::vector<double> next(cur.size());
  for (std::int64_t t = 0; t < steps; ++t) {
    detail::lazy_step(g, inv, cur, next);
    cur.swap(next);
  }
  return cur;
}

inline double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw Error(ErrorCode::dimension_mismatch, "distributions differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

/// 1 / lambda1 of the normalized Laplacian with the stationary measure,
/// i.e. the inverse spectral gap of the non-lazy kernel D^-1 W.
inline double relaxation_time(const WeightedGraph& g, const SolveOptions& opts = {}) {
  if (!is_connected(g)) throw Error(ErrorCode::invalid_input, "graph is disconnected");
  std::vector<double> deg(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) deg[v] = g.weighted_degree(v);
  WeightedGraph reweighted(g.vertex_count(), std::move(deg), g.edges());
  return 1.0 / lambda1(reweighted, opts).lambda1;
}

enum class MixMethod { exact, monte_carlo };

struct MixingOptions {
  double eps = 0.25;
  MixMethod method = MixMethod::exact;
  std::vector<int> starts;  // empty: vertex 0
  std::int64_t t_max = -1;  // default 16 n^2
  std::uint64_t seed = 1;
  int walkers = 100000;  // monte_carlo walkers per start
};

struct MixingReport {
  double epsilon = 0.25;
  std::int64_t t_mix = 0;
  MixMethod method = MixMethod::exact;
  std::string start_policy;
  std::vector<std::pair<std::int64_t, double>> tv_trajectory;
  double relaxation_time = 0.0;
  bool cap_reached = false;
  std::int64_t t_max = 0;
  std::string kernel = "lazy";
  std::uint64_t seed = 0;
  int walkers = 0;
  std::string note;
};

/// Worst-start pair for the construction: root and the leftmost deepest leaf.
inline std::vector<int> mixing_start_set(const HatTree& t) {
  return {t.root(), t.level_offset(t.level_count() - 1)};
}

/// Least t with max-over-starts TV(p_t, pi) <= eps under the lazy kernel.
inline MixingReport mixing_time(const WeightedGraph& g, MixingOptions opts = {}) {
  const int n = g.vertex_count();
  if (n == 0) throw Error(ErrorCode::invalid_input, "empty graph");
  if (!(opts.eps > 0.0 && opts.eps < 1.0))
    throw Error(ErrorCode::invalid_parameter, "eps must lie in (0,1)");
  if (opts.starts.empty()) opts.starts = {0};
  for (int s : opts.starts)
    if (s < 0 || s >= n) throw Error(ErrorCode::invalid_parameter, "start out of range");

  MixingReport rep;
  rep.epsilon = opts.eps;
  rep.method = opts.method;
  rep.seed = opts.seed;
  rep.t_max = opts.t_max > 0 ? opts.t_max : 16 * std::int64_t{n} * n;
  rep.start_policy = "worst_of:";
  for (std::size_t i = 0; i < opts.starts.size(); ++i)
    rep.start_policy += (i ? "," : "") + std::to_string(opts.starts[i]);
  std::vector<double> pi = stationary_distribution(g);
  rep.relaxation_time = relaxation_time(g);

  if (opts.method == MixMethod::exact) {
    if (n > 2000)
      throw Error(ErrorCode::size_limit, "exact TV evolution limited to 2000 vertices");
    std::vector<double> inv = detail::inverse_weighted_degrees(g);
    std::vector<std::vector<double>> ps;
    for (int s : opts.starts) {
      std::vector<double> d(n, 0.0);
      d[s] = 1.0;
      ps.push_back(std::move(d));
    }
    std::vector<double> scratch(n);
    for (std::int64_t t = 0;; ++t) {
      double tv = 0.0;
      for (const auto& p : ps) tv = std::max(tv, tv_distance(p, pi));
      rep.tv_trajectory.emplace_back(t, tv);
      if (tv <= opts.eps) {
        rep.t_mix = t;
        return rep;
      }
      if (t >= rep.t_max) {
        rep.t_mix = t;
        rep.cap_reached = true;
        return rep;
      }
      for (auto& p : ps) {
        detail::lazy_step(g, inv, p, scratch);
        p.swap(scratch);
      }
    }
  }

  // monte_carlo: occupancy counts of seeded walkers against the exact pi
  rep.walkers = opts.walkers;
  rep.note = "occupancy TV estimate is biased upward by O(sqrt(n/walkers))";
  if (opts.walkers < 1) throw Error(ErrorCode::invalid_parameter, "walkers must be >= 1");
  std::vector<double> cum;  // per-vertex cumulative neighbor weights
  std::vector<int> cum_off(n + 1, 0);
  for (int v = 0; v < n; ++v) cum_off[v + 1] = cum_off[v] + g.degree(v);
  cum.resize(cum_off[n]);
  for (int v = 0; v < n; ++v) {
    double acc = 0.0;
    int i = cum_off[v];
    for (const auto& nb : g.neighbors(v)) {
      acc += nb.weight;
      cum[i++] = acc;
    }
  }
  const std::size_t total_walkers = opts.starts.size() * std::size_t(opts.walkers);
  std::vector<int> pos(total_walkers);
  std::vector<std::mt19937_64> rngs;
  rngs.reserve(total_walkers);
  for (std::size_t w = 0; w < total_walkers; ++w) {
    pos[w] = opts.starts[w / opts.walkers];
    std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(w)};
    rngs.emplace_back(seq);
  }
  std::vector<std::vector<std::int64_t>> occ(opts.starts.size(),
                                             std::vector<std::int64_t>(n, 0));
  for (std::size_t w = 0; w < total_walkers; ++w) ++occ[w / opts.walkers][pos[w]];
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::int64_t t = 0;; ++t) {
    double tv = 0.0;
    for (std::size_t s = 0; s < occ.size(); ++s) {
      double acc = 0.0;
      for (int v = 0; v < n; ++v)
        acc += std::abs(double(occ[s][v]) / opts.walkers - pi[v]);
      tv = std::max(tv, 0.5 * acc);
    }
    rep.tv_trajectory.emplace_back(t, tv);
    if (tv <= opts.eps) {
      rep.t_mix = t;
      return rep;
    }
    if (t >= rep.t_max) {
      rep.t_mix = t;
      rep.cap_reached = true;
      return rep;
    }
    for (std::size_t w = 0; w < total_walkers; ++w) {
      double u = unit(rngs[w]);
      if (u < 0.5) continue;
      const int v = pos[w];
      const double target = (u - 0.5) * 2.0 * g.weighted_degree(v);
      const double* first = cum.data() + cum_off[v];
      const double* last = cum.data() + cum_off[v + 1];
      int idx = int(std::lower_bound(first, last, target) - first);
      if (idx >= g.degree(v)) idx = g.degree(v) - 1;
      const int to = g.neighbors(v)[idx].to;
      --occ[w / opts.walkers][v];
      ++occ[w / opts.walkers][to];
      pos[w] = to;
    }
  }
}

}  // namespace hattree
