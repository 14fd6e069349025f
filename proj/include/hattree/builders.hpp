#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "hattree/errors.hpp"
#include "hattree/weighted_graph.hpp"

namespace hattree {

enum class EdgeKind : std::uint8_t { tree, path };

inline constexpr std::int64_t kDefaultVertexCapacity = 4'194'304;

/// A k-subdivided complete binary tree of height h, optionally with a path
/// threaded through every depth level ("hat tree"). Unit vertex and edge
/// weights throughout.
///
/// Vertex ids are level-major: the root is 0 and level l occupies a
/// contiguous id range; inside a level, vertices are ordered by their branch
/// word, the sequence of L/R turns taken at branching vertices on the way
/// down from the root (lexicographic, L < R). This order coincides with
/// left-to-right position under an in-order traversal of the tree.
class HatTree {
 public:
  HatTree() = default;

  HatTree(WeightedGraph graph, int h, int k, std::vector<int> levels, bool level_paths)
      : g_(std::move(graph)),
        h_(h),
        k_(k),
        level_(std::move(levels)),
        with_paths_(level_paths) {
    if (h_ < 1 || k_ < 1)
      throw Error(ErrorCode::invalid_parameter, "hat tree requires h >= 1 and k >= 1");
    if (static_cast<int>(level_.size()) != g_.vertex_count())
      throw Error(ErrorCode::dimension_mismatch, "level vector size");
    build_offsets();
    edge_kind_.reserve(g_.edge_count());
    for (const auto& e : g_.edges())
      edge_kind_.push_back(level_[e.u] == level_[e.v] ? EdgeKind::path : EdgeKind::tree);
  }

  const WeightedGraph& graph() const { return g_; }
  int height() const { return h_; }
  int subdivision() const { return k_; }
  int root() const { return 0; }
  bool has_level_paths() const { return with_paths_; }

  int level_count() const { return h_ * k_ + 1; }
  int level(int v) const { return level_[v]; }
  const std::vector<int>& levels() const { return level_; }
  EdgeKind edge_kind(int edge_index) const { return edge_kind_[edge_index]; }
  const std::vector<EdgeKind>& edge_kinds() const { return edge_kind_; }

  std::int64_t level_size(int l) const { return offsets_[l + 1] - offsets_[l]; }
  int level_offset(int l) const { return static_cast<int>(offsets_[l]); }
  int vertex_at(int l, std::int64_t j) const { return static_cast<int>(offsets_[l] + j); }

  /// Number of branching steps on the root path of level l.
  int branch_depth(int l) const { return static_cast<int>((l + k_ - 1) / k_); }

  std::string branch_word(int v) const {
    int l = level_[v];
    int bits = branch_depth(l);
    std::int64_t j = v - offsets_[l];
    std::string word(bits, 'L');
    for (int b = 0; b < bits; ++b)
      if (j >> (bits - 1 - b) & 1) word[b] = 'R';
    return word;
  }

  /// Checks every structural invariant; throws Error(internal) on violation.
  void validate() const {
    const int n = g_.vertex_count();
    const std::int64_t subdivided = k_ * ((std::int64_t{1} << (h_ + 1)) - 2);
    require(n == 1 + subdivided, "vertex count formula");
    require(g_.edge_count() ==
                (with_paths_ ? 2 * subdivided - std::int64_t{h_} * k_ : subdivided),
            "edge count formula");
    require(g_.unit_weights(), "unit weights");
    require(level_[0] == 0, "root level");
    for (int l = 0; l < level_count(); ++l) {
      std::int64_t expect = l == 0 ? 1 : std::int64_t{1} << branch_depth(l);
      require(level_size(l) == expect, "level size at level " + std::to_string(l));
    }
    // stored levels equal BFS distance from the root
    std::vector<int> dist(n, -1);
    std::queue<int> q;
    dist[0] = 0;
    q.push(0);
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      for (const auto& nb : g_.neighbors(x))
        if (dist[nb.to] < 0) {
          dist[nb.to] = dist[x] + 1;
          q.push(nb.to);
        }
    }
    for (int v = 0; v < n; ++v)
      require(dist[v] == level_[v], "BFS distance != level at vertex " + std::to_string(v));
    // one tree edge up per non-root vertex; path edges between consecutive ids
    std::vector<int> up(n, 0);
    std::vector<std::int64_t> path_edges(level_count(), 0);
    for (std::size_t i = 0; i < g_.edges().size(); ++i) {
      const Edge& e = g_.edges()[i];
      if (edge_kind_[i] == EdgeKind::tree) {
        require(std::abs(level_[e.u] - level_[e.v]) == 1, "tree edge spans one level");
        ++up[level_[e.u] > level_[e.v] ? e.u : e.v];
      } else {
        require(level_[e.u] == level_[e.v], "path edge stays in level");
        require(e.v == e.u + 1, "path edge joins consecutive vertices");
        ++path_edges[level_[e.u]];
      }
    }
    for (int v = 1; v < n; ++v) require(up[v] == 1, "unique parent edge");
    for (int l = 0; l < level_count(); ++l)
      require(path_edges[l] == (with_paths_ ? level_size(l) - 1 : 0),
              "path edge count at level " + std::to_string(l));
    require(degree_stats(g_).max_degree <= 5, "degree bound");
    if (n >= 3) require(g_.edge_count() <= 3 * std::int64_t{n} - 6, "planar edge bound");
  }

 private:
  void require(bool ok, const std::string& what) const {
    if (!ok) throw Error(ErrorCode::internal, "hat tree invariant violated: " + what);
  }

  void build_offsets() {
    offsets_.assign(level_count() + 1, 0);
    for (int l = 1; l <= level_count(); ++l) {
      std::int64_t sz = l - 1 == 0 ? 1 : std::int64_t{1} << branch_depth(l - 1);
      offsets_[l] = offsets_[l - 1] + sz;
    }
    if (offsets_.back() != g_.vertex_count())
      throw Error(ErrorCode::internal, "level offsets do not cover the graph");
  }

  WeightedGraph g_;
  int h_ = 0;
  int k_ = 0;
  std::vector<int> level_;
  std::vector<EdgeKind> edge_kind_;
  std::vector<std::int64_t> offsets_;
  bool with_paths_ = false;
};

namespace detail {

inline std::int64_t hat_tree_vertex_count(int h, int k) {
  // 1 + k * (2^(h+1) - 2), computed without overflow for h <= 61
  if (h > 61) return std::numeric_limits<std::int64_t>::max();
  std::int64_t leaves = (std::int64_t{1} << (h + 1)) - 2;
  if (leaves > (std::numeric_limits<std::int64_t>::max() - 1) / k)
    return std::numeric_limits<std::int64_t>::max();
  return 1 + k * leaves;
}

inline HatTree build_tree_family(int h, int k, bool level_paths,
                                 std::int64_t capacity) {
  if (h < 1) throw Error(ErrorCode::invalid_parameter, "h must be >= 1");
  if (k < 1) throw Error(ErrorCode::invalid_parameter, "k must be >= 1");
  const std::int64_t n64 = hat_tree_vertex_count(h, k);
  if (n64 > capacity)
    throw Error(ErrorCode::capacity_exceeded,
                "h=" + std::to_string(h) + ", k=" + std::to_string(k) +
                    " needs more than " + std::to_string(capacity) + " vertices");
  const int levels = h * k + 1;
  std::vector<std::int64_t> offset(levels + 1, 0);
  std::vector<int> level(static_cast<std::size_t>(n64));
  for (int l = 0; l < levels; ++l) {
    std::int64_t sz = l == 0 ? 1 : std::int64_t{1} << ((l + k - 1) / k);
    offset[l + 1] = offset[l] + sz;
    for (std::int64_t j = offset[l]; j < offset[l + 1]; ++j)
      level[static_cast<std::size_t>(j)] = l;
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(2 * k * ((std::int64_t{1} << (h + 1)) - 2)));
  for (int l = 1; l < levels; ++l) {
    const std::int64_t sz = offset[l + 1] - offset[l];
    const bool crosses_branch = (l + k - 1) / k != (l + k - 2) / k && l > 1;
    for (std::int64_t j = 0; j < sz; ++j) {
      std::int64_t pj = l == 1 ? 0 : (crosses_branch ? j >> 1 : j);
      edges.push_back({static_cast<int>(offset[l - 1] + pj),
                       static_cast<int>(offset[l] + j), 1.0});
    }
    if (level_paths)
      for (std::int64_t j = 0; j + 1 < sz; ++j)
        edges.push_back({static_cast<int>(offset[l] + j),
                         static_cast<int>(offset[l] + j + 1), 1.0});
  }
  WeightedGraph g(static_cast<int>(n64), std::vector<double>(n64, 1.0), std::move(edges));
  return HatTree(std::move(g), h, k, std::move(level), level_paths);
}

}  // namespace detail

/// Complete rooted binary tree of height h (unit weights, no level paths).
inline HatTree build_binary_tree(int h, std::int64_t capacity = kDefaultVertexCapacity) {
  return detail::build_tree_family(h, 1, false, capacity);
}

/// k-subdivision of the complete binary tree of height h, no level paths.
inline HatTree build_subdivided_tree(int h, int k,
                                     std::int64_t capacity = kDefaultVertexCapacity) {
  return detail::build_tree_family(h, k, false, capacity);
}

/// The full construction: subdivided tree plus a path through every level.
inline HatTree build_hat_tree(int h, int k,
                              std::int64_t capacity = kDefaultVertexCapacity) {
  return detail::build_tree_family(h, k, true, capacity);
}

/// Replaces every edge by a path of k edges through k-1 fresh vertices.
/// Fresh vertices take the mass of the edge they sit on and every sub-edge
/// keeps the original weight; for a unit-weight input this leaves all
/// weights at 1. Fresh ids are appended after the original ids, following
/// the canonical edge order.
inline WeightedGraph subdivide_edges(const WeightedGraph& g, int k) {
  if (k < 1) throw Error(ErrorCode::invalid_parameter, "k must be >= 1");
  if (k == 1) return g;
  const int n = g.vertex_count();
  const std::int64_t fresh_per_edge = k - 1;
  const std::int64_t n_out = n + fresh_per_edge * g.edge_count();
  if (n_out > kDefaultVertexCapacity)
    throw Error(ErrorCode::capacity_exceeded, "subdivision exceeds vertex capacity");
  std::vector<double> pi(g.vertex_weights());
  pi.resize(static_cast<std::size_t>(n_out));
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(g.edge_count()) * k);
  int next = n;
  for (const auto& e : g.edges()) {
    int prev = e.u;
    for (int t = 0; t + 1 < k; ++t) {
      pi[next] = e.w;
      edges.push_back({prev, next, e.w});
      prev = next++;
    }
    edges.push_back({prev, e.v, e.w});
  }
  return WeightedGraph(static_cast<int>(n_out), std::move(pi), std::move(edges));
}

enum class ChainKind { q_h, q_hk };

/// Weighted path graph; vertex j sits at position j.
struct QuotientChain {
  WeightedGraph graph;
  ChainKind provenance = ChainKind::q_h;
  int h = 0;
  int k = 1;
};

/// The chain Q_h on {0,...,h} with pi(j) = 2^j and w(j,j+1) = 2^(j+1).
/// Weights are exact powers of two, which caps h at 62.
inline QuotientChain build_weighted_chain(int h) {
  if (h < 1) throw Error(ErrorCode::invalid_parameter, "h must be >= 1");
  if (h >= 63)
    throw Error(ErrorCode::capacity_exceeded, "chain weights overflow 64-bit at h >= 63");
  std::vector<double> pi(h + 1);
  std::vector<Edge> edges(h);
  for (int j = 0; j <= h; ++j) pi[j] = std::ldexp(1.0, j);
  for (int j = 0; j < h; ++j) edges[j] = {j, j + 1, std::ldexp(1.0, j + 1)};
  return {WeightedGraph(h + 1, std::move(pi), std::move(edges)), ChainKind::q_h, h, 1};
}

/// Q_{h,k}: the level quotient of the hat tree, built directly from the
/// level-size formulas. Position l has mass |V_l| and the edge (l, l+1)
/// carries weight |V_{l+1}|.
inline QuotientChain build_quotient_chain(int h, int k) {
  if (h < 1 || k < 1) throw Error(ErrorCode::invalid_parameter, "h, k must be >= 1");
  const std::int64_t m = std::int64_t{h} * k;
  if (h >= 63 || m + 1 > kDefaultVertexCapacity)
    throw Error(ErrorCode::capacity_exceeded, "quotient chain too large");
  std::vector<double> pi(static_cast<std::size_t>(m + 1));
  std::vector<Edge> edges(static_cast<std::size_t>(m));
  for (std::int64_t l = 0; l <= m; ++l)
    pi[l] = std::ldexp(1.0, static_cast<int>((l + k - 1) / k));
  for (std::int64_t l = 0; l < m; ++l)
    edges[l] = {static_cast<int>(l), static_cast<int>(l + 1),
                std::ldexp(1.0, static_cast<int>((l + k) / k))};
  return {WeightedGraph(static_cast<int>(m + 1), std::move(pi), std::move(edges)),
          ChainKind::q_hk, h, k};
}

/// Identifies each level set to one vertex of mass |V_l|; edges between
/// consecutive levels aggregate into w(l, l+1), edges inside a level become
/// discarded self-loops.
inline QuotientChain quotient_by_levels(const HatTree& t) {
  const int m = t.level_count() - 1;
  std::vector<double> pi(m + 1);
  std::vector<double> cross(m, 0.0);
  for (int l = 0; l <= m; ++l) pi[l] = static_cast<double>(t.level_size(l));
  for (const auto& e : t.graph().edges()) {
    int lu = t.level(e.u), lv = t.level(e.v);
    if (lu != lv) cross[std::min(lu, lv)] += e.w;
  }
  std::vector<Edge> edges(m);
  for (int l = 0; l < m; ++l) edges[l] = {l, l + 1, cross[l]};
  return {WeightedGraph(m + 1, std::move(pi), std::move(edges)), ChainKind::q_hk,
          t.height(), t.subdivision()};
}

/// Mass/weight sequences of a path graph read end to end, using the
/// lexicographically smaller of the two orientations. Rejects non-paths.
struct PathProfile {
  std::vector<double> pi;
  std::vector<double> w;

  friend bool operator==(const PathProfile&, const PathProfile&) = default;
};

inline PathProfile path_profile(const WeightedGraph& g) {
  const int n = g.vertex_count();
  if (n == 0) throw Error(ErrorCode::invalid_input, "empty graph");
  if (n == 1) return {{g.vertex_weight(0)}, {}};
  if (g.edge_count() != n - 1 || !is_connected(g))
    throw Error(ErrorCode::invalid_input, "not a path graph");
  std::vector<int> ends;
  for (int v = 0; v < n; ++v) {
    if (g.degree(v) > 2) throw Error(ErrorCode::invalid_input, "not a path graph");
    if (g.degree(v) == 1) ends.push_back(v);
  }
  if (ends.size() != 2) throw Error(ErrorCode::invalid_input, "not a path graph");
  auto walk = [&](int start) {
    PathProfile p;
    int prev = -1, cur = start;
    p.pi.push_back(g.vertex_weight(cur));
    while (static_cast<int>(p.pi.size()) < n) {
      for (const auto& nb : g.neighbors(cur)) {
        if (nb.to != prev) {
          p.w.push_back(nb.weight);
          p.pi.push_back(g.vertex_weight(nb.to));
          prev = cur;
          cur = nb.to;
          break;
        }
      }
    }
    return p;
  };
  PathProfile a = walk(ends[0]);
  PathProfile b = walk(ends[1]);
  if (std::lexicographical_compare(b.pi.begin(), b.pi.end(), a.pi.begin(), a.pi.end()) ||
      (b.pi == a.pi &&
       std::lexicographical_compare(b.w.begin(), b.w.end(), a.w.begin(), a.w.end())))
    return b;
  return a;
}

}  // namespace hattree
