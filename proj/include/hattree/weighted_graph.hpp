#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hattree/errors.hpp"

namespace hattree {

/// Undirected edge with positive weight; stored with u < v.
struct Edge {
  int u;
  int v;
  double w;

  friend bool operator==(const Edge& a, const Edge& b) {
    return a.u == b.u && a.v == b.v && a.w == b.w;
  }
};

struct Neighbor {
  int to;
  double weight;
};

/// Finite undirected graph with positive vertex masses pi(x) and positive
/// edge conductances w(x,y). Immutable after construction; parallel edges in
/// the input are merged by summing their weights, self-loops are rejected.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  WeightedGraph(int n, std::vector<double> vertex_weights, std::vector<Edge> edge_list)
      : pi_(std::move(vertex_weights)) {
    if (n < 0) throw Error(ErrorCode::invalid_parameter, "negative vertex count");
    if (static_cast<int>(pi_.size()) != n)
      throw Error(ErrorCode::dimension_mismatch,
                  "vertex weight vector has size " + std::to_string(pi_.size()) +
                      ", expected " + std::to_string(n));
    for (int v = 0; v < n; ++v) {
      if (!(pi_[v] > 0.0))
        throw Error(ErrorCode::invalid_input,
                    "vertex " + std::to_string(v) + " has non-positive mass");
    }
    for (auto& e : edge_list) {
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
        throw Error(ErrorCode::invalid_input, "edge endpoint out of range");
      if (e.u == e.v)
        throw Error(ErrorCode::invalid_input,
                    "self-loop at vertex " + std::to_string(e.u));
      if (!(e.w > 0.0))
        throw Error(ErrorCode::invalid_input, "non-positive edge weight");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edge_list.begin(), edge_list.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    edges_.reserve(edge_list.size());
    for (const auto& e : edge_list) {
      if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v)
        edges_.back().w += e.w;  // merge parallel contributions
      else
        edges_.push_back(e);
    }
    build_adjacency(n);
  }

  static WeightedGraph with_unit_weights(int n,
                                         const std::vector<std::pair<int, int>>& edges) {
    std::vector<Edge> es;
    es.reserve(edges.size());
    for (auto [u, v] : edges) es.push_back({u, v, 1.0});
    return WeightedGraph(n, std::vector<double>(n, 1.0), std::move(es));
  }

  int vertex_count() const { return static_cast<int>(pi_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  double vertex_weight(int v) const { return pi_[v]; }
  const std::vector<double>& vertex_weights() const { return pi_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const Neighbor> neighbors(int v) const {
    return {adj_.data() + adj_offsets_[v],
            static_cast<std::size_t>(adj_offsets_[v + 1] - adj_offsets_[v])};
  }

  int degree(int v) const { return adj_offsets_[v + 1] - adj_offsets_[v]; }

  double weighted_degree(int v) const {
    double s = 0.0;
    for (const auto& nb : neighbors(v)) s += nb.weight;
    return s;
  }

  double total_vertex_weight() const {
    double s = 0.0;
    for (double p : pi_) s += p;
    return s;
  }

  bool unit_weights() const {
    for (double p : pi_)
      if (p != 1.0) return false;
    for (const auto& e : edges_)
      if (e.w != 1.0) return false;
    return true;
  }

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.pi_ == b.pi_ && a.edges_ == b.edges_;
  }

 private:
  void build_adjacency(int n) {
    adj_offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      ++adj_offsets_[e.u + 1];
      ++adj_offsets_[e.v + 1];
    }
    for (int v = 0; v < n; ++v) adj_offsets_[v + 1] += adj_offsets_[v];
    adj_.resize(edges_.size() * 2);
    std::vector<int> cursor(adj_offsets_.begin(), adj_offsets_.end() - 1);
    for (const auto& e : edges_) {
      adj_[cursor[e.u]++] = {e.v, e.w};
      adj_[cursor[e.v]++] = {e.u, e.w};
    }
  }

  std::vector<double> pi_;
  std::vector<Edge> edges_;
  std::vector<int> adj_offsets_;
  std::vector<Neighbor> adj_;
};

struct DegreeStats {
  int max_degree = 0;
  double max_weighted_degree = 0.0;  // max over x of pi(x)^-1 sum_y w(x,y)
};

inline DegreeStats degree_stats(const WeightedGraph& g) {
  DegreeStats s;
  for (int v = 0; v < g.vertex_count(); ++v) {
    s.max_degree = std::max(s.max_degree, g.degree(v));
    s.max_weighted_degree =
        std::max(s.max_weighted_degree, g.weighted_degree(v) / g.vertex_weight(v));
  }
  return s;
}

/// Vertices reachable from src, ascending ids.
inline std::vector<int> reachable_component(const WeightedGraph& g, int src) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::queue<int> q;
  q.push(src);
  seen[src] = 1;
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (const auto& nb : g.neighbors(x)) {
      if (!seen[nb.to]) {
        seen[nb.to] = 1;
        q.push(nb.to);
      }
    }
  }
  std::vector<int> comp;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (seen[v]) comp.push_back(v);
  return comp;
}

inline bool is_connected(const WeightedGraph& g) {
  if (g.vertex_count() == 0) return true;
  return static_cast<int>(reachable_component(g, 0).size()) == g.vertex_count();
}

}  // namespace hattree
