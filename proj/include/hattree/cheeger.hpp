#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "hattree/errors.hpp"
#include "hattree/spectral.hpp"
#include "hattree/weighted_graph.hpp"

namespace hattree {

enum class CheegerMethod { exact, sweep };

struct CheegerReport {
  double value = 0.0;
  std::vector<int> witness;  // ascending ids, pi(S) <= pi(V)/2
  CheegerMethod method = CheegerMethod::exact;
  double cut_weight = 0.0;
  double witness_mass = 0.0;
};

namespace detail {

inline std::pair<double, double> cut_and_mass(const WeightedGraph& g,
                                              std::uint32_t mask) {
  double cut = 0.0, mass = 0.0;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (mask >> v & 1) mass += g.vertex_weight(v);
  for (const auto& e : g.edges())
    if (((mask >> e.u) ^ (mask >> e.v)) & 1) cut += e.w;
  return {cut, mass};
}

// sorted-sequence lexicographic order on vertex sets
inline bool lex_less(std::uint32_t a, std::uint32_t b, int n) {
  std::vector<int> va, vb;
  for (int v = 0; v < n; ++v) {
    if (a >> v & 1) va.push_back(v);
    if (b >> v & 1) vb.push_back(v);
  }
  return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
}

}  // namespace detail

/// Exact Cheeger constant by enumeration of all vertex subsets with
/// pi(S) <= pi(V)/2. Gray-code order keeps the cut update incremental.
/// Ties go to the lexicographically smallest witness. Guarded at n <= 24.
inline CheegerReport cheeger_exact(const WeightedGraph& g) {
  const int n = g.vertex_count();
  if (n < 2) throw Error(ErrorCode::invalid_input, "need at least two vertices");
  if (n > 24)
    throw Error(ErrorCode::size_limit,
                "exact enumeration limited to 24 vertices, got " + std::to_string(n));
  const double total = g.total_vertex_weight();
  const double half = total / 2.0;
  const double mass_slack = 1e-12 * total;

  std::uint32_t cur = 0;
  double cut = 0.0, mass = 0.0;
  std::uint32_t best_mask = 0;
  double best_cut = 0.0, best_mass = 1.0;
  bool have_best = false;

  const std::uint64_t span = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < span; ++i) {
    const int flip = std::countr_zero(i);
    const std::uint32_t bit = std::uint32_t{1} << flip;
    const bool entering = !(cur & bit);
    cur ^= bit;
    mass += entering ? g.vertex_weight(flip) : -g.vertex_weight(flip);
    for (const auto& nb : g.neighbors(flip)) {
      const bool nb_in = (cur >> nb.to) & 1;
      cut += (nb_in == entering) ? -nb.weight : nb.weight;
    }
    if (cur == span - 1 || mass > half + mass_slack) continue;
    if (!have_best) {
      auto [c, ms] = detail::cut_and_mass(g, cur);
      best_mask = cur;
      best_cut = c;
      best_mass = ms;
      have_best = true;
      continue;
    }
    // compare cut/mass against best via cross-multiplication
    const double lhs = cut * best_mass;
    const double rhs = best_cut * mass;
    const double tol = 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (lhs < rhs - tol ||
        (lhs <= rhs + tol && detail::lex_less(cur, best_mask, n))) {
      auto [c, ms] = detail::cut_and_mass(g, cur);  // exact, no drift
      best_mask = cur;
      best_cut = c;
      best_mass = ms;
    }
  }
  CheegerReport rep;
  rep.method = CheegerMethod::exact;
  rep.cut_weight = best_cut;
  rep.witness_mass = best_mass;
  rep.value = best_cut / best_mass;
  for (int v = 0; v < n; ++v)
    if (best_mask >> v & 1) rep.witness.push_back(v);
  return rep;
}

/// Best threshold cut along the sorted values of f; an upper bound on h(G).
inline CheegerReport cheeger_sweep(const WeightedGraph& g, std::span<const double> f) {
  const int n = g.vertex_count();
  if (static_cast<int>(f.size()) != n)
    throw Error(ErrorCode::dimension_mismatch, "function has wrong length");
  if (n < 2) throw Error(ErrorCode::invalid_input, "need at least two vertices");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return f[a] != f[b] ? f[a] < f[b] : a < b;
  });
  if (f[order.front()] == f[order.back()])
    throw Error(ErrorCode::invalid_input, "constant function has no threshold cuts");

  const double total = g.total_vertex_weight();
  std::vector<char> inside(n, 0);
  double cut = 0.0, mass = 0.0;
  double best_value = std::numeric_limits<double>::infinity();
  int best_prefix = 0;
  bool best_is_prefix = true;
  for (int t = 0; t + 1 < n; ++t) {
    const int x = order[t];
    inside[x] = 1;
    mass += g.vertex_weight(x);
    for (const auto& nb : g.neighbors(x)) cut += inside[nb.to] ? -nb.weight : nb.weight;
    const bool prefix_light = mass <= total - mass;
    const double light = prefix_light ? mass : total - mass;
    const double value = cut / light;
    if (value < best_value) {
      best_value = value;
      best_prefix = t + 1;
      best_is_prefix = prefix_light;
    }
  }
  CheegerReport rep;
  rep.method = CheegerMethod::sweep;
  std::vector<char> in_s(n, 0);
  for (int t = 0; t < best_prefix; ++t) in_s[order[t]] = 1;
  for (int v = 0; v < n; ++v)
    if (in_s[v] == (best_is_prefix ? 1 : 0)) rep.witness.push_back(v);
  for (int v : rep.witness) rep.witness_mass += g.vertex_weight(v);
  for (const auto& e : g.edges()) {
    const bool cu = std::binary_search(rep.witness.begin(), rep.witness.end(), e.u);
    const bool cv = std::binary_search(rep.witness.begin(), rep.witness.end(), e.v);
    if (cu != cv) rep.cut_weight += e.w;
  }
  rep.value = rep.cut_weight / rep.witness_mass;
  return rep;
}

struct CheegerInequalityReport {
  double lambda1 = 0.0;
  double cheeger = 0.0;
  double d_max = 0.0;
  double margin = 0.0;  // lambda1 - cheeger^2 / (2 d_max)
  bool pass = false;
};

/// lambda1 >= h(G)^2 / (2 d_max), checked with the exact Cheeger constant.
inline CheegerInequalityReport verify_cheeger_inequality(const WeightedGraph& g) {
  CheegerInequalityReport rep;
  rep.cheeger = cheeger_exact(g).value;
  rep.lambda1 = lambda1(g).lambda1;
  rep.d_max = degree_stats(g).max_weighted_degree;
  rep.margin = rep.lambda1 - rep.cheeger * rep.cheeger / (2.0 * rep.d_max);
  rep.pass = rep.margin >= -1e-9;
  return rep;
}

}  // namespace hattree
