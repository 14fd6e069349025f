#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hattree/errors.hpp"
#include "hattree/weighted_graph.hpp"

namespace hattree {

/// L f(x) = pi(x)^-1 sum_{y~x} w(x,y) (f(x) - f(y)).
inline std::vector<double> laplacian_apply(const WeightedGraph& g,
                                           std::span<const double> f) {
  if (static_cast<int>(f.size()) != g.vertex_count())
    throw Error(ErrorCode::dimension_mismatch, "function has wrong length");
  std::vector<double> out(f.size());
  for (int x = 0; x < g.vertex_count(); ++x) {
    double s = 0.0;
    for (const auto& nb : g.neighbors(x)) s += nb.weight * (f[x] - f[nb.to]);
    out[x] = s / g.vertex_weight(x);
  }
  return out;
}

/// Conjugated form Pi^-1/2 (D - W) Pi^-1/2 for a caller-supplied positive
/// measure pi (stationary probabilities or weighted degrees, typically).
/// Symmetric; annihilates sqrt(pi).
inline std::vector<double> normalized_laplacian_apply(const WeightedGraph& g,
                                                      std::span<const double> f,
                                                      std::span<const double> pi) {
  if (static_cast<int>(f.size()) != g.vertex_count() || pi.size() != f.size())
    throw Error(ErrorCode::dimension_mismatch, "function or measure has wrong length");
  std::vector<double> isq(pi.size());
  for (std::size_t x = 0; x < pi.size(); ++x) {
    if (!(pi[x] > 0.0))
      throw Error(ErrorCode::invalid_input, "measure must be strictly positive");
    isq[x] = 1.0 / std::sqrt(pi[x]);
  }
  std::vector<double> out(f.size());
  for (int x = 0; x < g.vertex_count(); ++x) {
    double s = 0.0;
    for (const auto& nb : g.neighbors(x))
      s += nb.weight * (f[x] * isq[x] - f[nb.to] * isq[nb.to]);
    out[x] = s * isq[x];
  }
  return out;
}

/// Dirichlet form over squared pi-norm; >= lambda1 whenever sum pi f = 0.
inline double rayleigh_quotient(const WeightedGraph& g, std::span<const double> f) {
  if (static_cast<int>(f.size()) != g.vertex_count())
    throw Error(ErrorCode::dimension_mismatch, "function has wrong length");
  double num = 0.0, den = 0.0;
  for (const auto& e : g.edges()) {
    double d = f[e.u] - f[e.v];
    num += e.w * d * d;
  }
  for (int x = 0; x < g.vertex_count(); ++x)
    den += g.vertex_weight(x) * f[x] * f[x];
  if (den == 0.0) throw Error(ErrorCode::invalid_input, "zero function");
  return num / den;
}

enum class SolverKind { dense, iterative };

struct SolveOptions {
  std::optional<SolverKind> solver;  // default: dense up to dense_cutoff
  double tolerance = 1e-8;           // residual bound ||Lf - lambda f||_pi
  int max_iterations = 200000;       // operator applications (iterative)
  std::uint64_t seed = 1;
  int dense_cutoff = 2000;
  int subspace = 48;                 // Krylov block per restart cycle
  int keep = 10;                     // Ritz vectors carried across restarts
};

struct SpectralReport {
  double lambda1 = 0.0;
  std::vector<double> eigenvector;  // unit pi-norm, pi-orthogonal to constants
  double residual = 0.0;
  SolverKind solver = SolverKind::dense;
  int iterations = 0;
  double tolerance = 0.0;
  std::vector<int> component_witness;  // nonempty iff the graph is disconnected
};

class ConvergenceFailure : public Error {
 public:
  explicit ConvergenceFailure(SpectralReport r)
      : Error(ErrorCode::convergence_failure,
              "residual " + std::to_string(r.residual) + " above tolerance " +
                  std::to_string(r.tolerance) + " after " +
                  std::to_string(r.iterations) + " operator applications"),
        best(std::move(r)) {}

  SpectralReport best;
};

namespace detail {

// S = Pi^-1/2 (D - W) Pi^-1/2, the symmetric conjugate of L.
struct SymmetricOperator {
  const WeightedGraph& g;
  std::vector<double> isq;   // pi^-1/2
  std::vector<double> diag;  // weighted_degree / pi

  explicit SymmetricOperator(const WeightedGraph& graph) : g(graph) {
    const int n = g.vertex_count();
    isq.resize(n);
    diag.resize(n);
    for (int v = 0; v < n; ++v) {
      isq[v] = 1.0 / std::sqrt(g.vertex_weight(v));
      diag[v] = g.weighted_degree(v) / g.vertex_weight(v);
    }
  }

  void apply(const double* x, double* y) const {
    const int n = g.vertex_count();
    for (int v = 0; v < n; ++v) {
      double s = 0.0;
      for (const auto& nb : g.neighbors(v)) s += nb.weight * x[nb.to] * isq[nb.to];
      y[v] = diag[v] * x[v] - isq[v] * s;
    }
  }
};

inline void finalize_report(const WeightedGraph& g, SpectralReport& rep,
                            Eigen::VectorXd g_vec) {
  const int n = g.vertex_count();
  // back to the L picture, enforce the constraints exactly
  std::vector<double> f(n);
  for (int v = 0; v < n; ++v) f[v] = g_vec[v] / std::sqrt(g.vertex_weight(v));
  double mass = 0.0, mean = 0.0;
  for (int v = 0; v < n; ++v) {
    mass += g.vertex_weight(v);
    mean += g.vertex_weight(v) * f[v];
  }
  mean /= mass;
  double nrm2 = 0.0;
  for (int v = 0; v < n; ++v) {
    f[v] -= mean;
    nrm2 += g.vertex_weight(v) * f[v] * f[v];
  }
  double nrm = std::sqrt(nrm2);
  int lead = 0;
  while (lead < n && std::abs(f[lead]) <= 1e-12 * nrm) ++lead;
  double sign = (lead < n && f[lead] < 0.0) ? -1.0 : 1.0;
  for (int v = 0; v < n; ++v) f[v] = sign * f[v] / nrm;
  std::vector<double> lf = laplacian_apply(g, f);
  double r2 = 0.0;
  for (int v = 0; v < n; ++v) {
    double d = lf[v] - rep.lambda1 * f[v];
    r2 += g.vertex_weight(v) * d * d;
  }
  rep.residual = std::sqrt(r2);
  rep.eigenvector = std::move(f);
}

inline SpectralReport lambda1_dense(const WeightedGraph& g, const SolveOptions& opts) {
  const int n = g.vertex_count();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v) S(v, v) = g.weighted_degree(v) / g.vertex_weight(v);
  for (const auto& e : g.edges()) {
    double off = -e.w / std::sqrt(g.vertex_weight(e.u) * g.vertex_weight(e.v));
    S(e.u, e.v) = off;
    S(e.v, e.u) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  SpectralReport rep;
  rep.lambda1 = es.eigenvalues()(1);
  rep.solver = SolverKind::dense;
  rep.iterations = 0;
  rep.tolerance = opts.tolerance;
  finalize_report(g, rep, es.eigenvectors().col(1));
  return rep;
}

inline SpectralReport lambda1_iterative(const WeightedGraph& g,
                                        const SolveOptions& opts) {
  const int n = g.vertex_count();
  SymmetricOperator op(g);
  Eigen::VectorXd u0(n);
  for (int v = 0; v < n; ++v) u0[v] = std::sqrt(g.vertex_weight(v));
  u0.normalize();

  // the deflated space has dimension n - 1; m == 1 solves it in one pass
  const int m = std::max(1, std::min(opts.subspace, n - 1));
  const int keep = std::clamp(opts.keep, 1, std::max(1, m - 2));
  Eigen::MatrixXd V(n, m), SV(n, m);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;

  auto orthonormalize = [&](Eigen::VectorXd x, int cols) -> Eigen::VectorXd {
    for (int pass = 0; pass < 2; ++pass) {
      x -= u0 * u0.dot(x);
      for (int i = 0; i < cols; ++i) x -= V.col(i) * V.col(i).dot(x);
    }
    return x;
  };
  auto random_direction = [&](int cols) {
    Eigen::VectorXd x(n);
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (int v = 0; v < n; ++v) x[v] = gauss(rng);
      x = orthonormalize(x, cols);
      double nx = x.norm();
      if (nx > 1e-12) return Eigen::VectorXd(x / nx);
    }
    throw Error(ErrorCode::internal, "cannot extend the deflated subspace");
  };

  V.col(0) = random_direction(0);
  int ncols = 1;
  int matvecs = 0;
  Eigen::VectorXd best;
  double best_theta = 0.0;
  double best_res = std::numeric_limits<double>::infinity();
  // converge past the requested bound so the certified L-picture residual,
  // recomputed after re-projection, still clears it
  const double target = 0.5 * opts.tolerance;

  while (true) {
    while (ncols < m) {
      op.apply(V.col(ncols - 1).data(), SV.col(ncols - 1).data());
      ++matvecs;
      Eigen::VectorXd x = orthonormalize(SV.col(ncols - 1), ncols);
      double nx = x.norm();
      V.col(ncols) = nx > 1e-12 ? Eigen::VectorXd(x / nx) : random_direction(ncols);
      ++ncols;
    }
    op.apply(V.col(m - 1).data(), SV.col(m - 1).data());
    ++matvecs;
    Eigen::MatrixXd T = V.leftCols(m).transpose() * SV.leftCols(m);
    T = 0.5 * (T + T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T);
    double theta = small.eigenvalues()(0);
    Eigen::VectorXd cand = V.leftCols(m) * small.eigenvectors().col(0);
    cand.normalize();
    Eigen::VectorXd sc(n);
    op.apply(cand.data(), sc.data());
    ++matvecs;
    double res = (sc - theta * cand).norm();
    if (res < best_res) {
      best_res = res;
      best_theta = theta;
      best = cand;
    }
    if (best_res <= target || matvecs >= opts.max_iterations || m == 1) {
      SpectralReport rep;
      rep.lambda1 = best_theta;
      rep.solver = SolverKind::iterative;
      rep.iterations = matvecs;
      rep.tolerance = opts.tolerance;
      finalize_report(g, rep, best);
      if (rep.residual > opts.tolerance) throw ConvergenceFailure(std::move(rep));
      return rep;
    }
    // thick restart: carry the leading Ritz vectors, then extend by Krylov
    Eigen::MatrixXd U = V.leftCols(m) * small.eigenvectors().leftCols(keep);
    for (int i = 0; i < keep; ++i) {
      Eigen::VectorXd x = orthonormalize(U.col(i), i);
      double nx = x.norm();
      V.col(i) = nx > 1e-12 ? Eigen::VectorXd(x / nx) : random_direction(i);
    }
    for (int i = 0; i < keep; ++i) {
      op.apply(V.col(i).data(), SV.col(i).data());
      ++matvecs;
    }
    Eigen::VectorXd r = SV.col(0) - V.col(0).dot(SV.col(0)) * V.col(0);
    Eigen::VectorXd x = orthonormalize(r, keep);
    double nx = x.norm();
    V.col(keep) = nx > 1e-12 ? Eigen::VectorXd(x / nx) : random_direction(keep);
    ncols = keep + 1;
  }
}

}  // namespace detail

/// Smallest non-zero eigenvalue of L on l2(V, pi), with certified residual.
/// Disconnected graphs report lambda1 = 0 together with the vertex set of
/// the component containing vertex 0 as a witness.
inline SpectralReport lambda1(const WeightedGraph& g, const SolveOptions& opts = {}) {
  const int n = g.vertex_count();
  if (n < 2)
    throw Error(ErrorCode::invalid_input, "spectral gap needs at least two vertices");
  std::vector<int> comp = reachable_component(g, 0);
  if (static_cast<int>(comp.size()) < n) {
    // exact 0-eigenvector: +a on the component, -b elsewhere
    std::vector<char> in_comp(n, 0);
    for (int v : comp) in_comp[v] = 1;
    double ms = 0.0, mt = 0.0;
    for (int v = 0; v < n; ++v) (in_comp[v] ? ms : mt) += g.vertex_weight(v);
    double a = std::sqrt(mt / (ms * (ms + mt)));
    double b = -std::sqrt(ms / (mt * (ms + mt)));
    SpectralReport rep;
    rep.lambda1 = 0.0;
    rep.solver = opts.solver.value_or(n <= opts.dense_cutoff ? SolverKind::dense
                                                             : SolverKind::iterative);
    rep.tolerance = opts.tolerance;
    rep.component_witness = std::move(comp);
    rep.eigenvector.resize(n);
    for (int v = 0; v < n; ++v) rep.eigenvector[v] = in_comp[v] ? a : b;
    std::vector<double> lf = laplacian_apply(g, rep.eigenvector);
    double r2 = 0.0;
    for (int v = 0; v < n; ++v) r2 += g.vertex_weight(v) * lf[v] * lf[v];
    rep.residual = std::sqrt(r2);
    return rep;
  }
  SolverKind kind = opts.solver.value_or(n <= opts.dense_cutoff ? SolverKind::dense
                                                                : SolverKind::iterative);
  return kind == SolverKind::dense ? detail::lambda1_dense(g, opts)
                                   : detail::lambda1_iterative(g, opts);
}

}  // namespace hattree
