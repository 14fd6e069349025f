#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hattree/builders.hpp"
#include "hattree/certificates.hpp"
#include "hattree/cheeger.hpp"
#include "hattree/planarity.hpp"
#include "hattree/report_json.hpp"
#include "hattree/serialize.hpp"
#include "hattree/spectral.hpp"
#include "hattree/version.hpp"
#include "hattree/walk_metrics.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitUsage = 64;

struct RunConfig {
  std::string command;
  int h = 0;
  std::optional<int> k;
  std::string in_path;
  std::string out_path;
  std::string format = "edgelist";
  std::string solver;
  std::string method;
  std::string mode = "exact";
  double tolerance = 1e-8;
  int max_iterations = 200000;
  std::uint64_t seed = 1;
  int trials = 1000;
  double eps = 0.25;
  std::int64_t pairs = 100000;
  int h_min = 2;
  int h_max = 4;
  std::string trajectory_path;

  int k_value() const { return k.value_or(1 << h); }

  nlohmann::json to_json() const {
    nlohmann::json j{{"command", command}, {"version", hattree::kVersion},
                     {"seed", seed},       {"tolerance", tolerance},
                     {"eps", eps},         {"trials", trials}};
    if (h > 0) {
      j["h"] = h;
      j["k"] = k_value();
    }
    if (!in_path.empty()) j["in"] = in_path;
    if (!out_path.empty()) j["out"] = out_path;
    if (!solver.empty()) j["solver"] = solver;
    if (!method.empty()) j["method"] = method;
    if (command == "build") j["format"] = format;
    if (command == "sweep") {
      j["h_min"] = h_min;
      j["h_max"] = h_max;
      j.erase("h");
      j.erase("k");
    }
    return j;
  }
};

hattree::SolveOptions solve_options(const RunConfig& cfg) {
  hattree::SolveOptions opts;
  opts.tolerance = cfg.tolerance;
  opts.seed = cfg.seed;
  opts.max_iterations = cfg.max_iterations;
  if (cfg.solver == "dense") opts.solver = hattree::SolverKind::dense;
  if (cfg.solver == "iterative") opts.solver = hattree::SolverKind::iterative;
  return opts;
}

/// Graph from --in, or the hat tree for (--h, --k). Returns the HatTree part
/// when the graph was built rather than read.
std::pair<hattree::WeightedGraph, std::optional<hattree::HatTree>> obtain_graph(
    const RunConfig& cfg) {
  if (!cfg.in_path.empty()) {
    return {hattree::read_graph(hattree::read_text_file(cfg.in_path)), std::nullopt};
  }
  if (cfg.h < 1)
    throw hattree::Error(hattree::ErrorCode::invalid_parameter,
                         "give --h (with optional --k) or --in FILE");
  hattree::HatTree t = hattree::build_hat_tree(cfg.h, cfg.k_value());
  return {t.graph(), std::move(t)};
}

void emit(const RunConfig& cfg, nlohmann::json results) {
  nlohmann::json doc{{"config", cfg.to_json()}, {"results", std::move(results)}};
  std::string text = doc.dump(2) + "\n";
  if (cfg.out_path.empty())
    std::cout << text;
  else
    hattree::write_text_file(cfg.out_path, text);
}

int cmd_build(const RunConfig& cfg) {
  if (cfg.h < 1)
    throw hattree::Error(hattree::ErrorCode::invalid_parameter, "build needs --h");
  hattree::HatTree t = hattree::build_hat_tree(cfg.h, cfg.k_value());
  std::string text;
  if (cfg.format == "edgelist")
    text = hattree::write_edgelist(t.graph());
  else if (cfg.format == "json")
    text = hattree::hat_tree_json(t).dump(2) + "\n";
  else if (cfg.format == "dot")
    text = hattree::write_dot(t.graph(), &t);
  else
    throw hattree::Error(hattree::ErrorCode::invalid_parameter,
                         "format must be edgelist, json or dot");
  if (cfg.out_path.empty())
    std::cout << text;
  else
    hattree::write_text_file(cfg.out_path, text);
  std::cerr << "hat tree h=" << cfg.h << " k=" << cfg.k_value() << ": "
            << t.graph().vertex_count() << " vertices, " << t.graph().edge_count()
            << " edges\n";
  return kExitOk;
}

int cmd_spectrum(const RunConfig& cfg) {
  auto [g, t] = obtain_graph(cfg);
  try {
    hattree::SpectralReport rep = hattree::lambda1(g, solve_options(cfg));
    emit(cfg, nlohmann::json::array({hattree::spectral_json(rep)}));
    return kExitOk;
  } catch (const hattree::ConvergenceFailure& e) {
    emit(cfg, nlohmann::json::array({hattree::spectral_json(e.best)}));
    std::cerr << e.what() << "\n";
    return kExitNumeric;
  }
}

int cmd_cheeger(const RunConfig& cfg) {
  auto [g, t] = obtain_graph(cfg);
  hattree::CheegerReport rep;
  if (cfg.method.empty() || cfg.method == "exact") {
    rep = hattree::cheeger_exact(g);
  } else if (cfg.method == "sweep") {
    hattree::SpectralReport sp = hattree::lambda1(g, solve_options(cfg));
    rep = hattree::cheeger_sweep(g, sp.eigenvector);
  } else {
    throw hattree::Error(hattree::ErrorCode::invalid_parameter,
                         "method must be exact or sweep");
  }
  emit(cfg, nlohmann::json::array({hattree::cheeger_json(rep)}));
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  if (cfg.h < 1)
    throw hattree::Error(hattree::ErrorCode::invalid_parameter, "verify needs --h");
  const int k = cfg.k_value();
  hattree::SolveOptions opts = solve_options(cfg);
  auto results = nlohmann::json::array();
  std::vector<std::string> failing;
  auto push = [&](const hattree::CertificateReport& c) {
    results.push_back(hattree::certificate_json(c));
    if (!c.pass) failing.push_back(c.claim);
  };
  hattree::Theorem1Certificates th1 = hattree::theorem1_certificate(cfg.h, k, opts);
  push(th1.diameter);
  push(th1.gap);
  push(th1.log_diameter);
  hattree::QhGapCertificates qh = hattree::check_qh_gap(cfg.h);
  push(qh.gap);
  if (qh.cheeger) push(*qh.cheeger);
  push(hattree::check_subdivision_scaling(cfg.h, k, opts));
  hattree::HatTree t = hattree::build_hat_tree(cfg.h, k);
  hattree::ProofSuiteReport suite =
      hattree::proof_inequality_suite(t, cfg.trials, cfg.seed);
  push(suite.horizontal);
  push(suite.vertical);
  push(suite.jensen);
  push(suite.combined);
  emit(cfg, std::move(results));
  if (!failing.empty()) {
    std::cerr << "failing claims:";
    for (const auto& c : failing) std::cerr << " " << c;
    std::cerr << "\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

int cmd_mixing(const RunConfig& cfg) {
  auto [g, t] = obtain_graph(cfg);
  hattree::MixingOptions mo;
  mo.eps = cfg.eps;
  mo.seed = cfg.seed;
  if (cfg.method == "monte_carlo") mo.method = hattree::MixMethod::monte_carlo;
  if (t) {
    mo.starts = hattree::mixing_start_set(*t);
    mo.t_max = 64 * std::int64_t{t->height()} * t->subdivision() * t->subdivision();
  }
  if (g.vertex_count() > 2000) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> pick(0, g.vertex_count() - 1);
    if (mo.starts.empty()) mo.starts.push_back(0);
    for (int i = 0; i < 8; ++i) mo.starts.push_back(pick(rng));
    if (cfg.method.empty()) mo.method = hattree::MixMethod::monte_carlo;
  }
  hattree::MixingReport rep = hattree::mixing_time(g, mo);
  emit(cfg, nlohmann::json::array({hattree::mixing_json(rep)}));
  std::string traj_path = cfg.trajectory_path;
  if (traj_path.empty() && !cfg.out_path.empty()) traj_path = cfg.out_path + ".csv";
  if (!traj_path.empty())
    hattree::write_text_file(traj_path, hattree::trajectory_csv(rep));
  return kExitOk;
}

int cmd_metrics(const RunConfig& cfg) {
  auto [g, t] = obtain_graph(cfg);
  hattree::StatMode mode =
      cfg.mode == "sampled" ? hattree::StatMode::sampled : hattree::StatMode::exact;
  hattree::DistanceStats st = hattree::distance_stats(
      g, mode, mode == hattree::StatMode::sampled ? cfg.pairs : 0, cfg.seed);
  emit(cfg, nlohmann::json::array({hattree::distance_json(st)}));
  return kExitOk;
}

std::string csv_num(double x) { return hattree::detail::format_double(x); }

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.h_min < 1 || cfg.h_max < cfg.h_min)
    throw hattree::Error(hattree::ErrorCode::invalid_parameter,
                         "need 1 <= h-min <= h-max");
  std::string csv =
      "h,k,n,m,lambda1,bound_1_over_7k2,diam,hk,avg_sq_dist,t_mix,relax_time,"
      "product_u,error\n";
  for (int h = cfg.h_min; h <= cfg.h_max; ++h) {
    const int k = cfg.k.value_or(1 << h);
    std::string err;
    std::string lam_s, diam_s, avg_s, tmix_s, relax_s, prod_s, n_s, m_s;
    try {
      hattree::HatTree t = hattree::build_hat_tree(h, k);
      n_s = std::to_string(t.graph().vertex_count());
      m_s = std::to_string(t.graph().edge_count());
      double lam = 0.0;
      try {
        lam = hattree::lambda1(t.graph(), solve_options(cfg)).lambda1;
        lam_s = csv_num(lam);
      } catch (const hattree::Error& e) {
        err = e.what();
      }
      try {
        hattree::DistanceStats ds = hattree::distance_stats(t.graph());
        diam_s = std::to_string(ds.diameter);
        avg_s = csv_num(ds.avg_sq_distance);
        if (!lam_s.empty()) prod_s = csv_num(lam * ds.avg_sq_distance);
      } catch (const hattree::Error& e) {
        err = err.empty() ? e.what() : err;
      }
      try {
        hattree::MixingOptions mo;
        mo.eps = cfg.eps;
        mo.seed = cfg.seed;
        mo.starts = hattree::mixing_start_set(t);
        mo.t_max = 64 * std::int64_t{h} * k * k;
        if (t.graph().vertex_count() > 2000) mo.method = hattree::MixMethod::monte_carlo;
        hattree::MixingReport mr = hattree::mixing_time(t.graph(), mo);
        tmix_s = std::to_string(mr.t_mix) + (mr.cap_reached ? "(cap)" : "");
        relax_s = csv_num(mr.relaxation_time);
      } catch (const hattree::Error& e) {
        err = err.empty() ? e.what() : err;
      }
    } catch (const hattree::Error& e) {
      err = e.what();
    }
    csv += std::to_string(h) + "," + std::to_string(k) + "," + n_s + "," + m_s + "," +
           lam_s + "," + csv_num(1.0 / (7.0 * double(k) * double(k))) + "," + diam_s +
           "," + std::to_string(std::int64_t{h} * k) + "," + avg_s + "," + tmix_s +
           "," + relax_s + "," + prod_s + "," + err + "\n";
  }
  if (cfg.out_path.empty())
    std::cout << csv;
  else
    hattree::write_text_file(cfg.out_path, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hat trees: construction, spectral gaps, Cheeger constants, "
               "random-walk mixing, and inequality certificates"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help and exit");
  app.set_version_flag("--version", hattree::kVersion);

  RunConfig cfg;
  auto add_common = [&](CLI::App* sub, bool with_input) {
    sub->set_help_flag("--help", "print help and exit");
    sub->add_option("--h", cfg.h, "tree height (>= 1)");
    sub->add_option("--k", cfg.k, "subdivision count (default 2^h)");
    if (with_input) sub->add_option("--in", cfg.in_path, "read graph from file");
    sub->add_option("--out", cfg.out_path, "write output to file");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--tol", cfg.tolerance, "solver residual tolerance");
    sub->add_option("--max-iter", cfg.max_iterations, "iterative solver budget");
    sub->add_option("--solver", cfg.solver, "dense or iterative")
        ->check(CLI::IsMember({"dense", "iterative"}));
    return sub;
  };

  auto* build = add_common(app.add_subcommand("build", "construct and export a hat tree"),
                           false);
  build->add_option("--format", cfg.format, "edgelist, json or dot")
      ->check(CLI::IsMember({"edgelist", "json", "dot"}));

  add_common(app.add_subcommand("spectrum", "smallest non-zero Laplacian eigenvalue"),
             true);

  auto* cheeger = add_common(
      app.add_subcommand("cheeger", "Cheeger constant (exact or sweep cut)"), true);
  cheeger->add_option("--method", cfg.method, "exact or sweep")
      ->check(CLI::IsMember({"exact", "sweep"}));

  auto* verify = add_common(
      app.add_subcommand("verify", "certify the inequality suite for (h, k)"), false);
  verify->add_option("--trials", cfg.trials, "randomized trials per claim");

  auto* mixing = add_common(
      app.add_subcommand("mixing", "lazy-walk mixing time and TV trajectory"), true);
  mixing->add_option("--eps", cfg.eps, "TV threshold in (0,1)");
  mixing->add_option("--method", cfg.method, "exact or monte_carlo")
      ->check(CLI::IsMember({"exact", "monte_carlo"}));
  mixing->add_option("--trajectory", cfg.trajectory_path, "trajectory CSV path");

  auto* metrics = add_common(
      app.add_subcommand("metrics", "diameter and average squared distance"), true);
  metrics->add_option("--mode", cfg.mode, "exact or sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));
  metrics->add_option("--pairs", cfg.pairs, "sampled pairs");

  auto* sweep = add_common(
      app.add_subcommand("sweep", "one CSV row per h: gap, distances, mixing"), false);
  sweep->add_option("--h-min", cfg.h_min, "first h");
  sweep->add_option("--h-max", cfg.h_max, "last h");
  sweep->add_option("--eps", cfg.eps, "TV threshold for the t_mix column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  try {
    if (cfg.command == "build") return cmd_build(cfg);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "cheeger") return cmd_cheeger(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "mixing") return cmd_mixing(cfg);
    if (cfg.command == "metrics") return cmd_metrics(cfg);
    if (cfg.command == "sweep") return cmd_sweep(cfg);
    std::cerr << "unknown command\n";
    return kExitUsage;
  } catch (const hattree::Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == hattree::ErrorCode::invalid_parameter ? kExitUsage : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
