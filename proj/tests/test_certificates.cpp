#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hattree/builders.hpp"
#include "hattree/certificates.hpp"
#include "support/oracles.hpp"

using namespace hattree;

namespace {

double sq_norm(const std::vector<double>& f) {
  double s = 0.0;
  for (double x : f) s += x * x;
  return s;
}

}  // namespace

TEST_CASE("level averaging") {
  HatTree t = build_hat_tree(2, 3);
  const int n = t.graph().vertex_count();
  SECTION("fixes constants") {
    std::vector<double> f(n, 2.5);
    REQUIRE(level_average(t, f) == f);
  }
  SECTION("fixes level-constant functions") {
    std::vector<double> f(n);
    for (int v = 0; v < n; ++v) f[v] = 3.0 * t.level(v);
    REQUIRE(level_average(t, f) == f);
  }
  SECTION("triangle leaves average to zero") {
    HatTree tri = build_hat_tree(1, 1);
    std::vector<double> out = level_average(tri, std::vector{0.0, 1.0, -1.0});
    REQUIRE(out == std::vector{0.0, 0.0, 0.0});
  }
  SECTION("projection: idempotent, Pythagoras, preserves zero sum") {
    for (std::uint64_t seed : {5, 6, 7}) {
      std::vector<double> f = random_centered_function(n, seed);
      std::vector<double> fbar = level_average(t, f);
      REQUIRE(level_average(t, fbar) == fbar);
      std::vector<double> dev(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) dev[i] = f[i] - fbar[i];
      REQUIRE(sq_norm(f) ==
              Catch::Approx(sq_norm(fbar) + sq_norm(dev)).epsilon(1e-9));
      double total = 0.0;
      for (double x : fbar) total += x;
      REQUIRE(std::abs(total) < 1e-9);
    }
  }
  SECTION("dimension mismatch") {
    REQUIRE_THROWS_AS(level_average(t, std::vector{1.0}), Error);
  }
}

TEST_CASE("horizontal bound") {
  HatTree t = build_hat_tree(3, 8);
  const int n = t.graph().vertex_count();
  SECTION("level-constant functions have zero right side") {
    std::vector<double> f(n);
    for (int v = 0; v < n; ++v) f[v] = double(t.level(v));
    CertificateReport c = check_horizontal(t, f);
    REQUIRE(c.rhs == 0.0);
    REQUIRE(c.pass);
  }
  SECTION("random gaussians pass, including per level") {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> f = random_centered_function(n, 1000 + trial);
      CertificateReport c = check_horizontal(t, f);
      REQUIRE(c.pass);
      for (const LevelMargin& lm : per_level_horizontal(t, f)) {
        INFO("trial " << trial << " level " << lm.level);
        REQUIRE(lm.pass);
      }
    }
  }
}

TEST_CASE("vertical bound") {
  HatTree t = build_hat_tree(3, 8);
  const int n = t.graph().vertex_count();
  SECTION("zero stays zero") {
    CertificateReport c = check_vertical(t, std::vector<double>(n, 0.0));
    REQUIRE(c.lhs == 0.0);
    REQUIRE(c.pass);
  }
  SECTION("random gaussians pass") {
    for (int trial = 0; trial < 100; ++trial)
      REQUIRE(check_vertical(t, random_centered_function(n, 2000 + trial)).pass);
  }
  SECTION("deep-level indicator has a strictly positive margin") {
    HatTree t24 = build_hat_tree(2, 4);
    std::vector<double> f(t24.graph().vertex_count(), 0.0);
    const int last = t24.level_count() - 1;
    for (std::int64_t j = 0; j < t24.level_size(last); ++j) f[t24.vertex_at(last, j)] = 1.0;
    CertificateReport c = check_vertical(t24, f);
    REQUIRE(c.pass);
    REQUIRE(c.margin > 0.0);
  }
}

TEST_CASE("jensen contraction") {
  HatTree t = build_hat_tree(3, 8);
  const int n = t.graph().vertex_count();
  SECTION("level-constant functions give exact equality") {
    std::vector<double> f(n);
    for (int v = 0; v < n; ++v) f[v] = 0.5 * t.level(v) * t.level(v);
    CertificateReport c = check_jensen(t, f);
    REQUIRE(c.margin == 0.0);
    REQUIRE(c.pass);
  }
  SECTION("random gaussians pass") {
    for (int trial = 0; trial < 100; ++trial)
      REQUIRE(check_jensen(t, random_centered_function(n, 3000 + trial)).pass);
  }
  SECTION("triangle by hand: one tree level") {
    HatTree tri = build_hat_tree(1, 1);
    std::vector<double> f{0.3, -1.0, 2.0};
    CertificateReport c = check_jensen(tri, f);
    // tree edges (0,1) and (0,2); averaged leaves at 0.5
    REQUIRE(c.lhs == Catch::Approx(1.69 + 2.89));
    REQUIRE(c.rhs == Catch::Approx(2 * 0.04).margin(1e-12));
    REQUIRE(c.pass);
  }
  SECTION("uniform child counts per level") {
    HatTree t23 = build_hat_tree(2, 3);
    std::vector<int> counts = level_child_counts(t23);
    REQUIRE(counts == std::vector<int>{2, 1, 1, 2, 1, 1, 0});
  }
}

TEST_CASE("chain certificates") {
  SECTION("h=1 in closed form") {
    QhGapCertificates c = check_qh_gap(1);
    REQUIRE(c.gap.lhs == Catch::Approx(3.0).margin(1e-9));
    REQUIRE(c.gap.rhs == 1.0 / 6.0);
    REQUIRE(c.gap.pass);
    REQUIRE(c.cheeger);
    REQUIRE(c.cheeger->lhs == 2.0);
    REQUIRE(c.cheeger->pass);
  }
  SECTION("h=2 Cheeger is 4/3") {
    QhGapCertificates c = check_qh_gap(2);
    REQUIRE(c.cheeger->lhs == 4.0 / 3.0);
  }
  SECTION("whole range h=1..16") {
    for (int h = 1; h <= 16; ++h) {
      QhGapCertificates c = check_qh_gap(h);
      INFO("h=" << h);
      REQUIRE(c.gap.pass);
      REQUIRE(c.cheeger);
      REQUIRE(c.cheeger->pass);
    }
  }
  SECTION("no enumeration past h=20") {
    REQUIRE_FALSE(check_qh_gap(21).cheeger.has_value());
  }
}

TEST_CASE("subdivision scaling ratio") {
  SECTION("exact identity at k=1") {
    CertificateReport c = check_subdivision_scaling(3, 1);
    REQUIRE(c.lhs == 1.0);
    REQUIRE(c.pass);
  }
  SECTION("h=1 ratios match the frozen dense values") {
    REQUIRE(check_subdivision_scaling(1, 2).lhs == Catch::Approx(1.8426213).epsilon(1e-6));
    REQUIRE(check_subdivision_scaling(1, 4).lhs == Catch::Approx(2.4955259).epsilon(1e-6));
    REQUIRE(check_subdivision_scaling(1, 8).lhs == Catch::Approx(2.8811849).epsilon(1e-6));
    REQUIRE(check_subdivision_scaling(1, 2).pass);
  }
  SECTION("h=3 k=8 passes") { REQUIRE(check_subdivision_scaling(3, 8).pass); }
  SECTION("the ratio genuinely dips below one at h=4") {
    // subdividing the weighted chain does not scale the gap exactly; by h=4
    // the k^2-normalized ratio sits a few parts in a thousand under 1
    CertificateReport c = check_subdivision_scaling(4, 16);
    REQUIRE(c.lhs == Catch::Approx(0.9957829).epsilon(1e-6));
    REQUIRE_FALSE(c.pass);
  }
}

TEST_CASE("theorem-style certificates for the trees") {
  SECTION("smallest case h=1 k=2") {
    Theorem1Certificates c = theorem1_certificate(1, 2);
    REQUIRE(c.diameter_value == 2);
    REQUIRE(c.lambda1_value == Catch::Approx(1.3819660112501049).margin(1e-9));
    REQUIRE(c.gap.rhs == Catch::Approx(1.0 / 28.0));
    REQUIRE(c.diameter.pass);
    REQUIRE(c.gap.pass);
    REQUIRE(c.log_diameter.pass);
  }
  SECTION("doubling regime h=2..4") {
    for (int h = 2; h <= 4; ++h) {
      Theorem1Certificates c = theorem1_certificate(h, 1 << h);
      INFO("h=" << h);
      REQUIRE(c.diameter.pass);
      REQUIRE(c.gap.pass);
      REQUIRE(c.log_diameter.pass);
      REQUIRE(c.diameter_value == std::int64_t{h} << h);
    }
  }
}

TEST_CASE("lipschitz upper bound") {
  SECTION("tight on an edge") {
    LipschitzBound b = lipschitz_upper_bound(oracles::path_graph(2), std::vector{0.0, 1.0});
    REQUIRE(b.bound == 2.0);
    REQUIRE(b.certificate.pass);
    REQUIRE(b.certificate.margin == Catch::Approx(0.0).margin(1e-9));
  }
  SECTION("vertex index map on paths") {
    for (int n : {5, 20, 100}) {
      WeightedGraph g = oracles::path_graph(n);
      std::vector<double> f(n);
      for (int v = 0; v < n; ++v) f[v] = v;
      LipschitzBound b = lipschitz_upper_bound(g, f);
      REQUIRE(b.certificate.pass);
    }
  }
  SECTION("distance to the root on a hat tree") {
    HatTree t = build_hat_tree(3, 8);
    std::vector<double> f(t.graph().vertex_count());
    for (int v = 0; v < t.graph().vertex_count(); ++v) f[v] = t.level(v);
    LipschitzBound b = lipschitz_upper_bound(t.graph(), f);
    REQUIRE(b.certificate.pass);
    REQUIRE(b.bound == Catch::Approx(0.0241228).epsilon(1e-4));
  }
  SECTION("stretched maps are named") {
    try {
      lipschitz_upper_bound(oracles::path_graph(3), std::vector{0.0, 2.0, 3.0});
      FAIL();
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::invalid_map);
      REQUIRE(std::string(e.what()).find("(0,1)") != std::string::npos);
    }
  }
  SECTION("constant maps rejected") {
    REQUIRE_THROWS_AS(
        lipschitz_upper_bound(oracles::path_graph(2), std::vector{1.0, 1.0}), Error);
  }
}

TEST_CASE("distance-gap products") {
  SECTION("K2 in closed form") {
    Theorem2Products p = theorem2_product(oracles::path_graph(2));
    REQUIRE(p.product_uniform == Catch::Approx(1.0));
    REQUIRE(p.avg_sq_distance == 0.5);
  }
  SECTION("paths of different lengths stay comparable") {
    Theorem2Products a = theorem2_product(oracles::path_graph(10));
    Theorem2Products b = theorem2_product(oracles::path_graph(100));
    REQUIRE(a.product_uniform > 0.0);
    REQUIRE(b.product_uniform > 0.0);
    REQUIRE(b.product_uniform / a.product_uniform < 2.0);
    REQUIRE(a.product_uniform / b.product_uniform < 2.0);
  }
}

TEST_CASE("randomized proof suite") {
  HatTree t = build_hat_tree(3, 8);
  ProofSuiteReport suite = proof_inequality_suite(t, 200, 7);
  for (const CertificateReport* c :
       {&suite.horizontal, &suite.vertical, &suite.jensen, &suite.combined}) {
    REQUIRE(c->pass);
    REQUIRE(c->trials == 200);
    REQUIRE(c->seed == 7);
    REQUIRE(c->margin > 0.0);
  }
  SECTION("deterministic for a fixed seed") {
    ProofSuiteReport again = proof_inequality_suite(t, 200, 7);
    REQUIRE(again.horizontal.lhs == suite.horizontal.lhs);
    REQUIRE(again.combined.margin == suite.combined.margin);
  }
  SECTION("the variational route agrees: quotients and lambda1 both clear the bound") {
    const double bound = 1.0 / (7.0 * 64.0);
    REQUIRE(lambda1(t.graph()).lambda1 >= bound);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> f =
          random_centered_function(t.graph().vertex_count(), 5000 + trial);
      REQUIRE(rayleigh_quotient(t.graph(), f) >= bound);
    }
  }
  SECTION("the assembled bound follows the two-step chain") {
    // horizontal + jensen dominates the middle expression, which dominates
    // the final (7 k^2)^-1 bound
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> f =
          random_centered_function(t.graph().vertex_count(), 4000 + trial);
      CertificateReport hor = check_horizontal(t, f);
      CertificateReport jen = check_jensen(t, f);
      std::vector<double> fbar = level_average(t, f);
      std::vector<double> dev(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) dev[i] = f[i] - fbar[i];
      const double k2 = 64.0;
      double middle = (sq_norm(fbar) / 6.0 + sq_norm(dev)) / k2;
      double final_bound = sq_norm(f) / (7.0 * k2);
      REQUIRE(relative_margin(hor.lhs + jen.lhs, middle) >= -1e-9);
      REQUIRE(relative_margin(middle, final_bound) >= -1e-9);
    }
  }
}
