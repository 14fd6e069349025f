#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hattree/builders.hpp"
#include "hattree/cheeger.hpp"
#include "support/oracles.hpp"

using namespace hattree;

TEST_CASE("exact Cheeger constant of unit paths") {
  for (int n : {2, 3, 4, 5, 6, 7, 8, 9, 12}) {
    CheegerReport r = cheeger_exact(oracles::path_graph(n));
    INFO("n=" << n);
    REQUIRE(r.value == 1.0 / (n / 2));
    std::vector<int> expect;
    for (int v = 0; v < n / 2; ++v) expect.push_back(v);
    REQUIRE(r.witness == expect);
    REQUIRE(r.value >= 2.0 / n);
  }
}

TEST_CASE("exact Cheeger constant of the chains") {
  SECTION("Q_2 equals 4/3 with witness {0,1}") {
    CheegerReport r = cheeger_exact(build_weighted_chain(2).graph);
    REQUIRE(r.value == 4.0 / 3.0);
    REQUIRE(r.witness == std::vector<int>{0, 1});
    REQUIRE(r.cut_weight == 4.0);
    REQUIRE(r.witness_mass == 3.0);
  }
  SECTION("closed form 2^h/(2^h - 1) for the whole range") {
    for (int h = 1; h <= 8; ++h) {
      CheegerReport r = cheeger_exact(build_weighted_chain(h).graph);
      REQUIRE(r.value == Catch::Approx(std::ldexp(1.0, h) / (std::ldexp(1.0, h) - 1))
                             .epsilon(1e-12));
      REQUIRE(r.value >= 1.0);
      std::vector<int> expect;
      for (int v = 0; v < h; ++v) expect.push_back(v);
      REQUIRE(r.witness == expect);
    }
  }
}

TEST_CASE("witness re-derives the reported ratio") {
  for (std::uint64_t seed : {81, 82, 83, 84}) {
    WeightedGraph g = oracles::random_connected_graph(seed, 4, 12);
    CheegerReport r = cheeger_exact(g);
    double cut = 0.0, mass = 0.0;
    for (int v : r.witness) mass += g.vertex_weight(v);
    for (const auto& e : g.edges()) {
      bool cu = std::binary_search(r.witness.begin(), r.witness.end(), e.u);
      bool cv = std::binary_search(r.witness.begin(), r.witness.end(), e.v);
      if (cu != cv) cut += e.w;
    }
    REQUIRE(r.value == Catch::Approx(cut / mass).epsilon(1e-12));
    REQUIRE(mass <= g.total_vertex_weight() / 2 + 1e-9);
  }
}

TEST_CASE("enumeration guard") {
  REQUIRE_THROWS_AS(cheeger_exact(oracles::path_graph(25)), Error);
  try {
    cheeger_exact(oracles::path_graph(25));
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::size_limit);
  }
}

TEST_CASE("sweep cut") {
  SECTION("Fiedler vector of a path recovers the half cut") {
    WeightedGraph g = oracles::path_graph(8);
    SpectralReport sp = lambda1(g);
    CheegerReport sweep = cheeger_sweep(g, sp.eigenvector);
    REQUIRE(sweep.value == Catch::Approx(0.25));
    REQUIRE(sweep.method == CheegerMethod::sweep);
  }
  SECTION("indicator of an optimal set is recovered exactly") {
    WeightedGraph g = build_weighted_chain(2).graph;
    std::vector<double> f{1.0, 1.0, 0.0};
    REQUIRE(cheeger_sweep(g, f).value == cheeger_exact(g).value);
  }
  SECTION("sweep never beats exact") {
    for (std::uint64_t seed = 300; seed < 350; ++seed) {
      WeightedGraph g = oracles::random_connected_graph(seed, 4, 14);
      CheegerReport ex = cheeger_exact(g);
      CheegerReport sw = cheeger_sweep(g, lambda1(g).eigenvector);
      INFO("seed " << seed);
      REQUIRE(sw.value >= ex.value - 1e-12);
    }
  }
  SECTION("constant function rejected") {
    REQUIRE_THROWS_AS(cheeger_sweep(oracles::path_graph(3), std::vector{1.0, 1.0, 1.0}),
                      Error);
  }
  SECTION("scales past the enumeration guard") {
    WeightedGraph g = oracles::path_graph(64);
    CheegerReport r = cheeger_sweep(g, lambda1(g).eigenvector);
    REQUIRE(r.value == Catch::Approx(1.0 / 32.0));
  }
}

TEST_CASE("discrete Cheeger inequality") {
  SECTION("K2 margin in closed form") {
    CheegerInequalityReport r = verify_cheeger_inequality(oracles::path_graph(2));
    REQUIRE(r.lambda1 == Catch::Approx(2.0));
    REQUIRE(r.cheeger == 1.0);
    REQUIRE(r.d_max == 1.0);
    REQUIRE(r.margin == Catch::Approx(1.5));
    REQUIRE(r.pass);
  }
  SECTION("Q_2 margin in closed form") {
    CheegerInequalityReport r = verify_cheeger_inequality(build_weighted_chain(2).graph);
    REQUIRE(r.lambda1 == Catch::Approx(3.0 - std::sqrt(2.0)).margin(1e-10));
    REQUIRE(r.cheeger == 4.0 / 3.0);
    REQUIRE(r.d_max == 3.0);
    REQUIRE(r.margin ==
            Catch::Approx(3.0 - std::sqrt(2.0) - (16.0 / 9.0) / 6.0).margin(1e-9));
    REQUIRE(r.pass);
  }
  SECTION("random graphs never violate it") {
    for (std::uint64_t seed = 900; seed < 960; ++seed) {
      WeightedGraph g = oracles::random_connected_graph(seed, 2, 12);
      CheegerInequalityReport r = verify_cheeger_inequality(g);
      INFO("seed " << seed);
      REQUIRE(r.margin >= -1e-9);
      REQUIRE(r.pass);
    }
  }
}
