#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hattree/builders.hpp"
#include "hattree/walk_metrics.hpp"
#include "support/oracles.hpp"

using namespace hattree;

TEST_CASE("bfs distances") {
  SECTION("path from an end") {
    BfsResult b = bfs_distances(oracles::path_graph(4), 0);
    REQUIRE(b.dist == std::vector<int>{0, 1, 2, 3});
    REQUIRE(b.complete);
  }
  SECTION("K2") {
    REQUIRE(bfs_distances(oracles::path_graph(2), 0).dist == std::vector<int>{0, 1});
  }
  SECTION("unreachable vertices are marked and flagged") {
    WeightedGraph g(3, {1, 1, 1}, {{0, 1, 1.0}});
    BfsResult b = bfs_distances(g, 0);
    REQUIRE(b.dist[2] == -1);
    REQUIRE_FALSE(b.complete);
  }
}

TEST_CASE("distance statistics") {
  SECTION("P3 exact") {
    DistanceStats s = distance_stats(oracles::path_graph(3));
    REQUIRE(s.diameter == 2);
    REQUIRE(s.avg_sq_distance == Catch::Approx(4.0 / 3.0));
  }
  SECTION("hat tree diameter equals hk in the doubling regime") {
    for (int h = 2; h <= 3; ++h) {
      DistanceStats s = distance_stats(build_hat_tree(h, 1 << h).graph());
      REQUIRE(s.diameter == std::int64_t{h} << h);
    }
  }
  SECTION("root eccentricity is exactly hk") {
    for (auto [h, k] : {std::pair{2, 4}, {3, 8}, {4, 5}}) {
      HatTree t = build_hat_tree(h, k);
      BfsResult b = bfs_distances(t.graph(), t.root());
      int ecc = 0;
      for (int d : b.dist) ecc = std::max(ecc, d);
      REQUIRE(ecc == h * k);
    }
  }
  SECTION("k^2-scaled average squared distance shows no growth trend in h") {
    double prev = -1.0;
    for (int h = 2; h <= 5; ++h) {
      const double k2 = std::ldexp(1.0, 2 * h);
      DistanceStats s = distance_stats(build_hat_tree(h, 1 << h).graph());
      const double scaled = s.avg_sq_distance / k2;
      if (prev > 0.0) REQUIRE(scaled / prev <= 2.0);
      prev = scaled;
    }
  }
  SECTION("sampled mode lands within three standard errors") {
    WeightedGraph g = build_hat_tree(2, 4).graph();
    DistanceStats exact = distance_stats(g);
    DistanceStats sampled = distance_stats(g, StatMode::sampled, 20000, 123);
    REQUIRE(sampled.std_error > 0.0);
    REQUIRE(std::abs(sampled.avg_sq_distance - exact.avg_sq_distance) <=
            3.0 * sampled.std_error);
    REQUIRE(sampled.diameter <= exact.diameter);
  }
  SECTION("exact mode size guard") {
    // guard triggers before any BFS work
    WeightedGraph big = build_hat_tree(5, 1600).graph();
    REQUIRE_THROWS_AS(distance_stats(big), Error);
  }
}

TEST_CASE("stationary distribution") {
  SECTION("K2") {
    REQUIRE(stationary_distribution(oracles::path_graph(2)) ==
            std::vector<double>{0.5, 0.5});
  }
  SECTION("P3 is degree proportional") {
    REQUIRE(stationary_distribution(oracles::path_graph(3)) ==
            std::vector<double>{0.25, 0.5, 0.25});
  }
  SECTION("triangle is uniform") {
    for (double p : stationary_distribution(oracles::cycle_graph(3)))
      REQUIRE(p == Catch::Approx(1.0 / 3.0));
  }
  SECTION("sums to one") {
    std::vector<double> pi =
        stationary_distribution(oracles::random_connected_graph(7, 10, 50));
    double total = 0.0;
    for (double p : pi) total += p;
    REQUIRE(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("lazy kernel evolution") {
  SECTION("zero steps is the identity") {
    std::vector<double> p{0.25, 0.75};
    REQUIRE(evolve_distribution(oracles::path_graph(2), p, 0) == p);
  }
  SECTION("one lazy step on K2 splits evenly") {
    std::vector<double> out =
        evolve_distribution(oracles::path_graph(2), std::vector{1.0, 0.0}, 1);
    REQUIRE(out == std::vector<double>{0.5, 0.5});
  }
  SECTION("stationarity is preserved to 1e-12") {
    WeightedGraph g = oracles::random_connected_graph(8, 8, 30);
    std::vector<double> pi = stationary_distribution(g);
    std::vector<double> out = evolve_distribution(g, pi, 50);
    for (std::size_t i = 0; i < pi.size(); ++i)
      REQUIRE(out[i] == Catch::Approx(pi[i]).margin(1e-12));
  }
  SECTION("mass drift stays under 1e-12 across 1e5 steps") {
    WeightedGraph g = oracles::random_connected_graph(9, 20, 40);
    std::vector<double> p(g.vertex_count(), 0.0);
    p[0] = 1.0;
    std::vector<double> out = evolve_distribution(g, p, 100000);
    double total = 0.0;
    for (double x : out) total += x;
    REQUIRE(std::abs(total - 1.0) <= 1e-12);
  }
  SECTION("invalid distributions rejected") {
    REQUIRE_THROWS_AS(
        evolve_distribution(oracles::path_graph(2), std::vector{0.7, 0.7}, 1), Error);
    REQUIRE_THROWS_AS(
        evolve_distribution(oracles::path_graph(2), std::vector{1.5, -0.5}, 1), Error);
  }
}

TEST_CASE("total variation distance") {
  REQUIRE(tv_distance(std::vector{0.5, 0.5}, std::vector{0.5, 0.5}) == 0.0);
  REQUIRE(tv_distance(std::vector{1.0, 0.0}, std::vector{0.0, 1.0}) == 1.0);
  REQUIRE(tv_distance(std::vector{1.0, 0.0}, std::vector{0.5, 0.5}) == 0.5);
  REQUIRE_THROWS_AS(tv_distance(std::vector{1.0}, std::vector{0.5, 0.5}), Error);
}

TEST_CASE("relaxation time") {
  SECTION("K2: non-lazy normalized gap is 2") {
    REQUIRE(relaxation_time(oracles::path_graph(2)) == Catch::Approx(0.5));
  }
  SECTION("triangle") {
    REQUIRE(relaxation_time(oracles::cycle_graph(3)) == Catch::Approx(2.0 / 3.0));
  }
  SECTION("P3: normalized path spectrum {0,1,2}") {
    REQUIRE(relaxation_time(oracles::path_graph(3)) == Catch::Approx(1.0));
  }
  SECTION("doubling-regime sweep stays under the gap bound times d_max") {
    for (int h = 2; h <= 4; ++h) {
      const double k = 1 << h;
      REQUIRE(relaxation_time(build_hat_tree(h, 1 << h).graph()) <= 5.0 * 7.0 * k * k);
    }
  }
  SECTION("disconnected rejected") {
    WeightedGraph g(4, {1, 1, 1, 1}, {{0, 1, 1.0}, {2, 3, 1.0}});
    REQUIRE_THROWS_AS(relaxation_time(g), Error);
  }
}

TEST_CASE("mixing time, exact evolution") {
  SECTION("K2 mixes in one lazy step") {
    MixingReport r = mixing_time(oracles::path_graph(2));
    REQUIRE(r.t_mix == 1);
    REQUIRE(r.tv_trajectory.front().second == 0.5);
    REQUIRE_FALSE(r.cap_reached);
  }
  SECTION("frozen worst-pair values in the doubling regime") {
    const std::int64_t expected[] = {51, 511, 3762};
    for (int h = 2; h <= 4; ++h) {
      HatTree t = build_hat_tree(h, 1 << h);
      MixingOptions mo;
      mo.starts = mixing_start_set(t);
      mo.t_max = 64 * std::int64_t{h} << (2 * h);
      MixingReport r = mixing_time(t.graph(), mo);
      INFO("h=" << h);
      REQUIRE(r.t_mix == expected[h - 2]);
      REQUIRE_FALSE(r.cap_reached);
      for (std::size_t i = 1; i < r.tv_trajectory.size(); ++i)
        REQUIRE(r.tv_trajectory[i].second <=
                r.tv_trajectory[i - 1].second + 1e-12);
    }
  }
  SECTION("monotone non-increasing in eps") {
    HatTree t = build_hat_tree(2, 4);
    MixingOptions mo;
    mo.starts = mixing_start_set(t);
    std::int64_t prev = -1;
    for (double eps : {0.5, 0.25, 0.1, 0.05}) {
      mo.eps = eps;
      std::int64_t tm = mixing_time(t.graph(), mo).t_mix;
      REQUIRE(tm >= prev);
      prev = tm;
    }
  }
  SECTION("cap is reported") {
    MixingOptions mo;
    mo.t_max = 3;
    mo.eps = 0.01;
    MixingReport r = mixing_time(oracles::cycle_graph(12), mo);
    REQUIRE(r.cap_reached);
    REQUIRE(r.t_mix == 3);
  }
  SECTION("exact size guard") {
    WeightedGraph big = build_hat_tree(5, 100).graph();
    REQUIRE_THROWS_AS(mixing_time(big), Error);
  }
  SECTION("start policy string names the starts") {
    HatTree t = build_hat_tree(2, 2);
    MixingOptions mo;
    mo.starts = mixing_start_set(t);
    REQUIRE(mixing_time(t.graph(), mo).start_policy == "worst_of:0,9");
  }
}

TEST_CASE("mixing time, monte carlo estimate") {
  HatTree t = build_hat_tree(2, 4);
  MixingOptions exact_opts;
  exact_opts.starts = mixing_start_set(t);
  std::int64_t exact_t = mixing_time(t.graph(), exact_opts).t_mix;

  MixingOptions mc = exact_opts;
  mc.method = MixMethod::monte_carlo;
  mc.walkers = 40000;
  mc.seed = 5;
  MixingReport r = mixing_time(t.graph(), mc);
  REQUIRE(r.method == MixMethod::monte_carlo);
  REQUIRE(r.walkers == 40000);
  REQUIRE_FALSE(r.note.empty());
  // the occupancy estimate is upward biased; allow a generous band
  REQUIRE(r.t_mix >= exact_t / 2);
  REQUIRE(r.t_mix <= exact_t * 3);
  SECTION("reproducible for a fixed seed") {
    REQUIRE(mixing_time(t.graph(), mc).t_mix == r.t_mix);
  }
}
