#include <doctest.h>

#include "oracles.hpp"
#include "sqcsef/error.hpp"
#include "sqcsef/kmeans.hpp"

using namespace sqcsef;

TEST_CASE("well separated pairs") {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 0, 1, 10, 10, 10, 11;
  kmeans::Config cfg;
  cfg.k = 2;
  const auto r = kmeans::fit(x, cfg);
  CHECK(r.assignments[0] == r.assignments[1]);
  CHECK(r.assignments[2] == r.assignments[3]);
  CHECK(r.assignments[0] != r.assignments[2]);
  const Eigen::RowVector2d a = r.centroids.row(r.assignments[0]);
  const Eigen::RowVector2d b = r.centroids.row(r.assignments[2]);
  CHECK(a.isApprox(Eigen::RowVector2d(0, 0.5)));
  CHECK(b.isApprox(Eigen::RowVector2d(10, 10.5)));
  CHECK(r.inertia == doctest::Approx(1.0));
  CHECK(r.method == ClusterMethod::kmeans);
}

TEST_CASE("single cluster is the column mean") {
  Rng rng(1);
  const Eigen::MatrixXd x = oracle::uniform_points(rng, 12, 3);
  kmeans::Config cfg;
  cfg.k = 1;
  const auto r = kmeans::fit(x, cfg);
  CHECK((r.centroids.row(0) - x.colwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.inertia == doctest::Approx((x.rowwise() - x.colwise().mean()).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("eight points, k = 2, reaches the exhaustive optimum") {
  Rng rng(99);
  const Eigen::MatrixXd x = oracle::uniform_points(rng, 8, 2);
  kmeans::Config cfg;
  cfg.k = 2;
  cfg.n_restarts = 20;
  const auto r = kmeans::fit(x, cfg);
  CHECK(std::abs(r.inertia - oracle::optimal_inertia(oracle::to_points(x), 2)) < 1e-9);
}

TEST_CASE("multi-restart optimum on small instances") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 5 + static_cast<int>(rng.below(5));
    const int k = 2 + static_cast<int>(rng.below(2));
    const Eigen::MatrixXd x = oracle::uniform_points(rng, m, 2);
    kmeans::Config cfg;
    cfg.k = k;
    cfg.n_restarts = 30;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto r = kmeans::fit(x, cfg);
    CHECK(std::abs(r.inertia - oracle::optimal_inertia(oracle::to_points(x), k)) < 1e-9);
  }
}

TEST_CASE("result invariants") {
  Rng rng(5);
  const Eigen::MatrixXd x = oracle::uniform_points(rng, 60, 4);
  kmeans::Config cfg;
  cfg.k = 4;
  cfg.seed = 42;
  std::vector<kmeans::RestartTrace> traces;
  const auto r = kmeans::fit(x, cfg, &traces);
  std::vector<int> count(4, 0);
  for (int a : r.assignments) ++count[static_cast<std::size_t>(a)];
  for (int c : count) CHECK(c > 0);
  CHECK((r.centroids - cluster_means(x, r.assignments, 4)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(r.inertia == doctest::Approx(inertia(x, r.assignments, r.centroids)).epsilon(1e-12));
  REQUIRE(traces.size() == 10);
  for (const auto& t : traces) {
    for (std::size_t i = 1; i < t.inertia.size(); ++i) CHECK(t.inertia[i] <= t.inertia[i - 1] + 1e-12);
  }
  const auto again = kmeans::fit(x, cfg);
  CHECK(again.assignments == r.assignments);
  CHECK(again.centroids == r.centroids);
  CHECK(again.inertia == r.inertia);
}

TEST_CASE("kmeans++ initialization also converges") {
  Rng rng(8);
  const Eigen::MatrixXd x = oracle::uniform_points(rng, 9, 2);
  kmeans::Config cfg;
  cfg.k = 3;
  cfg.n_restarts = 30;
  cfg.init = kmeans::Init::kmeans_plus_plus;
  CHECK(std::abs(kmeans::fit(x, cfg).inertia - oracle::optimal_inertia(oracle::to_points(x), 3)) < 1e-9);
}

TEST_CASE("errors") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 1, 2, 2, 3, 3;
  kmeans::Config cfg;
  cfg.k = 4;
  CHECK_THROWS_AS(kmeans::fit(x, cfg), ConfigError);
  Eigen::MatrixXd same = Eigen::MatrixXd::Ones(5, 2);
  cfg.k = 2;
  CHECK_THROWS_AS(kmeans::fit(same, cfg), NumericError);
  Eigen::MatrixXd two(4, 1);
  two << 0, 0, 1, 1;
  cfg.k = 3;
  CHECK_THROWS_AS(kmeans::fit(two, cfg), NumericError);
}

TEST_CASE("method names") {
  CHECK(parse_cluster_method("cvcl") == ClusterMethod::cvcl);
  CHECK(to_string(ClusterMethod::kmeans) == "kmeans");
  CHECK_THROWS_AS(parse_cluster_method("dbscan"), ConfigError);
}
