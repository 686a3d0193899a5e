#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sqcsef/cluster_eval.hpp"
#include "sqcsef/error.hpp"

using namespace sqcsef;
using namespace sqcsef::validity;

namespace {

Eigen::MatrixXd six_points() {
  Eigen::MatrixXd x(6, 2);
  x << 0, 0, 1, 0, 0, 1, 5, 5, 6, 5, 5, 7;
  return x;
}
const std::vector<int> kSixLabels{0, 0, 0, 1, 1, 1};

}  // namespace

TEST_CASE("six-point instance against hand formulas") {
  const auto x = six_points();
  const auto p = oracle::to_points(x);
  CHECK(std::abs(silhouette(x, kSixLabels) - oracle::silhouette(p, kSixLabels, 2)) < 1e-9);
  CHECK(std::abs(calinski_harabasz(x, kSixLabels).value - oracle::calinski_harabasz(p, kSixLabels, 2)) < 1e-9);
  CHECK(std::abs(davies_bouldin(x, kSixLabels) - oracle::davies_bouldin(p, kSixLabels, 2)) < 1e-9);
}

TEST_CASE("random instances against brute force") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 3;
    const Eigen::MatrixXd x = oracle::uniform_points(rng, 10, 3);
    const auto labels = oracle::random_labels(rng, 10, k);
    const auto p = oracle::to_points(x);
    CHECK(std::abs(silhouette(x, labels) - oracle::silhouette(p, labels, k)) < 1e-9);
    CHECK(std::abs(calinski_harabasz(x, labels).value - oracle::calinski_harabasz(p, labels, k)) < 1e-9);
    CHECK(std::abs(davies_bouldin(x, labels) - oracle::davies_bouldin(p, labels, k)) < 1e-9);
  }
}

TEST_CASE("limit and degenerate cases") {
  Eigen::MatrixXd far(4, 1);
  far << 0, 0, 1e12, 1e12;
  const std::vector<int> pairs{0, 0, 1, 1};
  CHECK(silhouette(far, pairs) == doctest::Approx(1.0));
  CHECK(davies_bouldin(far, pairs) == 0.0);
  const auto ch = calinski_harabasz(far, pairs);
  CHECK(ch.infinite);
  CHECK(std::isinf(ch.value));

  const Eigen::MatrixXd same = Eigen::MatrixXd::Ones(4, 2);
  CHECK(silhouette(same, pairs) == 0.0);
  CHECK_THROWS_AS(davies_bouldin(same, pairs), NumericError);

  Eigen::MatrixXd three(3, 1);
  three << 0, 1, 2;
  CHECK_THROWS_AS(calinski_harabasz(three, {0, 1, 2}), NumericError);
  CHECK_THROWS_AS(silhouette(three, {0, 0, 0}), NumericError);
  CHECK_THROWS_AS(silhouette(three, {0, 2, 2}), NumericError);
}

TEST_CASE("singletons score zero in the silhouette") {
  Eigen::MatrixXd x(4, 1);
  x << 0, 0.1, 0.2, 5;
  const std::vector<int> labels{0, 0, 0, 1};
  CHECK(std::abs(silhouette(x, labels) - oracle::silhouette(oracle::to_points(x), labels, 2)) < 1e-12);
}

TEST_CASE("tightening clusters") {
  const auto x = six_points();
  Eigen::MatrixXd tight = x;
  const Eigen::MatrixXd c = cluster_means(x, kSixLabels, 2);
  for (int i = 0; i < 6; ++i) tight.row(i) = c.row(kSixLabels[static_cast<std::size_t>(i)]) + 0.5 * (x.row(i) - c.row(kSixLabels[static_cast<std::size_t>(i)]));
  CHECK(calinski_harabasz(tight, kSixLabels).value > calinski_harabasz(x, kSixLabels).value);
  CHECK(davies_bouldin(tight, kSixLabels) == doctest::Approx(0.5 * davies_bouldin(x, kSixLabels)).epsilon(1e-12));
}

TEST_CASE("invariance under translation, rotation and scaling") {
  Rng rng(4);
  const Eigen::MatrixXd x = oracle::uniform_points(rng, 10, 2);
  const auto labels = oracle::random_labels(rng, 10, 3);
  const double th = 0.7;
  Eigen::Matrix2d r;
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const Eigen::MatrixXd y = ((x * r).array() * 3.5).matrix().rowwise() + Eigen::RowVector2d(4, -2);
  CHECK(silhouette(y, labels) == doctest::Approx(silhouette(x, labels)).epsilon(1e-10));
  CHECK(calinski_harabasz(y, labels).value == doctest::Approx(calinski_harabasz(x, labels).value).epsilon(1e-10));
  CHECK(davies_bouldin(y, labels) == doctest::Approx(davies_bouldin(x, labels)).epsilon(1e-10));
}

TEST_CASE("separation trends on planted clusters") {
  const auto make = [](double sep, double spread) {
    Eigen::MatrixXd x(30, 2);
    Rng rng(12);
    for (int i = 0; i < 30; ++i) {
      const int c = i % 3;
      x(i, 0) = c * sep + spread * rng.normal();
      x(i, 1) = spread * rng.normal();
    }
    return x;
  };
  std::vector<int> labels(30);
  for (int i = 0; i < 30; ++i) labels[static_cast<std::size_t>(i)] = i % 3;
  double prev_s = -2, prev_ch = -1, prev_db = 1e300;
  for (double sep : {1.0, 2.0, 4.0, 8.0}) {
    const auto x = make(sep, 0.5);
    const double s = silhouette(x, labels), ch = calinski_harabasz(x, labels).value, db = davies_bouldin(x, labels);
    CHECK(s > prev_s);
    CHECK(ch > prev_ch);
    CHECK(db < prev_db);
    prev_s = s, prev_ch = ch, prev_db = db;
  }
  double prev_tight = -2;
  for (double spread : {1.0, 0.5, 0.25}) {
    const double s = silhouette(make(3.0, spread), labels);
    CHECK(s > prev_tight);
    prev_tight = s;
  }
}

TEST_CASE("report table") {
  ClusteringResult r;
  r.assignments = kSixLabels;
  r.centroids = cluster_means(six_points(), kSixLabels, 2);
  const auto v = evaluate(six_points(), r);
  const auto md = validity_markdown({v});
  CHECK(md.find("Silhouette Index") != std::string::npos);
  CHECK(md.find("K-Means") != std::string::npos);
}
