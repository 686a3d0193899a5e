#include <doctest.h>

#include <cmath>

#include "sqcsef/error.hpp"
#include "sqcsef/stats.hpp"
#include "sqcsef/synth.hpp"

using namespace sqcsef;
using namespace sqcsef::synth;

TEST_CASE("preset reproduces its summary statistics") {
  const auto spec = Spec::seedling_preset(3);
  const auto raw = generate(spec);
  REQUIRE(raw.samples() == 200);
  REQUIRE(raw.size() == 6);
  const auto d = describe(raw);
  for (std::size_t k = 0; k < 6; ++k) {
    CAPTURE(k);
    const auto& t = spec.stats[k];
    const double se = t.std / std::sqrt(200.0);
    CHECK(std::abs(d.columns[k].mean - t.mean) <= se);
    CHECK(d.columns[k].min >= t.min);
    CHECK(d.columns[k].max <= t.max);
  }
  for (Eigen::Index i = 0; i < raw.samples(); ++i) CHECK(raw.rows()(i, 2) == std::round(raw.rows()(i, 2)));
  const Eigen::MatrixXd r = stats::pearson_matrix(raw.rows());
  CHECK((r - spec.correlation).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("identity correlation gives nearly uncorrelated columns") {
  auto spec = Spec::seedling_preset(5);
  spec.correlation = Eigen::MatrixXd::Identity(6, 6);
  const Eigen::MatrixXd r = stats::pearson_matrix(generate(spec).rows());
  CHECK((r - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 0.2);
}

TEST_CASE("generation is seeded") {
  CHECK(generate(Spec::seedling_preset(1)).rows() == generate(Spec::seedling_preset(1)).rows());
  CHECK(generate(Spec::seedling_preset(1)).rows() != generate(Spec::seedling_preset(2)).rows());
}

TEST_CASE("invalid specifications") {
  CHECK_THROWS_AS(generate(Spec::seedling_preset(0, 2)), DataError);
  auto bad = Spec::seedling_preset(0);
  bad.correlation(0, 1) = bad.correlation(1, 0) = 0.99;
  bad.correlation(0, 5) = bad.correlation(5, 0) = -0.99;
  CHECK_THROWS_AS(generate(bad), NumericError);
  auto shape = Spec::seedling_preset(0);
  shape.stats.pop_back();
  CHECK_THROWS_AS(generate(shape), ConfigError);
}

TEST_CASE("planted views") {
  const auto p = planted_views(90, 0.3, 0.05, 1);
  CHECK(p.data.rows() == 90);
  CHECK(p.data.minCoeff() >= 0.0);
  CHECK(p.data.maxCoeff() <= 1.0);
  CHECK(p.labels[4] == 1);
  REQUIRE(p.partition.views.size() == 3);
  CHECK(p.partition.views[0].indicators == std::vector<int>{0, 4, 5});
  CHECK(p.partition.views[1].indicators == std::vector<int>{1, 3});
  CHECK(p.partition.views[2].indicators == std::vector<int>{2});
}
