#include <doctest.h>

#include <cmath>

#include "reference_data.hpp"
#include "sqcsef/error.hpp"
#include "sqcsef/grading.hpp"
#include "sqcsef/rng.hpp"

using namespace sqcsef;
using namespace sqcsef::grading;

namespace {

template <class Clusters>
std::vector<ClusterGeometry> reference_geometry(const Clusters& clusters) {
  std::vector<ClusterGeometry> out;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    Eigen::VectorXd c(6);
    for (int k = 0; k < 6; ++k) c[k] = clusters[i].center[static_cast<std::size_t>(k)];
    out.push_back(injected_geometry(static_cast<int>(i), c, clusters[i].radius));
  }
  return out;
}

ClusteringResult labelled(std::vector<int> labels, int k, int n) {
  ClusteringResult r;
  r.assignments = std::move(labels);
  r.centroids = Eigen::MatrixXd::Zero(k, n);
  return r;
}

}  // namespace

TEST_CASE("geometry of two points at distance two has radius one") {
  Eigen::MatrixXd x(2, 2);
  x << 0, 0, 2, 0;
  // Sample std with divisor size - 1 over the x attribute is sqrt(2).
  const auto g = cluster_geometry(x, labelled({0, 0}, 1, 2));
  REQUIRE(g.size() == 1);
  CHECK(g[0].attribute_std[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(g[0].radius == doctest::Approx(std::sqrt(2.0)));
  CHECK(g[0].center[0] == doctest::Approx(1.0));

  Eigen::MatrixXd y(3, 1);
  y << 0, 1, 5;
  CHECK_THROWS_AS(cluster_geometry(y, labelled({0, 0, 1}, 2, 1)), NumericError);
}

TEST_CASE("clusters are ordered by descending center mean") {
  std::vector<ClusterGeometry> g;
  g.push_back(injected_geometry(0, Eigen::Vector2d(0.2, 0.2), 0.1));
  g.push_back(injected_geometry(1, Eigen::Vector2d(0.9, 0.7), 0.1));
  g.push_back(injected_geometry(2, Eigen::Vector2d(0.5, 0.5), 0.1));
  CHECK(order_clusters(g) == std::vector<int>{1, 2, 0});
  g[2].center = Eigen::Vector2d(0.2, 0.2);
  CHECK(order_clusters(g) == std::vector<int>{1, 0, 2});
}

TEST_CASE("lower bounds shrink the center toward the origin") {
  const auto g = injected_geometry(0, Eigen::Vector2d(0.6, 0.8), 0.5);
  const Eigen::VectorXd lb = lower_bounds(g);
  CHECK(lb[0] == doctest::Approx(0.3));
  CHECK(lb[1] == doctest::Approx(0.4));

  std::vector<std::string> warnings;
  const Eigen::VectorXd clamped = lower_bounds(injected_geometry(0, Eigen::Vector2d(0.6, 0.8), 2.0), &warnings);
  CHECK(clamped.isZero());
  CHECK(warnings.size() == 1);
  CHECK_THROWS_AS(lower_bounds(injected_geometry(0, Eigen::Vector2d(0, 0), 0.1)), NumericError);
}

TEST_CASE("published cluster geometry reproduces the printed boundary points") {
  const auto km = reference_geometry(reference::kKmeansClusters);
  const auto cv = reference_geometry(reference::kCvclClusters);
  for (std::size_t level = 0; level < 2; ++level) {
    const Eigen::VectorXd a = lower_bounds(km[level]);
    const Eigen::VectorXd b = lower_bounds(cv[level]);
    for (int k = 0; k < 6; ++k) {
      CAPTURE(level);
      CAPTURE(k);
      CHECK(a[k] == doctest::Approx(reference::kKmeansBoundaries[level][static_cast<std::size_t>(k)]).epsilon(0.002));
      CHECK(b[k] == doctest::Approx(reference::kCvclBoundaries[level][static_cast<std::size_t>(k)]).epsilon(0.002));
    }
  }
}

TEST_CASE("thresholds from the published geometry") {
  const auto cv = build_standard(reference_geometry(reference::kCvclClusters), reference::indicators(),
                                 reference::scale());
  REQUIRE(cv.levels.size() == 3);
  CHECK(cv.min_conditions == 3);
  CHECK(cv.levels[2].thresholds.empty());
  for (std::size_t level = 0; level < 2; ++level) {
    for (std::size_t k = 0; k < 6; ++k) {
      CAPTURE(level);
      CAPTURE(k);
      const auto& t = cv.levels[level].thresholds[k];
      if (k == 1) {
        // The printed diameters do not follow from the printed boundary points.
        const double formula = 0.275 + reference::kCvclBoundaries[level][1] * (0.559 - 0.275);
        CHECK(t.value == doctest::Approx(formula).epsilon(1e-3));
      } else {
        CHECK(t.value == doctest::Approx(reference::kCvclThresholds[level][k]).epsilon(0.01));
      }
      CHECK(t.relation == (k == 2 ? Relation::at_most : Relation::at_least));
    }
  }
  CHECK(cv.levels[0].thresholds[2].value == 2);
  CHECK(cv.levels[1].thresholds[2].value == 1);

  // Lateral branches: the exact bounds 2.07 and 1.75 round down for <=.
  const auto km = build_standard(reference_geometry(reference::kKmeansClusters), reference::indicators(),
                                 reference::scale());
  CHECK(km.levels[0].thresholds[2].value == 2);
  CHECK(km.levels[1].thresholds[2].value == 1);
  for (std::size_t level = 0; level < 2; ++level) {
    for (std::size_t k : {0u, 3u, 4u, 5u}) {
      CAPTURE(level);
      CAPTURE(k);
      CHECK(km.levels[level].thresholds[k].value == doctest::Approx(reference::kKmeansThresholds[level][k]).epsilon(0.01));
    }
  }
}

TEST_CASE("integer thresholds round toward the feasible side") {
  std::vector<IndicatorSpec> specs{{"a", "", Direction::maximize, true}, {"b", "", Direction::minimize, true}};
  std::vector<ScaleParams> scale{scale_params_from_range(specs[0], 0, 10), scale_params_from_range(specs[1], 0, 10)};
  std::vector<ClusterGeometry> g;
  g.push_back(injected_geometry(0, Eigen::Vector2d(0.8, 0.8), 0.0));
  g.push_back(injected_geometry(1, Eigen::Vector2d(0.2, 0.2), 0.0));
  g[0].center = Eigen::Vector2d(0.73, 0.73);
  const auto s = build_standard(g, specs, scale);
  CHECK(s.levels[0].thresholds[0].exact_value == doctest::Approx(7.3));
  CHECK(s.levels[0].thresholds[0].value == 8);
  CHECK(s.levels[0].thresholds[1].exact_value == doctest::Approx(2.7));
  CHECK(s.levels[0].thresholds[1].value == 2);
  CHECK_THROWS_AS(build_standard({g[0]}, specs, scale), DataError);
}

TEST_CASE("sample twelve under the printed standards") {
  const auto specs = reference::indicators();
  const auto scale = reference::scale();
  const auto printed = [&](const auto& table) {
    GradingStandard s;
    s.indicators = specs;
    s.scale = scale;
    s.min_conditions = 3;
    for (std::size_t level = 0; level < 3; ++level) {
      Level l;
      l.name = level_name(level);
      if (level < 2) {
        for (std::size_t k = 0; k < 6; ++k) {
          Threshold t;
          t.value = t.exact_value = table[level][k];
          t.relation = specs[k].direction == Direction::minimize ? Relation::at_most : Relation::at_least;
          l.thresholds.push_back(t);
        }
      }
      s.levels.push_back(l);
    }
    return s;
  };
  const auto km = grade_sample(printed(reference::kKmeansThresholds), reference::kSample12);
  const auto cv = grade_sample(printed(reference::kCvclThresholds), reference::kSample12);
  CHECK(km.name == "II");
  CHECK(km.conditions_met[0] == 2);
  CHECK(cv.name == "I");
  CHECK(cv.conditions_met[0] == 3);

  const auto km_built = build_standard(reference_geometry(reference::kKmeansClusters), specs, scale);
  const auto cv_built = build_standard(reference_geometry(reference::kCvclClusters), specs, scale);
  CHECK(grade_sample(km_built, reference::kSample12).name == "II");
  CHECK(grade_sample(cv_built, reference::kSample12).name == "I");
}

TEST_CASE("degenerate standards warn") {
  std::vector<IndicatorSpec> specs{{"a", "", Direction::maximize, false}, {"b", "", Direction::maximize, false}};
  std::vector<ScaleParams> scale{scale_params_from_range(specs[0], 0, 1), scale_params_from_range(specs[1], 0, 1)};
  std::vector<ClusterGeometry> same{injected_geometry(0, Eigen::Vector2d(0.5, 0.5), 0.1),
                                    injected_geometry(1, Eigen::Vector2d(0.5, 0.5), 0.1),
                                    injected_geometry(2, Eigen::Vector2d(0.2, 0.2), 0.1)};
  const auto s = build_standard(same, specs, scale);
  CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("every sample lands on exactly one level") {
  const auto s = build_standard(reference_geometry(reference::kKmeansClusters), reference::indicators(),
                                reference::scale());
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    std::array<double, 6> x{};
    for (std::size_t k = 0; k < 6; ++k) x[k] = rng.uniform(reference::kRanges[k].min, reference::kRanges[k].max);
    const auto g = grade_sample(s, x);
    CHECK(g.level >= 0);
    CHECK(g.level < 3);
    CHECK(g.name == level_name(static_cast<std::size_t>(g.level)));
  }
}

TEST_CASE("standard markdown and json") {
  const auto s = build_standard(reference_geometry(reference::kCvclClusters), reference::indicators(),
                                reference::scale(), "published");
  const std::string md = standard_markdown(s);
  CHECK(md.find("Meet at least 3 of the following conditions") != std::string::npos);
  CHECK(md.find("Not meet the condition of level I and meet at least 3") != std::string::npos);
  CHECK(md.find("Not meet the condition of level I,II") != std::string::npos);
  CHECK(md.find("Seedling Height (cm)") != std::string::npos);

  const auto back = standard_from_json(standard_json(s));
  CHECK(standard_json(back) == standard_json(s));
  CHECK(back.levels.size() == 3);
  CHECK(back.levels[0].thresholds[0].value == s.levels[0].thresholds[0].value);
  CHECK(back.indicators == s.indicators);
  CHECK_THROWS_AS(standard_from_json("{}"), DataError);
  CHECK(level_name(3) == "IV");
}
