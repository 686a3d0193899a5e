#include <doctest.h>

#include <cmath>
#include <numbers>

#include "reference_data.hpp"
#include "sqcsef/error.hpp"
#include "sqcsef/factors.hpp"
#include "sqcsef/rng.hpp"

using namespace sqcsef;
using namespace sqcsef::factors;

namespace {

Eigen::MatrixXd random_loadings(Rng& rng, int n, int f) {
  Eigen::MatrixXd l(n, f);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < f; ++j) l(i, j) = rng.uniform(-0.9, 0.9);
  }
  return l;
}

Eigen::MatrixXd rotate2(const Eigen::MatrixXd& l, double phi) {
  Eigen::Matrix2d r;
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return l * r;
}

}  // namespace

TEST_CASE("variance explained") {
  Eigen::VectorXd ev(6);
  for (int i = 0; i < 6; ++i) ev[i] = reference::kEigenvalues[static_cast<std::size_t>(i)];
  const auto v = variance_explained(ev);
  CHECK(v.percent[0] == doctest::Approx(65.3667).epsilon(1e-4));
  double running = 0.0;
  for (int i = 0; i < 6; ++i) {
    const auto k = static_cast<std::size_t>(i);
    running += 100.0 * ev[i] / 6.0;
    CHECK(v.percent[i] == doctest::Approx(100.0 * ev[i] / 6.0).epsilon(1e-14));
    CHECK(v.cumulative[i] == doctest::Approx(running).epsilon(1e-14));
    // Printed eigenvalues carry 3 decimals, so each percent is off by up to 100 * 0.0005 / 6.
    CHECK(std::abs(v.percent[i] - reference::kPercent[k]) < 0.0085);
    CHECK(std::abs(v.cumulative[i] - reference::kCumulative[k]) < 0.0085 * (i + 1));
  }

  Eigen::VectorXd exact(4);
  exact << 2.5, 1.0, 0.4, 0.1;
  CHECK(variance_explained(exact).cumulative[3] == doctest::Approx(100.0).epsilon(1e-14));
}

TEST_CASE("adequacy") {
  const auto id = adequacy(Eigen::MatrixXd::Identity(4, 4), 50);
  CHECK(id.bartlett_chi2 == doctest::Approx(0.0));
  CHECK(id.bartlett_p == doctest::Approx(1.0));
  CHECK(id.bartlett_dof == 6);

  // R = 0.5 I + 0.5 J: R^-1 = 2 I - 0.5 J, partial correlations 1/3, det R = 0.5.
  Eigen::Matrix3d r = Eigen::Matrix3d::Constant(0.5);
  r.diagonal().setOnes();
  const double sum_r2 = 6 * 0.25;
  const double sum_q2 = 6 * (1.0 / 9.0);
  const auto a = adequacy(r, 30);
  CHECK(a.kmo == doctest::Approx(sum_r2 / (sum_r2 + sum_q2)).epsilon(1e-12));
  const double chi2 = -(30 - 1 - (2 * 3 + 5) / 6.0) * std::log(0.5);
  CHECK(a.bartlett_chi2 == doctest::Approx(chi2).epsilon(1e-12));
  CHECK(a.bartlett_dof == 3);

  Eigen::Matrix3d singular = Eigen::Matrix3d::Ones();
  CHECK_THROWS_AS(adequacy(singular, 30), NumericError);
}

TEST_CASE("extract factors on the identity") {
  const auto m = extract_factors(Eigen::MatrixXd::Identity(4, 4), 2);
  CHECK(m.eigenvalues.isApprox(Eigen::VectorXd::Ones(4)));
  CHECK(m.eigenvalues.sum() == doctest::Approx(4.0));
  for (int j = 0; j < 2; ++j) CHECK(m.rotated_loadings.col(j).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("extract factors invariants") {
  Rng rng(3);
  Eigen::MatrixXd x(100, 6);
  for (int i = 0; i < 100; ++i) {
    const double z = rng.normal();
    for (int j = 0; j < 6; ++j) x(i, j) = (j < 3 ? z : 0.3 * z) + rng.normal();
  }
  const Eigen::MatrixXd c = (x.rowwise() - x.colwise().mean()).transpose() * (x.rowwise() - x.colwise().mean());
  const Eigen::VectorXd d = c.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd r = d.asDiagonal() * c * d.asDiagonal();
  const auto m = extract_factors(r, 3);
  CHECK(m.eigenvalues.sum() == doctest::Approx(6.0).epsilon(1e-12));
  for (int i = 1; i < 6; ++i) CHECK(m.eigenvalues[i] <= m.eigenvalues[i - 1]);
  const Eigen::VectorXd h_unrotated = m.unrotated_loadings.rowwise().squaredNorm();
  const Eigen::VectorXd h_rotated = m.rotated_loadings.rowwise().squaredNorm();
  CHECK((h_unrotated - h_rotated).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((m.unrotated_loadings * m.rotation - m.rotated_loadings).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(m.rotated_eigenvalues.sum() == doctest::Approx(m.eigenvalues.head(3).sum()).epsilon(1e-12));

  Eigen::MatrixXd asym = r;
  asym(0, 1) += 0.1;
  CHECK_THROWS_AS(extract_factors(asym, 2), NumericError);
  CHECK_THROWS_AS(extract_factors(r, 0), ConfigError);
}

TEST_CASE("varimax fixed point") {
  Eigen::MatrixXd simple = Eigen::MatrixXd::Zero(5, 2);
  simple << 0.9, 0, 0.8, 0, 0.7, 0, 0, 0.6, 0, 0.5;
  const auto v = varimax(simple);
  CHECK((v.rotated.cwiseAbs() - simple.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("varimax preserves communalities and is monotone") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd l = random_loadings(rng, 6, 3);
    const auto v = varimax(l);
    CHECK((l.rowwise().squaredNorm() - v.rotated.rowwise().squaredNorm()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((v.rotation.transpose() * v.rotation - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    for (std::size_t s = 1; s < v.criterion.size(); ++s) CHECK(v.criterion[s] >= v.criterion[s - 1] - 1e-12);
  }
}

TEST_CASE("two-factor varimax matches an angle grid search") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd l = random_loadings(rng, 6, 2);
    double best = -1.0;
    double best_phi = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const double phi = -std::numbers::pi / 4 + std::numbers::pi / 2 * i / 20000.0;
      const double c = varimax_criterion(rotate2(l, phi));
      if (c > best) {
        best = c;
        best_phi = phi;
      }
    }
    // Refine around the grid optimum.
    double lo = best_phi - 1e-4, hi = best_phi + 1e-4;
    for (int it = 0; it < 100; ++it) {
      const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
      if (varimax_criterion(rotate2(l, a)) < varimax_criterion(rotate2(l, b))) {
        lo = a;
      } else {
        hi = b;
      }
    }
    best = std::max(best, varimax_criterion(rotate2(l, (lo + hi) / 2)));
    CHECK(varimax_criterion(varimax(l).rotated) == doctest::Approx(best).epsilon(1e-8));
  }
}

TEST_CASE("factor count guidance") {
  Eigen::VectorXd ev(6);
  for (int i = 0; i < 6; ++i) ev[i] = reference::kEigenvalues[static_cast<std::size_t>(i)];
  const auto g = factor_count_guidance(ev);
  CHECK(g.cumulative_80 == 2);
  CHECK(g.kaiser == 1);
  CHECK(g.scree_elbow == 2);
}

TEST_CASE("view weights") {
  const auto w = view_weights({2.585, 1.799, 1.040});
  CHECK(w[0] == doctest::Approx(0.4766).epsilon(1e-4));
  CHECK(std::abs(w[1] - 0.3317) < 1e-4);
  CHECK(std::abs(w[2] - 0.1917) < 1e-4);
  CHECK(std::abs(w[0] + w[1] + w[2] - 1.0) < 1e-12);
  const auto eq = view_weights({1, 1, 1});
  for (double x : eq) CHECK(x == doctest::Approx(1.0 / 3));
  CHECK(view_weights({4.2}) == std::vector<double>{1.0});
  CHECK_THROWS_AS(view_weights({1.0, 0.0}), NumericError);
}

TEST_CASE("partition views from published rotated loadings") {
  FactorModel m;
  m.n_factors = 3;
  m.rotated_loadings = reference::rotated_loadings();
  m.rotated_eigenvalues = m.rotated_loadings.colwise().squaredNorm().transpose();
  const auto p = partition_views(m);
  REQUIRE(p.views.size() == 3);
  CHECK(p.views[0].indicators == std::vector<int>{0, 4, 5});
  CHECK(p.views[1].indicators == std::vector<int>{1, 3});
  CHECK(p.views[2].indicators == std::vector<int>{2});
  CHECK(p.warnings.empty());
  double sum = 0.0;
  for (double w : p.weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partition edge cases") {
  FactorModel one;
  one.n_factors = 1;
  one.rotated_loadings = Eigen::MatrixXd::Constant(4, 1, 0.7);
  one.rotated_eigenvalues = Eigen::VectorXd::Constant(1, 1.96);
  const auto single = partition_views(one);
  REQUIRE(single.views.size() == 1);
  CHECK(single.views[0].indicators.size() == 4);
  CHECK(single.weights[0] == 1.0);

  FactorModel tie;
  tie.n_factors = 2;
  tie.rotated_loadings.resize(3, 2);
  tie.rotated_loadings << 0.5, 0.5, 0.9, 0.1, 0.1, 0.8;
  tie.rotated_eigenvalues = tie.rotated_loadings.colwise().squaredNorm().transpose();
  const auto t = partition_views(tie);
  CHECK(t.views[0].indicators == std::vector<int>{0, 1});
  CHECK_FALSE(t.warnings.empty());

  FactorModel empty;
  empty.n_factors = 2;
  empty.rotated_loadings.resize(3, 2);
  empty.rotated_loadings << 0.9, 0.1, 0.8, 0.2, 0.7, 0.3;
  empty.rotated_eigenvalues = empty.rotated_loadings.colwise().squaredNorm().transpose();
  const auto e = partition_views(empty);
  CHECK(e.views.size() == 1);
  CHECK_FALSE(e.warnings.empty());
}

TEST_CASE("manual partition validation") {
  CHECK_NOTHROW(manual_partition({{"a", {0, 2}}, {"b", {1}}}, {1, 1}, 3));
  CHECK_THROWS_AS(manual_partition({{"a", {0, 1}}, {"b", {1, 2}}}, {1, 1}, 3), DataError);
  CHECK_THROWS_AS(manual_partition({{"a", {0}}, {"b", {1}}}, {1, 1}, 3), DataError);
  CHECK_THROWS_AS(manual_partition({{"a", {0, 1, 2}}, {"b", {}}}, {1, 1}, 3), DataError);
}

TEST_CASE("scree outputs") {
  Eigen::VectorXd ev(6);
  for (int i = 0; i < 6; ++i) ev[i] = reference::kEigenvalues[static_cast<std::size_t>(i)];
  const auto svg = scree_svg(ev);
  std::size_t circles = 0;
  for (auto pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
  CHECK(circles == 6);
  CHECK(scree_csv(ev).find("1,3.922") != std::string::npos);
}
