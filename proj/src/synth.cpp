#include "sqcsef/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "sqcsef/error.hpp"
#include "sqcsef/rng.hpp"

namespace sqcsef::synth {

std::vector<IndicatorSpec> seedling_indicators() {
  return {
      {"Seedling Height", "cm", Direction::maximize, false, 1},
      {"Ground Diameter", "cm", Direction::maximize, false, 3},
      {"Number of Lateral Branches", "", Direction::minimize, true, 0},
      {"Root Length", "cm", Direction::maximize, false, 1},
      {"Fresh Weight", "g", Direction::maximize, false, 2},
      {"Leaf Chlorophyll Content", "SPAD", Direction::maximize, false, 1},
  };
}

Spec Spec::seedling_preset(std::uint64_t seed, int samples) {
  Spec s;
  s.samples = samples;
  s.seed = seed;
  s.indicators = seedling_indicators();
  s.stats = {
      {14.7, 63.2, 37.799, 10.0096},    {0.275, 0.559, 0.42830, 0.082075},  {0.0, 7.0, 0.98, 1.288},
      {4.650, 45.900, 18.64916, 8.740880}, {6.920, 96.160, 37.19924, 18.483141}, {29.5, 56.7, 42.731, 7.4509},
  };
  // Columns: height, diameter, lateral branches, root length, fresh weight, chlorophyll.
  s.correlation.resize(6, 6);
  s.correlation << 1.0000, 0.5579, 0.2956, 0.6488, 0.8111, 0.9716,  //
      0.5579, 1.0000, 0.2234, 0.6613, 0.6463, 0.5762,               //
      0.2956, 0.2234, 1.0000, 0.2758, 0.2138, 0.2710,               //
      0.6488, 0.6613, 0.2758, 1.0000, 0.6677, 0.6470,               //
      0.8111, 0.6463, 0.2138, 0.6677, 1.0000, 0.7983,               //
      0.9716, 0.5762, 0.2710, 0.6470, 0.7983, 1.0000;
  return s;
}

namespace {

Eigen::MatrixXd colouring_factor(const Eigen::MatrixXd& r) {
  if (!r.isApprox(r.transpose(), 1e-12)) throw NumericError("target correlation is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
  const double smallest = es.eigenvalues().minCoeff();
  if (smallest < -1e-10) {
    throw NumericError(fmt::format("target correlation is not positive semidefinite (eigenvalue {:.3g})", smallest));
  }
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Eigen::VectorXd realize(const Eigen::VectorXd& z, double loc, double scale, const TargetStats& t, bool integer) {
  Eigen::VectorXd x(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    double v = loc + scale * z[i];
    if (integer) v = std::round(v);
    x[i] = std::clamp(v, t.min, t.max);
  }
  return x;
}

double sample_std(const Eigen::VectorXd& x) {
  return std::sqrt((x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1));
}

// Adjusts the pre-clip affine map until the clipped (and rounded) column hits
// the target mean and std, keeping the best iterate.
Eigen::VectorXd calibrate(const Eigen::VectorXd& z, const TargetStats& t, bool integer) {
  double loc = t.mean;
  double scale = t.std;
  Eigen::VectorXd best = realize(z, loc, scale, t, integer);
  double best_err = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd x = realize(z, loc, scale, t, integer);
    const double mean = x.mean();
    const double sd = sample_std(x);
    const double err = std::abs(mean - t.mean) / t.std + std::abs(sd - t.std) / t.std;
    if (err < best_err) {
      best_err = err;
      best = x;
    }
    if (err < 1e-10 || !(sd > 0.0)) break;
    loc += t.mean - mean;
    scale *= std::clamp(t.std / sd, 0.5, 2.0);
  }
  return best;
}

}  // namespace

RawDataset generate(const Spec& spec) {
  if (spec.samples < 3) throw DataError(fmt::format("synthetic data needs at least 3 samples, got {}", spec.samples));
  const auto n = static_cast<Eigen::Index>(spec.indicators.size());
  if (n == 0 || spec.stats.size() != spec.indicators.size() || spec.correlation.rows() != n ||
      spec.correlation.cols() != n) {
    throw ConfigError("synthetic spec: indicator, statistics and correlation sizes disagree");
  }
  for (std::size_t k = 0; k < spec.stats.size(); ++k) {
    const auto& t = spec.stats[k];
    if (!(t.max > t.min) || !(t.std > 0.0) || t.mean < t.min || t.mean > t.max) {
      throw ConfigError("synthetic spec: inconsistent target statistics for '" + spec.indicators[k].name + "'");
    }
  }
  const Eigen::MatrixXd factor = colouring_factor(spec.correlation);

  const Eigen::Index m = spec.samples;
  Rng rng(spec.seed);
  Eigen::MatrixXd z(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = rng.normal();
  }
  z.rowwise() -= z.colwise().mean();
  if (m > n) {
    const Eigen::MatrixXd cov = z.transpose() * z / static_cast<double>(m - 1);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
      z = llt.matrixL().solve(z.transpose()).transpose();
    }
  }
  const Eigen::MatrixXd y = z * factor.transpose();

  Eigen::MatrixXd rows(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    rows.col(j) = calibrate(y.col(j), spec.stats[k], spec.indicators[k].integer_valued);
  }
  return RawDataset(spec.indicators, std::move(rows), fmt::format("synthetic(seed={}, M={})", spec.seed, m));
}

PlantedViews planted_views(int samples, double separation, double noise, std::uint64_t seed) {
  if (samples < 3) throw DataError("planted data needs at least 3 samples");
  PlantedViews out;
  out.data.resize(samples, 6);
  out.labels.resize(static_cast<std::size_t>(samples));
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    const int c = i % 3;
    out.labels[static_cast<std::size_t>(i)] = c;
    const double centre = 0.5 + (c - 1) * separation;
    for (int j = 0; j < 6; ++j) out.data(i, j) = std::clamp(centre + noise * rng.normal(), 0.0, 1.0);
  }
  out.partition = factors::manual_partition(
      {{"aboveground", {0, 4, 5}}, {"underground", {1, 3}}, {"branching", {2}}}, {0.4766, 0.3317, 0.1917}, 6);
  return out;
}

}  // namespace sqcsef::synth
