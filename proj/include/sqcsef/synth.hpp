#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sqcsef/dataset.hpp"
#include "sqcsef/factors.hpp"

namespace sqcsef::synth {

struct TargetStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;
};

struct Spec {
  int samples = 200;
  Eigen::MatrixXd correlation;  ///< N x N, symmetric positive semidefinite
  std::vector<IndicatorSpec> indicators;
  std::vector<TargetStats> stats;
  std::uint64_t seed = 0;

  /// Six huangqiu seedling indicators with the published summary statistics
  /// and correlation matrix.
  static Spec seedling_preset(std::uint64_t seed = 0, int samples = 200);
};

std::vector<IndicatorSpec> seedling_indicators();

/// Correlated normal draws coloured by a lower-triangular factor of the
/// target correlation, whitened so the sample moments match the targets,
/// then mapped to each column's mean and std and clipped to [min, max].
/// Integer columns are rounded before clipping, with the pre-rounding mean and
/// scale calibrated so the rounded column keeps the target moments.
/// Throws DataError for fewer than 3 samples, ConfigError on shape
/// mismatches, NumericError for a correlation that is not PSD.
RawDataset generate(const Spec& spec);

struct PlantedViews {
  Eigen::MatrixXd data;  ///< M x 6, cells in [0, 1]
  std::vector<int> labels;
  factors::ViewPartition partition;  ///< views {0,4,5}, {1,3}, {2}
};

/// Three planted clusters on a standardized 6-column matrix. Cluster c has
/// mean 0.5 + (c - 1) * separation in every column plus N(0, noise^2) noise.
PlantedViews planted_views(int samples, double separation, double noise, std::uint64_t seed);

}  // namespace sqcsef::synth
