#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "sqcsef/dataset.hpp"
#include "sqcsef/kmeans.hpp"

namespace sqcsef::grading {

struct ClusterGeometry {
  int cluster = 0;             ///< index in the originating ClusteringResult
  Eigen::VectorXd center;      ///< standardized centroid
  double radius = 0.0;         ///< sqrt(sum_k sigma_k^2)
  Eigen::VectorXd attribute_std;  ///< per-attribute sample std (divisor size - 1)
  int size = 0;
};

/// Geometry of every cluster in `result` over the standardized matrix.
/// Throws NumericError naming the cluster when one has fewer than 2 members.
std::vector<ClusterGeometry> cluster_geometry(const Eigen::MatrixXd& data, const ClusteringResult& result);

/// Geometry supplied directly (e.g. published centers and radii); the
/// per-attribute deviations are unknown and left empty.
ClusterGeometry injected_geometry(int cluster, Eigen::VectorXd center, double radius);

/// Best-to-worst order: descending mean of the center, ties by cluster index.
std::vector<int> order_clusters(const std::vector<ClusterGeometry>& geoms);

/// lb_k = c_k (1 - r / |c|_2), clamped to [0, 1] (with a warning appended
/// when clamping happens). Throws NumericError for a zero center.
Eigen::VectorXd lower_bounds(const ClusterGeometry& g, std::vector<std::string>* warnings = nullptr);

enum class Relation { at_least, at_most };
std::string to_string(Relation r);
std::string symbol(Relation r);

struct Threshold {
  double value = 0.0;         ///< original units, integer-adjusted where required
  double exact_value = 0.0;   ///< original units before integer adjustment
  double standardized = 0.0;  ///< lower bound on the standardized scale
  Relation relation = Relation::at_least;
};

struct Level {
  std::string name;
  int cluster = -1;  ///< source cluster, -1 for the fall-through level
  std::vector<Threshold> thresholds;  ///< empty for the worst level
};

struct GradingStandard {
  std::vector<Level> levels;  ///< best first
  int min_conditions = 0;     ///< ceil(N / 2)
  std::vector<IndicatorSpec> indicators;
  std::vector<ScaleParams> scale;
  std::string provenance;
  std::vector<std::string> warnings;

  [[nodiscard]] Eigen::MatrixXd standardized_bounds() const;
};

std::string level_name(std::size_t index);

/// Builds a standard from geometries already ordered best to worst. Every
/// non-worst level thresholds each indicator at the denormalized lower bound
/// of its cluster; maximize indicators use >=, minimize indicators <=.
/// Integer indicators round toward the feasible side (floor for <=, ceil for
/// >=). Throws DataError with fewer than 2 clusters.
GradingStandard build_standard(const std::vector<ClusterGeometry>& ordered, const std::vector<IndicatorSpec>& indicators,
                               const std::vector<ScaleParams>& scale, const std::string& provenance = {});
GradingStandard build_standard(const std::vector<ClusterGeometry>& ordered, const StandardizedDataset& d,
                               const std::string& provenance = {});

struct GradeResult {
  int level = 0;
  std::string name;
  std::vector<int> conditions_met;  ///< per non-worst level
};

/// Half-meeting rule: the first level (best first) whose satisfied-condition
/// count reaches min_conditions, otherwise the worst level.
GradeResult grade_sample(const GradingStandard& standard, std::span<const double> sample);

/// Display precision for an indicator's thresholds.
int display_decimals(const IndicatorSpec& spec, const ScaleParams& scale);

std::string standard_markdown(const GradingStandard& s);
std::string standard_json(const GradingStandard& s);
GradingStandard standard_from_json(const std::string& text);

}  // namespace sqcsef::grading
