#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace sqcsef::factors {

struct Adequacy {
  double kmo = 0.0;
  double bartlett_chi2 = 0.0;
  int bartlett_dof = 0;
  double bartlett_p = 1.0;
};

/// Kaiser-Meyer-Olkin sampling adequacy and Bartlett's sphericity test for a
/// correlation matrix estimated from `samples` rows. Throws NumericError if R
/// is singular, DataError unless samples > N.
Adequacy adequacy(const Eigen::MatrixXd& corr, Eigen::Index samples);

/// Default gate for proceeding with factor analysis.
inline constexpr double kKmoThreshold = 0.80;

struct VarianceTable {
  Eigen::VectorXd percent;     ///< 100 * lambda_i / N
  Eigen::VectorXd cumulative;  ///< prefix sums, ending at 100
};

/// Percent and cumulative variance explained by eigenvalues of an N x N
/// correlation matrix (N = eigenvalues.size()).
VarianceTable variance_explained(const Eigen::VectorXd& eigenvalues);

struct VarimaxResult {
  Eigen::MatrixXd rotated;
  Eigen::MatrixXd rotation;  ///< orthogonal; rotated = loadings * rotation
  std::vector<double> criterion;  ///< varimax criterion after each sweep (index 0 = start)
  int sweeps = 0;
};

/// Value maximized by varimax: sum over columns of the variance of squared
/// loadings, computed on Kaiser-normalized rows.
double varimax_criterion(const Eigen::MatrixXd& loadings);

/// Varimax with Kaiser row normalization, pairwise rotations until the
/// criterion moves by less than `tol` or `max_sweeps` sweeps. Columns of the
/// result are sign-fixed (largest-magnitude loading positive) and ordered by
/// descending sum of squared loadings.
VarimaxResult varimax(const Eigen::MatrixXd& loadings, double tol = 1e-8, int max_sweeps = 100);
Eigen::MatrixXd varimax_rotate(const Eigen::MatrixXd& loadings);

struct FactorModel {
  Eigen::VectorXd eigenvalues;  ///< all N, descending
  Eigen::MatrixXd eigenvectors;  ///< N x N, columns match eigenvalues
  Eigen::MatrixXd unrotated_loadings;  ///< N x n_factors
  Eigen::MatrixXd rotated_loadings;    ///< N x n_factors
  Eigen::MatrixXd rotation;            ///< n_factors x n_factors
  Eigen::VectorXd rotated_eigenvalues;  ///< column sums of squared rotated loadings
  VarianceTable variance;
  int n_factors = 0;
};

/// Principal-component extraction on a correlation matrix followed by varimax
/// (skipped for a single factor).
FactorModel extract_factors(const Eigen::MatrixXd& corr, int n_factors);

struct FactorCountGuidance {
  int cumulative_80 = 0;  ///< fewest factors explaining >= 80 %
  int kaiser = 0;         ///< eigenvalues > 1
  int scree_elbow = 0;    ///< 1-based point with the sharpest bend
};

FactorCountGuidance factor_count_guidance(const Eigen::VectorXd& eigenvalues);

struct View {
  std::string name;
  std::vector<int> indicators;  ///< column indices, ascending
  bool operator==(const View&) const = default;
};

struct ViewPartition {
  std::vector<View> views;
  std::vector<double> weights;
  std::vector<std::string> warnings;
};

/// w_i = lambda_i / sum(lambda). Throws NumericError on a non-positive value.
std::vector<double> view_weights(const std::vector<double>& rotated_eigenvalues);

/// Assigns each indicator to the factor with the largest absolute rotated
/// loading (ties go to the lower factor with a warning). Factors that attract
/// no indicator are dropped with a warning. Default names are factor1..n.
ViewPartition partition_views(const FactorModel& model, const std::optional<std::vector<std::string>>& names = {});

/// A user-defined partition; validated to be a disjoint cover of
/// [0, n_indicators). Throws DataError otherwise.
ViewPartition manual_partition(std::vector<View> views, std::vector<double> weights, int n_indicators);

void validate_partition(const ViewPartition& p, int n_indicators);

/// Scree data: "factor,eigenvalue" rows.
std::string scree_csv(const Eigen::VectorXd& eigenvalues);
/// Minimal static line chart with one marker per eigenvalue.
std::string scree_svg(const Eigen::VectorXd& eigenvalues);

}  // namespace sqcsef::factors
