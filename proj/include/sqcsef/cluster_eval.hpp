#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sqcsef/kmeans.hpp"

namespace sqcsef::validity {

/// Internal validity indices on Euclidean distances. Every function expects
/// labels in [0, k) with each cluster non-empty and 2 <= k <= M - 1, and
/// throws NumericError otherwise.
double silhouette(const Eigen::MatrixXd& data, const std::vector<int>& assignments);

struct CalinskiHarabasz {
  double value = 0.0;
  bool infinite = false;  ///< zero within-cluster dispersion
};
CalinskiHarabasz calinski_harabasz(const Eigen::MatrixXd& data, const std::vector<int>& assignments);

/// Throws NumericError if two centroids coincide.
double davies_bouldin(const Eigen::MatrixXd& data, const std::vector<int>& assignments);

struct ValidityReport {
  ClusterMethod method = ClusterMethod::kmeans;
  double silhouette = 0.0;
  CalinskiHarabasz calinski_harabasz;
  double davies_bouldin = 0.0;
};

ValidityReport evaluate(const Eigen::MatrixXd& data, const ClusteringResult& result);

/// Rows in the layout of an internal-evaluation table, one per report.
std::string validity_markdown(const std::vector<ValidityReport>& reports);

}  // namespace sqcsef::validity
