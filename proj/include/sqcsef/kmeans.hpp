#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace sqcsef {

enum class ClusterMethod { kmeans, cvcl };
std::string to_string(ClusterMethod m);
ClusterMethod parse_cluster_method(const std::string& s);

struct ClusteringResult {
  std::vector<int> assignments;  ///< one cluster index in [0, k) per sample
  Eigen::MatrixXd centroids;     ///< k x N
  double inertia = 0.0;          ///< sum of squared distances to the assigned centroid
  int iterations = 0;
  ClusterMethod method = ClusterMethod::kmeans;
  std::vector<std::string> warnings;

  [[nodiscard]] int k() const { return static_cast<int>(centroids.rows()); }
};

/// Per-cluster means of `data` rows; rows of empty clusters are zero.
Eigen::MatrixXd cluster_means(const Eigen::MatrixXd& data, const std::vector<int>& assignments, int k);
double inertia(const Eigen::MatrixXd& data, const std::vector<int>& assignments, const Eigen::MatrixXd& centroids);

namespace kmeans {

enum class Init { random_rows, kmeans_plus_plus };

struct Config {
  int k = 3;
  double tol = 1e-6;  ///< max centroid displacement declaring convergence
  int max_iter = 300;
  int n_restarts = 10;
  std::uint64_t seed = 0;
  Init init = Init::random_rows;
};

struct RestartTrace {
  std::vector<double> inertia;  ///< after every Lloyd iteration
};

/// Lloyd's algorithm with seeded restarts; returns the restart with minimum
/// inertia. Ties in the nearest-centroid step go to the lower index. A
/// cluster that empties is re-seeded with the point farthest from its
/// assigned centroid. Throws ConfigError if k > M or k < 1, NumericError if
/// the data holds fewer than k distinct rows.
ClusteringResult fit(const Eigen::MatrixXd& data, const Config& cfg, std::vector<RestartTrace>* traces = nullptr);

}  // namespace kmeans
}  // namespace sqcsef
