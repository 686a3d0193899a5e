#include "sqcsef/cluster_eval.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "sqcsef/error.hpp"

namespace sqcsef::validity {

namespace {

int checked_k(const Eigen::MatrixXd& data, const std::vector<int>& a) {
  const auto m = static_cast<std::size_t>(data.rows());
  if (a.size() != m) throw NumericError(fmt::format("{} labels for {} samples", a.size(), m));
  if (a.empty()) throw NumericError("no samples");
  const int k = *std::max_element(a.begin(), a.end()) + 1;
  if (*std::min_element(a.begin(), a.end()) < 0) throw NumericError("negative cluster label");
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int c : a) ++counts[static_cast<std::size_t>(c)];
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) throw NumericError(fmt::format("cluster {} is empty", c));
  }
  if (k < 2) throw NumericError("validity indices need at least 2 clusters");
  if (static_cast<std::size_t>(k) > m - 1) {
    throw NumericError(fmt::format("validity indices need k <= M - 1 (k = {}, M = {})", k, m));
  }
  return k;
}

}  // namespace

double silhouette(const Eigen::MatrixXd& data, const std::vector<int>& assignments) {
  const int k = checked_k(data, assignments);
  const Eigen::Index m = data.rows();
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int c : assignments) ++counts[static_cast<std::size_t>(c)];
  double total = 0.0;
  std::vector<double> sums(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < m; ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j != i) sums[static_cast<std::size_t>(assignments[j])] += (data.row(i) - data.row(j)).norm();
    }
    const auto own = static_cast<std::size_t>(assignments[i]);
    if (counts[own] == 1) continue;
    const double a = sums[own] / (counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (c != own) b = std::min(b, sums[c] / counts[c]);
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(m);
}

CalinskiHarabasz calinski_harabasz(const Eigen::MatrixXd& data, const std::vector<int>& assignments) {
  const int k = checked_k(data, assignments);
  const Eigen::Index m = data.rows();
  const Eigen::MatrixXd centroids = cluster_means(data, assignments, k);
  const Eigen::RowVectorXd mean = data.colwise().mean();
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int c : assignments) ++counts[static_cast<std::size_t>(c)];
  double between = 0.0;
  for (int c = 0; c < k; ++c) between += counts[static_cast<std::size_t>(c)] * (centroids.row(c) - mean).squaredNorm();
  double within = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) within += (data.row(i) - centroids.row(assignments[i])).squaredNorm();
  if (within == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {(between / (k - 1)) / (within / static_cast<double>(m - k)), false};
}

double davies_bouldin(const Eigen::MatrixXd& data, const std::vector<int>& assignments) {
  const int k = checked_k(data, assignments);
  const Eigen::MatrixXd centroids = cluster_means(data, assignments, k);
  std::vector<double> scatter(static_cast<std::size_t>(k), 0.0);
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const auto c = static_cast<std::size_t>(assignments[i]);
    scatter[c] += (data.row(i) - centroids.row(assignments[i])).norm();
    ++counts[c];
  }
  for (std::size_t c = 0; c < scatter.size(); ++c) scatter[c] /= counts[c];
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      const double d = (centroids.row(i) - centroids.row(j)).norm();
      if (d == 0.0) throw NumericError(fmt::format("clusters {} and {} have coincident centroids", i, j));
      worst = std::max(worst, (scatter[static_cast<std::size_t>(i)] + scatter[static_cast<std::size_t>(j)]) / d);
    }
    total += worst;
  }
  return total / k;
}

ValidityReport evaluate(const Eigen::MatrixXd& data, const ClusteringResult& result) {
  ValidityReport r;
  r.method = result.method;
  r.silhouette = silhouette(data, result.assignments);
  r.calinski_harabasz = calinski_harabasz(data, result.assignments);
  r.davies_bouldin = davies_bouldin(data, result.assignments);
  return r;
}

std::string validity_markdown(const std::vector<ValidityReport>& reports) {
  std::string out = "| Method | Silhouette Index | Calinski-Harabasz Index | Davies-Bouldin Index |\n|---|---|---|---|\n";
  for (const auto& r : reports) {
    const std::string ch = r.calinski_harabasz.infinite ? "inf" : fmt::format("{:.4f}", r.calinski_harabasz.value);
    out += fmt::format("| {} | {:.4f} | {} | {:.4f} |\n", r.method == ClusterMethod::kmeans ? "K-Means" : "CVCL",
                       r.silhouette, ch, r.davies_bouldin);
  }
  return out;
}

}  // namespace sqcsef::validity
