#include "sqcsef/kmeans.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "sqcsef/error.hpp"
#include "sqcsef/rng.hpp"

namespace sqcsef {

std::string to_string(ClusterMethod m) { return m == ClusterMethod::kmeans ? "kmeans" : "cvcl"; }

ClusterMethod parse_cluster_method(const std::string& s) {
  if (s == "kmeans") return ClusterMethod::kmeans;
  if (s == "cvcl") return ClusterMethod::cvcl;
  throw ConfigError("clustering method must be kmeans or cvcl, got '" + s + "'");
}

Eigen::MatrixXd cluster_means(const Eigen::MatrixXd& data, const std::vector<int>& assignments, int k) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, data.cols());
  std::vector<int> count(k, 0);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    c.row(assignments[i]) += data.row(i);
    ++count[assignments[i]];
  }
  for (int j = 0; j < k; ++j) {
    if (count[j] > 0) c.row(j) /= static_cast<double>(count[j]);
  }
  return c;
}

double inertia(const Eigen::MatrixXd& data, const std::vector<int>& assignments, const Eigen::MatrixXd& centroids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) total += (data.row(i) - centroids.row(assignments[i])).squaredNorm();
  return total;
}

namespace kmeans {
namespace {

int nearest(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

Eigen::MatrixXd init_random_rows(const Eigen::MatrixXd& data, int k, Rng& rng) {
  // Partial Fisher-Yates over distinct rows so no two initial centroids coincide.
  std::vector<Eigen::Index> idx(data.rows());
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::MatrixXd c(k, data.cols());
  int chosen = 0;
  std::size_t pos = 0;
  while (chosen < k) {
    const std::size_t pick = pos + rng.below(idx.size() - pos);
    std::swap(idx[pos], idx[pick]);
    const Eigen::RowVectorXd row = data.row(idx[pos]);
    ++pos;
    bool duplicate = false;
    for (int j = 0; j < chosen; ++j) duplicate = duplicate || (c.row(j) == row);
    if (!duplicate) c.row(chosen++) = row;
  }
  return c;
}

Eigen::MatrixXd init_plus_plus(const Eigen::MatrixXd& data, int k, Rng& rng) {
  const Eigen::Index m = data.rows();
  Eigen::MatrixXd c(k, data.cols());
  c.row(0) = data.row(static_cast<Eigen::Index>(rng.below(m)));
  Eigen::VectorXd d2(m);
  for (Eigen::Index i = 0; i < m; ++i) d2(i) = (data.row(i) - c.row(0)).squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    double u = rng.uniform() * total;
    for (; pick < m - 1; ++pick) {
      if (d2(pick) > 0.0 && u < d2(pick)) break;
      u -= d2(pick);
    }
    while (d2(pick) == 0.0 && pick > 0) --pick;
    c.row(j) = data.row(pick);
    for (Eigen::Index i = 0; i < m; ++i) d2(i) = std::min(d2(i), (data.row(i) - c.row(j)).squaredNorm());
  }
  return c;
}

ClusteringResult lloyd(const Eigen::MatrixXd& data, Eigen::MatrixXd centroids, const Config& cfg,
                       RestartTrace* trace) {
  const Eigen::Index m = data.rows();
  const int k = cfg.k;
  std::vector<int> assign(m, 0);
  ClusteringResult r;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    // Step II: nearest centroid.
    for (Eigen::Index i = 0; i < m; ++i) assign[i] = nearest(centroids, data.row(i));
    // Empty-cluster repair.
    for (int c = 0; c < k; ++c) {
      if (std::find(assign.begin(), assign.end(), c) != assign.end()) continue;
      std::vector<int> size(k, 0);
      for (int a : assign) ++size[a];
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (size[assign[i]] < 2) continue;
        const double d = (data.row(i) - centroids.row(assign[i])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      assign[far] = c;
      r.warnings.push_back(fmt::format("iteration {}: cluster {} emptied and was re-seeded with sample {}", it, c, far));
    }
    // Step III: recompute means.
    const Eigen::MatrixXd next = cluster_means(data, assign, k);
    const double shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = next;
    r.iterations = it;
    if (trace != nullptr) trace->inertia.push_back(inertia(data, assign, centroids));
    if (shift < cfg.tol) break;
  }
  r.assignments = std::move(assign);
  r.centroids = std::move(centroids);
  r.inertia = inertia(data, r.assignments, r.centroids);
  r.method = ClusterMethod::kmeans;
  return r;
}

}  // namespace

ClusteringResult fit(const Eigen::MatrixXd& data, const Config& cfg, std::vector<RestartTrace>* traces) {
  const Eigen::Index m = data.rows();
  if (cfg.k < 1) throw ConfigError(fmt::format("k must be positive, got {}", cfg.k));
  if (cfg.k > m) throw ConfigError(fmt::format("k = {} exceeds the number of samples {}", cfg.k, m));
  if (cfg.n_restarts < 1 || cfg.max_iter < 1 || !(cfg.tol > 0.0)) {
    throw ConfigError("k-means needs n_restarts >= 1, max_iter >= 1 and tol > 0");
  }
  if (!data.allFinite()) throw DataError("k-means input holds non-finite values");
  {
    std::set<std::vector<double>> distinct;
    for (Eigen::Index i = 0; i < m && static_cast<int>(distinct.size()) < cfg.k; ++i) {
      std::vector<double> row(data.cols());
      for (Eigen::Index j = 0; j < data.cols(); ++j) row[j] = data(i, j);
      distinct.insert(std::move(row));
    }
    if (static_cast<int>(distinct.size()) < cfg.k) {
      throw NumericError(fmt::format("degenerate data: fewer than k = {} distinct samples", cfg.k));
    }
  }
  if (traces != nullptr) traces->assign(cfg.n_restarts, {});
  ClusteringResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < cfg.n_restarts; ++restart) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
    Eigen::MatrixXd init =
        cfg.init == Init::random_rows ? init_random_rows(data, cfg.k, rng) : init_plus_plus(data, cfg.k, rng);
    ClusteringResult r = lloyd(data, std::move(init), cfg, traces != nullptr ? &(*traces)[restart] : nullptr);
    if (r.inertia < best.inertia) best = std::move(r);
  }
  return best;
}

}  // namespace kmeans
}  // namespace sqcsef
