#include "sqcsef/factors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "sqcsef/distributions.hpp"
#include "sqcsef/error.hpp"

namespace sqcsef::factors {
namespace {

void check_correlation(const Eigen::MatrixXd& r) {
  if (r.rows() != r.cols() || r.rows() == 0) throw NumericError("correlation matrix must be square and non-empty");
  if ((r - r.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw NumericError("correlation matrix is not symmetric");
}

// Column permutation by descending sum of squares and sign flips so the
// largest-magnitude entry of each column is positive, as an orthogonal map.
Eigen::MatrixXd canonical_columns(const Eigen::MatrixXd& loadings) {
  const Eigen::Index k = loadings.cols();
  std::vector<Eigen::Index> order(k);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd ss = loadings.colwise().squaredNorm().transpose();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return ss(a) > ss(b); });
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index src = order[c];
    Eigen::Index arg = 0;
    loadings.col(src).cwiseAbs().maxCoeff(&arg);
    map(src, c) = loadings(arg, src) < 0.0 ? -1.0 : 1.0;
  }
  return map;
}

}  // namespace

Adequacy adequacy(const Eigen::MatrixXd& corr, Eigen::Index samples) {
  check_correlation(corr);
  const Eigen::Index n = corr.rows();
  if (samples <= n) {
    throw DataError(fmt::format("adequacy tests need more samples than indicators ({} <= {})", samples, n));
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(corr);
  const Eigen::VectorXd d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-12 * std::max(1.0, d.cwiseAbs().maxCoeff())) {
    throw NumericError("correlation matrix is singular or indefinite; KMO is undefined");
  }
  const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
  double r2 = 0.0;
  double a2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double partial = -inv(i, j) / std::sqrt(inv(i, i) * inv(j, j));
      r2 += corr(i, j) * corr(i, j);
      a2 += partial * partial;
    }
  }
  Adequacy out;
  out.kmo = (r2 + a2) > 0.0 ? r2 / (r2 + a2) : 0.0;
  const double log_det = d.array().log().sum();
  const double m = static_cast<double>(samples);
  const double nn = static_cast<double>(n);
  out.bartlett_chi2 = -(m - 1.0 - (2.0 * nn + 5.0) / 6.0) * log_det;
  if (std::fabs(out.bartlett_chi2) < 1e-300) out.bartlett_chi2 = 0.0;
  out.bartlett_dof = static_cast<int>(n * (n - 1) / 2);
  out.bartlett_p = out.bartlett_dof > 0 ? stats::chi_square_sf(out.bartlett_chi2, out.bartlett_dof) : 1.0;
  return out;
}

VarianceTable variance_explained(const Eigen::VectorXd& eigenvalues) {
  const double n = static_cast<double>(eigenvalues.size());
  VarianceTable t;
  t.percent = 100.0 * eigenvalues / n;
  t.cumulative.resize(eigenvalues.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    acc += t.percent(i);
    t.cumulative(i) = acc;
  }
  return t;
}

double varimax_criterion(const Eigen::MatrixXd& loadings) {
  const Eigen::Index n = loadings.rows();
  Eigen::MatrixXd a = loadings;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = a.row(i).norm();
    if (h > 0.0) a.row(i) /= h;
  }
  double v = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const Eigen::ArrayXd sq = a.col(j).array().square();
    v += (sq.square().sum() - sq.sum() * sq.sum() / static_cast<double>(n)) / static_cast<double>(n);
  }
  return v;
}

VarimaxResult varimax(const Eigen::MatrixXd& loadings, double tol, int max_sweeps) {
  const Eigen::Index n = loadings.rows();
  const Eigen::Index k = loadings.cols();
  VarimaxResult out;
  out.rotation = Eigen::MatrixXd::Identity(k, k);
  if (k < 2) {
    out.rotated = loadings;
    out.criterion.push_back(varimax_criterion(loadings));
    return out;
  }

  Eigen::VectorXd h = loadings.rowwise().norm();
  Eigen::MatrixXd a = loadings;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (h(i) > 0.0) a.row(i) /= h(i);
  }
  const double nn = static_cast<double>(n);
  double current = varimax_criterion(a);
  out.criterion.push_back(current);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (Eigen::Index p = 0; p < k - 1; ++p) {
      for (Eigen::Index q = p + 1; q < k; ++q) {
        const Eigen::ArrayXd x = a.col(p).array();
        const Eigen::ArrayXd y = a.col(q).array();
        const Eigen::ArrayXd u = x.square() - y.square();
        const Eigen::ArrayXd v = 2.0 * x * y;
        const double sa = u.sum();
        const double sb = v.sum();
        const double sc = (u.square() - v.square()).sum();
        const double sd = 2.0 * (u * v).sum();
        const double num = sd - 2.0 * sa * sb / nn;
        const double den = sc - (sa * sa - sb * sb) / nn;
        const double phi = 0.25 * std::atan2(num, den);
        if (std::fabs(phi) < 1e-15) continue;
        const double c = std::cos(phi);
        const double s = std::sin(phi);
        Eigen::MatrixXd g = Eigen::MatrixXd::Identity(k, k);
        g(p, p) = c;
        g(q, p) = s;
        g(p, q) = -s;
        g(q, q) = c;
        a = a * g;
        out.rotation = out.rotation * g;
      }
    }
    ++out.sweeps;
    const double next = varimax_criterion(a);
    out.criterion.push_back(next);
    const double change = std::fabs(next - current);
    current = next;
    if (change < tol) break;
  }

  Eigen::MatrixXd rotated = loadings * out.rotation;
  const Eigen::MatrixXd canon = canonical_columns(rotated);
  out.rotation = out.rotation * canon;
  out.rotated = loadings * out.rotation;
  return out;
}

Eigen::MatrixXd varimax_rotate(const Eigen::MatrixXd& loadings) { return varimax(loadings).rotated; }

FactorModel extract_factors(const Eigen::MatrixXd& corr, int n_factors) {
  check_correlation(corr);
  const Eigen::Index n = corr.rows();
  if (n_factors < 1 || n_factors > n) {
    throw ConfigError(fmt::format("number of factors must be in [1, {}], got {}", n, n_factors));
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr);
  if (solver.info() != Eigen::Success) throw NumericError("eigendecomposition of the correlation matrix failed");
  if (solver.eigenvalues().minCoeff() < -1e-9) {
    throw NumericError(fmt::format("correlation matrix is not positive semidefinite (eigenvalue {})",
                                   solver.eigenvalues().minCoeff()));
  }
  FactorModel m;
  m.n_factors = n_factors;
  m.eigenvalues.resize(n);
  m.eigenvectors.resize(n, n);
  // Eigen returns ascending order.
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = n - 1 - j;
    m.eigenvalues(j) = std::max(0.0, solver.eigenvalues()(src));
    Eigen::VectorXd vec = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    vec.cwiseAbs().maxCoeff(&arg);
    if (vec(arg) < 0.0) vec = -vec;
    m.eigenvectors.col(j) = vec;
  }
  m.variance = variance_explained(m.eigenvalues);
  m.unrotated_loadings.resize(n, n_factors);
  for (int j = 0; j < n_factors; ++j) {
    m.unrotated_loadings.col(j) = m.eigenvectors.col(j) * std::sqrt(m.eigenvalues(j));
  }
  const VarimaxResult rot = varimax(m.unrotated_loadings);
  m.rotated_loadings = rot.rotated;
  m.rotation = rot.rotation;
  m.rotated_eigenvalues = m.rotated_loadings.colwise().squaredNorm().transpose();
  return m;
}

FactorCountGuidance factor_count_guidance(const Eigen::VectorXd& eigenvalues) {
  FactorCountGuidance g;
  const VarianceTable t = variance_explained(eigenvalues);
  g.cumulative_80 = static_cast<int>(eigenvalues.size());
  for (Eigen::Index i = 0; i < t.cumulative.size(); ++i) {
    if (t.cumulative(i) >= 80.0 - 1e-9) {
      g.cumulative_80 = static_cast<int>(i + 1);
      break;
    }
  }
  g.kaiser = static_cast<int>((eigenvalues.array() > 1.0).count());
  g.scree_elbow = 1;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 1; i + 1 < eigenvalues.size(); ++i) {
    const double bend = (eigenvalues(i - 1) - eigenvalues(i)) - (eigenvalues(i) - eigenvalues(i + 1));
    if (bend > best) {
      best = bend;
      g.scree_elbow = static_cast<int>(i + 1);
    }
  }
  return g;
}

std::vector<double> view_weights(const std::vector<double>& rotated_eigenvalues) {
  if (rotated_eigenvalues.empty()) throw NumericError("view weights need at least one eigenvalue");
  double total = 0.0;
  for (double v : rotated_eigenvalues) {
    if (!(v > 0.0) || !std::isfinite(v)) throw NumericError(fmt::format("view weights: non-positive eigenvalue {}", v));
    total += v;
  }
  std::vector<double> w;
  w.reserve(rotated_eigenvalues.size());
  for (double v : rotated_eigenvalues) w.push_back(v / total);
  return w;
}

void validate_partition(const ViewPartition& p, int n_indicators) {
  if (p.views.empty()) throw DataError("view partition is empty");
  if (p.weights.size() != p.views.size()) {
    throw DataError(fmt::format("view partition has {} views but {} weights", p.views.size(), p.weights.size()));
  }
  std::vector<int> owner(n_indicators, -1);
  for (std::size_t v = 0; v < p.views.size(); ++v) {
    if (p.views[v].indicators.empty()) throw DataError("view '" + p.views[v].name + "' is empty");
    for (int idx : p.views[v].indicators) {
      if (idx < 0 || idx >= n_indicators) throw DataError(fmt::format("view '{}': indicator index {} out of range", p.views[v].name, idx));
      if (owner[idx] >= 0) {
        throw DataError(fmt::format("indicator {} appears in views '{}' and '{}'", idx, p.views[owner[idx]].name, p.views[v].name));
      }
      owner[idx] = static_cast<int>(v);
    }
  }
  for (int i = 0; i < n_indicators; ++i) {
    if (owner[i] < 0) throw DataError(fmt::format("indicator {} is not covered by any view", i));
  }
}

ViewPartition partition_views(const FactorModel& model, const std::optional<std::vector<std::string>>& names) {
  const Eigen::MatrixXd& l = model.rotated_loadings;
  if (l.size() == 0) throw DataError("partition needs rotated loadings");
  const Eigen::Index n = l.rows();
  const Eigen::Index k = l.cols();
  if (names && static_cast<Eigen::Index>(names->size()) != k) {
    throw ConfigError(fmt::format("{} view names given for {} factors", names->size(), k));
  }
  ViewPartition p;
  std::vector<std::vector<int>> members(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < k; ++j) {
      if (std::fabs(l(i, j)) > std::fabs(l(i, best))) best = j;
    }
    for (Eigen::Index j = best + 1; j < k; ++j) {
      if (std::fabs(l(i, j)) == std::fabs(l(i, best))) {
        p.warnings.push_back(fmt::format("indicator {} ties between factor{} and factor{}; assigned to factor{}", i,
                                         best + 1, j + 1, best + 1));
      }
    }
    members[best].push_back(static_cast<int>(i));
  }
  std::vector<double> eig;
  for (Eigen::Index j = 0; j < k; ++j) {
    const std::string name = names ? (*names)[j] : fmt::format("factor{}", j + 1);
    if (members[j].empty()) {
      p.warnings.push_back("view '" + name + "' attracts no indicator and is dropped");
      continue;
    }
    p.views.push_back({name, members[j]});
    eig.push_back(model.rotated_eigenvalues(j));
  }
  p.weights = view_weights(eig);
  validate_partition(p, static_cast<int>(n));
  return p;
}

ViewPartition manual_partition(std::vector<View> views, std::vector<double> weights, int n_indicators) {
  ViewPartition p;
  for (auto& v : views) std::sort(v.indicators.begin(), v.indicators.end());
  p.views = std::move(views);
  p.weights = view_weights(weights);
  validate_partition(p, n_indicators);
  return p;
}

std::string scree_csv(const Eigen::VectorXd& eigenvalues) {
  std::string out = "factor,eigenvalue\n";
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) out += fmt::format("{},{}\n", i + 1, eigenvalues(i));
  return out;
}

std::string scree_svg(const Eigen::VectorXd& eigenvalues) {
  constexpr double width = 480.0, height = 320.0, margin = 48.0;
  const Eigen::Index n = eigenvalues.size();
  const double top = std::max(1.0, std::ceil(eigenvalues.maxCoeff()));
  const auto px = [&](Eigen::Index i) {
    return n > 1 ? margin + (width - 2 * margin) * static_cast<double>(i) / static_cast<double>(n - 1) : width / 2;
  };
  const auto py = [&](double v) { return height - margin - (height - 2 * margin) * v / top; };
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      width, height, width, height);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", margin, height - margin,
                     width - margin);
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", margin, margin,
                     height - margin);
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">Factor</text>\n", width / 2,
                     height - 12);
  out += fmt::format(
      "<text x=\"14\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">Eigenvalue</text>\n",
      height / 2, height / 2);
  std::string points;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) points += ' ';
    points += fmt::format("{:.2f},{:.2f}", px(i), py(eigenvalues(i)));
  }
  out += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"steelblue\"/>\n", px(i), py(eigenvalues(i)));
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n", px(i),
                       height - margin + 16, i + 1);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace sqcsef::factors
