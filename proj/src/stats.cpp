#include "sqcsef/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sqcsef/distributions.hpp"
#include "sqcsef/error.hpp"

namespace sqcsef::stats {
namespace {

void check_pair(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) {
    throw DataError(fmt::format("{}: length mismatch ({} vs {})", what, x.size(), y.size()));
  }
  if (x.size() < 3) throw DataError(fmt::format("{}: needs at least 3 samples, got {}", what, x.size()));
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "pearson");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericError("pearson: correlation undefined for a constant input");
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double m = static_cast<double>(x.size());
  CorrelationResult out{r, 0.0};
  const double denom = 1.0 - r * r;
  if (denom <= 0.0) return out;
  const double t = r * std::sqrt((m - 2.0) / denom);
  out.p_value = std::min(1.0, 2.0 * student_t_sf(std::fabs(t), static_cast<int>(x.size()) - 2));
  return out;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "spearman");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const auto constant = [](const std::vector<double>& r) {
    return std::all_of(r.begin(), r.end(), [&](double v) { return v == r.front(); });
  };
  if (constant(rx) || constant(ry)) throw NumericError("spearman: correlation undefined for a constant input");
  double d2 = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  const double m = static_cast<double>(x.size());
  // Average ranks can push the untied formula slightly past +-1.
  const double rs = std::clamp(1.0 - 6.0 * d2 / (m * (m * m - 1.0)), -1.0, 1.0);
  const double st = rs * std::sqrt(m - 1.0);
  return {rs, std::min(1.0, 2.0 * normal_sf(std::fabs(st)))};
}

JarqueBeraResult jarque_bera(std::span<const double> x) {
  if (x.size() < 8) throw DataError(fmt::format("jarque-bera: needs at least 8 samples, got {}", x.size()));
  const double m = static_cast<double>(x.size());
  const double mu = mean_of(x);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mu;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= m;
  m3 /= m;
  m4 /= m;
  if (m2 == 0.0) throw NumericError("jarque-bera: undefined for zero variance");
  JarqueBeraResult out;
  out.skewness = m3 / std::pow(m2, 1.5);
  out.kurtosis = m4 / (m2 * m2);
  const double excess = out.kurtosis - 3.0;
  out.statistic = m / 6.0 * (out.skewness * out.skewness + excess * excess / 4.0);
  out.p_value = chi_square_sf(out.statistic, 2);
  return out;
}

NormalityReport normality(const RawDataset& d) {
  NormalityReport out;
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    NormalityEntry e;
    e.name = d.indicators()[j].name;
    e.jb = jarque_bera(d.column(j));
    e.normal_at_99 = e.jb.p_value >= 0.01;
    out.entries.push_back(std::move(e));
  }
  return out;
}

std::string to_string(CorrelationMethod m) { return m == CorrelationMethod::pearson ? "pearson" : "spearman"; }

std::string significance_stars(double p) {
  if (!(p >= 0.0)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

std::string CorrelationReport::stars(Eigen::Index i, Eigen::Index j) const {
  if (i == j || !error[i][j].empty()) return "";
  return significance_stars(p_value(i, j));
}

CorrelationReport correlation_report(const Eigen::MatrixXd& data, const NormalityReport& normality) {
  const Eigen::Index n = data.cols();
  if (n < 2) throw DataError("correlation report needs at least 2 indicators");
  if (static_cast<Eigen::Index>(normality.entries.size()) != n) {
    throw DataError("correlation report: normality entries do not match the data columns");
  }
  CorrelationReport r;
  for (const auto& e : normality.entries) r.names.push_back(e.name);
  r.coefficient = Eigen::MatrixXd::Identity(n, n);
  r.p_value = Eigen::MatrixXd::Ones(n, n);
  r.method.assign(n, std::vector<CorrelationMethod>(n, CorrelationMethod::pearson));
  r.error.assign(n, std::vector<std::string>(n));
  const auto col = [&](Eigen::Index j) {
    return std::span<const double>(data.col(j).data(), static_cast<std::size_t>(data.rows()));
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool both_normal = normality.entries[i].normal_at_99 && normality.entries[j].normal_at_99;
      const auto method = both_normal ? CorrelationMethod::pearson : CorrelationMethod::spearman;
      r.method[i][j] = r.method[j][i] = method;
      try {
        const auto res = both_normal ? pearson(col(i), col(j)) : spearman(col(i), col(j));
        r.coefficient(i, j) = r.coefficient(j, i) = res.coefficient;
        r.p_value(i, j) = r.p_value(j, i) = res.p_value;
      } catch (const Error& e) {
        r.coefficient(i, j) = r.coefficient(j, i) = std::numeric_limits<double>::quiet_NaN();
        r.p_value(i, j) = r.p_value(j, i) = std::numeric_limits<double>::quiet_NaN();
        r.error[i][j] = r.error[j][i] = e.what();
      }
    }
  }
  return r;
}

CorrelationReport correlation_report(const RawDataset& d, const NormalityReport& normality) {
  return correlation_report(d.rows(), normality);
}

Eigen::MatrixXd pearson_matrix(const Eigen::MatrixXd& data) {
  const Eigen::Index n = data.cols();
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto res = pearson({data.col(i).data(), static_cast<std::size_t>(data.rows())},
                               {data.col(j).data(), static_cast<std::size_t>(data.rows())});
      r(i, j) = r(j, i) = res.coefficient;
    }
  }
  return r;
}

std::string correlation_markdown(const CorrelationReport& r) {
  const auto n = static_cast<Eigen::Index>(r.names.size());
  std::string out = "| |";
  for (const auto& name : r.names) out += " " + name + " |";
  out += "\n|---|";
  for (Eigen::Index j = 0; j < n; ++j) out += "---|";
  out += '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    out += "| " + r.names[i] + " |";
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!r.error[i][j].empty()) {
        out += " n/a |";
      } else {
        out += fmt::format(" {:.4f}{}{} |", r.coefficient(i, j), r.stars(i, j),
                           i != j && r.method[i][j] == CorrelationMethod::spearman ? " (S)" : "");
      }
    }
    out += "\n| (p-value) |";
    for (Eigen::Index j = 0; j < n; ++j) {
      out += r.error[i][j].empty() ? fmt::format(" {:.4f} |", r.p_value(i, j)) : std::string(" n/a |");
    }
    out += '\n';
  }
  return out;
}

std::string correlation_csv(const CorrelationReport& r) {
  const auto n = static_cast<Eigen::Index>(r.names.size());
  std::string out = "row,kind";
  for (const auto& name : r.names) out += "," + name;
  out += '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    out += r.names[i] + ",coefficient";
    for (Eigen::Index j = 0; j < n; ++j) out += fmt::format(",{}", r.coefficient(i, j));
    out += '\n' + r.names[i] + ",p_value";
    for (Eigen::Index j = 0; j < n; ++j) out += fmt::format(",{}", r.p_value(i, j));
    out += '\n' + r.names[i] + ",method";
    for (Eigen::Index j = 0; j < n; ++j) out += "," + (i == j ? std::string("-") : to_string(r.method[i][j]));
    out += '\n';
  }
  return out;
}

}  // namespace sqcsef::stats
