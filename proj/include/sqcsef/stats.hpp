#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "sqcsef/dataset.hpp"

namespace sqcsef::stats {

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;  ///< two-sided
};

struct JarqueBeraResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  ///< non-excess
};

/// Pearson r with a two-sided t test on M - 2 degrees of freedom.
/// |r| = 1 yields p = 0. Requires M >= 3 and non-constant inputs.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// Spearman r_s = 1 - 6 sum(d^2) / (M (M^2 - 1)) on average ranks, with the
/// normal approximation st = r_s sqrt(M - 1) for the two-sided p-value.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> x);

/// JB = (M/6) [sk^2 + (ku - 3)^2 / 4] on population moments; p from the
/// chi-square(2) upper tail. Requires M >= 8 and non-zero variance.
JarqueBeraResult jarque_bera(std::span<const double> x);

struct NormalityEntry {
  std::string name;
  JarqueBeraResult jb;
  /// Fail-to-reject normality at alpha = 0.01, i.e. p >= 0.01.
  bool normal_at_99 = false;
};

struct NormalityReport {
  std::vector<NormalityEntry> entries;
};

NormalityReport normality(const RawDataset& d);

enum class CorrelationMethod { pearson, spearman };
std::string to_string(CorrelationMethod m);

struct CorrelationReport {
  std::vector<std::string> names;
  Eigen::MatrixXd coefficient;
  Eigen::MatrixXd p_value;
  std::vector<std::vector<CorrelationMethod>> method;
  /// Non-empty where a pair could not be evaluated (coefficient is NaN there).
  std::vector<std::vector<std::string>> error;

  [[nodiscard]] std::string stars(Eigen::Index i, Eigen::Index j) const;
};

/// "***" for p < 0.01, "**" for p < 0.05, "*" for p < 0.10, else "".
std::string significance_stars(double p);

/// Pearson for pairs where both indicators pass the normality check,
/// Spearman otherwise. Columns of `data` follow `normality.entries`.
CorrelationReport correlation_report(const Eigen::MatrixXd& data, const NormalityReport& normality);
CorrelationReport correlation_report(const RawDataset& d, const NormalityReport& normality);

/// Pearson correlation matrix of the columns (used for factor analysis).
Eigen::MatrixXd pearson_matrix(const Eigen::MatrixXd& data);

/// Coefficient row followed by a p-value row per indicator.
std::string correlation_markdown(const CorrelationReport& r);
std::string correlation_csv(const CorrelationReport& r);

}  // namespace sqcsef::stats
