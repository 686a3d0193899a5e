#pragma once

#include <optional>

namespace sqcsef::stats {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed directly.
double regularized_gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b), a, b > 0, 0 <= x <= 1.
double regularized_beta(double a, double b, double x);

double normal_cdf(double x);
double student_t_cdf(double t, int dof);
double chi_square_cdf(double x, int dof);

/// Upper tails, evaluated without the 1 - cdf cancellation.
double normal_sf(double x);
double student_t_sf(double t, int dof);
double chi_square_sf(double x, int dof);

enum class Distribution { std_normal, student_t, chi_square };

/// Lower CDF of `dist` at `x`. `dof` is required for student_t and
/// chi_square. Throws NumericError for non-finite x or a missing/invalid dof.
double tail_probability(Distribution dist, double x, std::optional<int> dof = std::nullopt);

}  // namespace sqcsef::stats
