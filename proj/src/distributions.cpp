#include "sqcsef/distributions.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "sqcsef/error.hpp"

namespace sqcsef::stats {
namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by Lentz's continued fraction; used for x >= a + 1.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

void check_finite(double x) {
  if (!std::isfinite(x)) throw NumericError(fmt::format("tail probability: non-finite argument {}", x));
}

void check_dof(int dof) {
  if (dof <= 0) throw NumericError(fmt::format("tail probability: degrees of freedom must be positive, got {}", dof));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw NumericError(fmt::format("incomplete gamma: invalid a={} x={}", a, x));
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw NumericError(fmt::format("incomplete gamma: invalid a={} x={}", a, x));
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double regularized_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw NumericError(fmt::format("incomplete beta: invalid a={} b={} x={}", a, b, x));
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double student_t_sf(double t, int dof) {
  check_dof(dof);
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double nu = dof;
  // P(T > |t|) = 0.5 * I_{nu / (nu + t^2)}(nu / 2, 1 / 2)
  const double tail = 0.5 * regularized_beta(0.5 * nu, 0.5, nu / (nu + t * t));
  return t >= 0.0 ? tail : 1.0 - tail;
}

double student_t_cdf(double t, int dof) {
  check_dof(dof);
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double nu = dof;
  const double tail = 0.5 * regularized_beta(0.5 * nu, 0.5, nu / (nu + t * t));
  return t >= 0.0 ? 1.0 - tail : tail;
}

double chi_square_cdf(double x, int dof) {
  check_dof(dof);
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_sf(double x, int dof) {
  check_dof(dof);
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

double tail_probability(Distribution dist, double x, std::optional<int> dof) {
  check_finite(x);
  switch (dist) {
    case Distribution::std_normal:
      return normal_cdf(x);
    case Distribution::student_t:
      if (!dof) throw NumericError("tail probability: student_t requires degrees of freedom");
      return student_t_cdf(x, *dof);
    case Distribution::chi_square:
      if (!dof) throw NumericError("tail probability: chi_square requires degrees of freedom");
      return chi_square_cdf(x, *dof);
  }
  throw NumericError("tail probability: unknown distribution");
}

}  // namespace sqcsef::stats
