#pragma once

// Reference computations for the tests, built on Boost.Math rather than on
// the library's own special functions and quadrature.

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename F>
double integrate(F f, double a, double b) {
  if (std::isfinite(a) && std::isfinite(b)) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, 1e-13);
  }
  // exp_sinh on each half line copes with integrable endpoint singularities.
  boost::math::quadrature::exp_sinh<double> es;
  auto right = [&](double from) { return es.integrate([&](double x) { return f(from + x); }, 0.0, kInf, 1e-13); };
  auto left = [&](double to) { return es.integrate([&](double x) { return f(to - x); }, 0.0, kInf, 1e-13); };
  if (std::isfinite(a)) return right(a);
  if (std::isfinite(b)) return left(b);
  return left(0.0) + right(0.0);
}

/// Maximizer profile written out from its definition, with A_q left as a
/// free factor (normalised numerically by the callers).
inline double raw_profile(double q, int n, double s) {
  if (q == 1.0) return std::exp(-0.5 * s);
  const double beta = 1.0 / (2.0 * q - n * (1.0 - q));
  const double base = 1.0 - (q - 1.0) * beta * s;
  return base > 0.0 ? std::pow(base, 1.0 / (q - 1.0)) : 0.0;
}

inline double support_s(double q, int n) { return q > 1.0 ? n + 2.0 * q / (q - 1.0) : kInf; }

/// ∫_{R^n} G(xᵀC⁻¹x) dx = √|C| · area(S^{n-1}) / 2 · ∫ s^{n/2-1} G(s) ds, in
/// the radius r = √s to keep the integrand bounded.
template <typename G>
double radial_integral(int n, double det_c, G g, double s_max) {
  const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  auto f = [&](double r) { return std::pow(r, n - 1) * g(r * r); };
  return std::sqrt(det_c) * area * integrate(f, 0.0, std::isfinite(s_max) ? std::sqrt(s_max) : kInf);
}

/// A_q for covariance C by numerical normalisation.
inline double norm_const(double q, int n, double det_c) {
  return 1.0 / radial_integral(n, det_c, [&](double s) { return raw_profile(q, n, s); }, support_s(q, n));
}

inline double normal_cdf(double x, double sd) { return boost::math::cdf(boost::math::normal(0.0, sd), x); }

inline double students_t_cdf(double x, double dof) {
  return boost::math::cdf(boost::math::students_t(dof), x);
}

inline double beta_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::cdf(boost::math::beta_distribution<double>(a, b), x);
}

/// Differential entropy of the Student-t law with ν degrees of freedom,
/// rescaled to unit variance (ν > 2).
inline double student_t_unit_variance_entropy(double nu) {
  using boost::math::digamma;
  const double h = 0.5 * (nu + 1.0) * (digamma(0.5 * (nu + 1.0)) - digamma(0.5 * nu)) +
                   std::log(std::sqrt(nu) * boost::math::beta(0.5 * nu, 0.5));
  return h + 0.5 * std::log((nu - 2.0) / nu);
}

/// One-sample Kolmogorov-Smirnov statistic for sorted data.
template <typename Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

/// Asymptotic KS critical value at level 1% for sample size n.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace oracle
