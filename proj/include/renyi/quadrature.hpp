#pragma once

#include <functional>
#include <span>
#include <stdexcept>

namespace renyi {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate

  bool converged(double rel_tol) const;
};

/// Raised when a quadrature does not reach its tolerance or returns a
/// non-finite value (typically a divergent integral).
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ScalarFn = std::function<double(double)>;
using PointFn = std::function<double(std::span<const double>)>;

/// ∫_a^b f(x) dx. Finite intervals use tanh-sinh, which tolerates the
/// algebraic endpoint behaviour of compactly supported densities; infinite
/// intervals use adaptive Gauss-Kronrod (61 points) on the mapped range.
QuadratureResult integrate(const ScalarFn& f, double a, double b, double rel_tol = 1e-12);

/// Like integrate() but throws QuadratureError unless the result is finite
/// and its error estimate is within max(abs_tol, check_tol·|value|).
double integrate_checked(const ScalarFn& f, double a, double b, double rel_tol, double check_tol,
                         const char* what, double abs_tol = 0.0);

/// Surface area of the unit sphere S^{n-1} in R^n (2 for n = 1).
double unit_sphere_area(int n);

/// ∫_{R^n} G(xᵀ S⁻¹ x) dx for a function of the quadratic form only:
/// |S|^{1/2} · area(S^{n-1}) · ∫_0^{√s_max} r^{n-1} G(r²) dr.
/// `log_det_shape` is ln|S|; s_max may be +inf.
QuadratureResult integrate_radial(int n, double log_det_shape, const ScalarFn& g_of_s, double s_max,
                                  double rel_tol = 1e-12);

/// Nested one-dimensional quadrature over a box in up to three dimensions;
/// bounds may be infinite.
QuadratureResult integrate_box(std::span<const double> lo, std::span<const double> hi, const PointFn& f,
                               double rel_tol = 1e-10);

}  // namespace renyi
