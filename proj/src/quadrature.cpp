#include "renyi/quadrature.hpp"

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>

#include "renyi/specfun.hpp"

namespace renyi {

namespace bq = boost::math::quadrature;

bool QuadratureResult::converged(double rel_tol) const {
  return std::isfinite(value) && std::isfinite(error) && error <= rel_tol * std::max(1e-300, std::abs(value));
}

QuadratureResult integrate(const ScalarFn& f, double a, double b, double rel_tol) {
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(f, b, a, rel_tol);
    return {-r.value, r.error};
  }
  QuadratureResult out;
  try {
    if (std::isfinite(a) && std::isfinite(b)) {
      // One integrator per nesting level: the rule refines its tables
      // lazily, so a nested call must not share the outer one.
      thread_local std::array<std::unique_ptr<bq::tanh_sinh<double>>, 8> integrators;
      thread_local std::size_t depth = 0;
      if (depth >= integrators.size()) throw std::runtime_error("quadrature nested too deeply");
      auto& slot = integrators[depth];
      if (!slot) slot = std::make_unique<bq::tanh_sinh<double>>();
      struct DepthGuard {
        std::size_t& d;
        explicit DepthGuard(std::size_t& v) : d(v) { ++d; }
        ~DepthGuard() { --d; }
      } guard(depth);
      double l1 = 0.0;
      out.value = slot->integrate(f, a, b, rel_tol, &out.error, &l1);
    } else {
      double l1 = 0.0;
      out.value = bq::gauss_kronrod<double, 61>::integrate(f, a, b, 10, rel_tol, &out.error, &l1);
    }
  } catch (const std::exception&) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.error = std::numeric_limits<double>::infinity();
  }
  return out;
}

double integrate_checked(const ScalarFn& f, double a, double b, double rel_tol, double check_tol,
                         const char* what, double abs_tol) {
  const auto r = integrate(f, a, b, rel_tol);
  if (!std::isfinite(r.value) || !(r.error <= std::max(abs_tol, check_tol * std::abs(r.value)))) {
    throw QuadratureError(std::string(what) + ": quadrature did not converge (value " + std::to_string(r.value) +
                          ", error estimate " + std::to_string(r.error) + ")");
  }
  return r.value;
}

double unit_sphere_area(int n) {
  const double half = 0.5 * n;
  return 2.0 * std::exp(half * std::log(std::numbers::pi) - log_gamma(half));
}

QuadratureResult integrate_radial(int n, double log_det_shape, const ScalarFn& g_of_s, double s_max,
                                  double rel_tol) {
  const double r_max = std::isfinite(s_max) ? std::sqrt(s_max) : std::numeric_limits<double>::infinity();
  auto radial = [&](double r) {
    const double v = g_of_s(r * r);
    return v == 0.0 ? 0.0 : std::pow(r, n - 1) * v;
  };
  auto r = integrate(radial, 0.0, r_max, rel_tol);
  const double scale = std::exp(0.5 * log_det_shape) * unit_sphere_area(n);
  return {r.value * scale, r.error * scale};
}

namespace {

QuadratureResult nested(std::size_t axis, std::array<double, 3>& point, std::span<const double> lo,
                        std::span<const double> hi, const PointFn& f, double rel_tol) {
  const std::size_t dim = lo.size();
  if (axis + 1 == dim) {
    return integrate(
        [&](double x) {
          point[axis] = x;
          return f(std::span<const double>(point.data(), dim));
        },
        lo[axis], hi[axis], rel_tol);
  }
  auto outer = integrate(
      [&](double x) {
        point[axis] = x;
        // Inner integrals run tighter so their noise does not stall the outer rule.
        return nested(axis + 1, point, lo, hi, f, rel_tol * 0.1).value;
      },
      lo[axis], hi[axis], rel_tol);
  return outer;
}

}  // namespace

QuadratureResult integrate_box(std::span<const double> lo, std::span<const double> hi, const PointFn& f,
                               double rel_tol) {
  if (lo.size() != hi.size() || lo.empty() || lo.size() > 3) {
    throw std::invalid_argument("integrate_box: dimension must be 1, 2 or 3");
  }
  std::array<double, 3> point{};
  return nested(0, point, lo, hi, f, rel_tol);
}

}  // namespace renyi
