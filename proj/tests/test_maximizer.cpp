#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "renyi/maximizer.hpp"

using namespace renyi;

namespace {

Covariance corr2() {
  Mat c(2, 2);
  c << 1.0, 0.3, 0.3, 2.0;
  return Covariance(c);
}

const double kGrid[] = {0.5, 0.8, 1.5, 2.0, 3.0};

}  // namespace

TEST_CASE("parameters for q = 2, n = 1, C = 1") {
  const auto p = make_params(2.0, Covariance::identity(1));
  CHECK(std::abs(p.beta - 0.2) < 1e-15);
  CHECK(std::abs(p.dof - 5.0) < 1e-15);
  CHECK(std::abs(p.norm_const - 0.3354101966249685) < 1e-12);
  CHECK(std::abs(p.norm_const - oracle::norm_const(2.0, 1, 1.0)) < 1e-11);
  CHECK(std::abs(support_s(p) - 5.0) < 1e-15);
}

TEST_CASE("normalising constant matches numerical normalisation across the grid") {
  for (int n : {1, 2}) {
    const Covariance c = n == 1 ? Covariance::scalar(1.7) : corr2();
    for (double q : kGrid) {
      if (q <= n / (n + 2.0)) continue;
      CAPTURE(q);
      CAPTURE(n);
      const auto p = make_params(q, c);
      CHECK(std::abs(p.norm_const / oracle::norm_const(q, n, c.det()) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("q = 1/2, n = 1 gives A = 2/π") {
  const auto p = make_params(0.5, Covariance::identity(1));
  CHECK(std::abs(p.norm_const - 2.0 / std::numbers::pi) < 1e-12);
  CHECK(std::abs(p.dof - 3.0) < 1e-15);
}

TEST_CASE("density vanishes outside the support for q > 1") {
  const auto p = make_params(2.0, Covariance::identity(1));
  CHECK(density(p, Vec::Constant(1, 0.0)) == doctest::Approx(0.3354101966));
  CHECK(density(p, Vec::Constant(1, std::sqrt(5.0) + 1e-9)) == 0.0);
  CHECK(density(p, Vec::Constant(1, 3.0)) == 0.0);
  CHECK_FALSE(support_contains(p, Vec::Constant(1, 3.0)));
  CHECK(support_contains(p, Vec::Constant(1, 2.0)));
  CHECK(std::isinf(log_density(p, Vec::Constant(1, 3.0))));
  const auto t = make_params(0.5, Covariance::identity(1));
  CHECK(density(t, Vec::Constant(1, 1e3)) > 0.0);
}

TEST_CASE("invalid indices are rejected") {
  CHECK_THROWS_AS(make_params(0.3, Covariance::identity(1)), DomainError);
  CHECK_THROWS_AS(make_params(0.5, Covariance::identity(2)), DomainError);  // needs q > 1/2
  CHECK_THROWS_AS(make_params(QIndex{2.0, 0}, Covariance::identity(1)), DomainError);
  CHECK_THROWS_AS(make_params(QIndex{2.0, 2}, Covariance::identity(1)), InvalidArgument);
  CHECK_THROWS_AS(make_params(std::nan(""), Covariance::identity(1)), DomainError);
}

TEST_CASE("Renyi entropy: q = 2 closed form against quadrature") {
  const auto p = make_params(2.0, Covariance::identity(1));
  const double a = oracle::norm_const(2.0, 1, 1.0);
  const double integral =
      oracle::integrate([&](double x) { return std::pow(a * oracle::raw_profile(2.0, 1, x * x), 2.0); }, -std::sqrt(5.0),
                        std::sqrt(5.0));
  CHECK(std::abs(renyi_entropy(p) + std::log(integral)) < 1e-10);
  CHECK(std::abs(renyi_entropy(p) - 1.3155445799830403) < 1e-10);
  CHECK(std::abs(power_integral(p) - integral) < 1e-12);
  CHECK(std::abs(power_integral(p) - 0.2683281572999748) < 1e-12);
}

TEST_CASE("Renyi entropy: closed form against quadrature across the grid") {
  for (int n : {1, 2}) {
    const Covariance c = n == 1 ? Covariance::identity(1) : corr2();
    for (double q : kGrid) {
      if (q <= n / (n + 2.0)) continue;
      CAPTURE(q);
      CAPTURE(n);
      const double a = oracle::norm_const(q, n, c.det());
      const double integral = oracle::radial_integral(
          n, c.det(), [&](double s) { return std::pow(a * oracle::raw_profile(q, n, s), q); }, oracle::support_s(q, n));
      CHECK(std::abs(renyi_entropy(make_params(q, c)) - std::log(integral) / (1.0 - q)) < 1e-8);
    }
  }
}

TEST_CASE("Shannon entropy of the q = 1/2 maximizer is the unit-variance Student-t(3) entropy") {
  const auto p = make_params(0.5, Covariance::identity(1));
  CHECK(std::abs(shannon_entropy(p) - oracle::student_t_unit_variance_entropy(3.0)) < 1e-12);
  CHECK(std::abs(shannon_entropy(p) - 1.2241714275292381) < 1e-9);
}

TEST_CASE("Shannon entropy of q < 1 maximizers against quadrature") {
  for (double q : {0.5, 0.8}) {
    const Covariance c = Covariance::scalar(2.3);
    const auto p = make_params(q, c);
    const double a = oracle::norm_const(q, 1, c.det());
    const double h = oracle::radial_integral(
        1, c.det(),
        [&](double s) {
          const double g = a * oracle::raw_profile(q, 1, s);
          return g > 0.0 ? -g * std::log(g) : 0.0;
        },
        oracle::kInf);
    CHECK(std::abs(shannon_entropy(p) - h) < 1e-8);
  }
}

TEST_CASE("Gaussian branch") {
  const auto p = make_params(1.0, Covariance::identity(1));
  CHECK(p.gaussian());
  CHECK(std::abs(shannon_entropy(p) - 0.5 * std::log(2 * std::numbers::pi * std::numbers::e)) < 1e-14);
  CHECK(std::abs(renyi_entropy(p) - 1.4189385332046727) < 1e-13);
  CHECK_THROWS_AS(shannon_entropy(make_params(2.0, Covariance::identity(1))), DomainError);
}

TEST_CASE("H_q is continuous at q = 1") {
  const double h1 = renyi_entropy(make_params(1.0, corr2()));
  for (double eps : {1e-4, -1e-4}) {
    CHECK(std::abs(renyi_entropy(make_params(1.0 + eps, corr2())) - h1) < 1e-3);
  }
}

TEST_CASE("marginal of a bivariate maximizer integrates the joint density") {
  for (double q : {0.8, 2.0}) {
    const auto p = make_params(q, corr2());
    const auto m0 = marginal(p, {0});
    CHECK(std::abs(m0.dof - p.dof) < 1e-12);
    const Mat ci = corr2().inverse();
    for (double x : {0.0, 0.7, 1.9}) {
      // For q > 1 integrate over the exact chord {y : (x, y)ᵀC⁻¹(x, y) ≤ m}.
      double lo = -oracle::kInf, hi = oracle::kInf;
      if (q > 1.0) {
        const double a = ci(1, 1), b = 2.0 * ci(0, 1) * x, c = ci(0, 0) * x * x - p.dof;
        const double disc = std::sqrt(b * b - 4.0 * a * c);
        lo = (-b - disc) / (2.0 * a);
        hi = (-b + disc) / (2.0 * a);
      }
      const double joint = oracle::integrate(
          [&](double y) {
            Vec v(2);
            v << x, y;
            return density(p, v);
          },
          lo, hi);
      CHECK(std::abs(density(m0, Vec::Constant(1, x)) - joint) < 1e-8);
    }
  }
}

TEST_CASE("index_from_dof inverts maximizer_dof on both branches") {
  for (int n : {1, 2, 3}) {
    for (double q : {0.75, 0.9, 1.5, 3.0}) {
      if (q <= n / (n + 2.0)) continue;
      const double m = maximizer_dof({q, n});
      CHECK(std::abs(index_from_dof(m, n, q > 1.0) - q) < 1e-12);
    }
  }
}

TEST_CASE("MaximizerDensity derivative matches a finite difference") {
  for (double q : {0.6, 1.5, 3.0}) {
    const MaximizerDensity d(make_params(q, Covariance::identity(1)));
    for (double s : {0.1, 0.9, 2.5}) {
      const double h = 1e-6;
      const double fd = (d.profile(s + h) - d.profile(s - h)) / (2 * h);
      CHECK(std::abs(d.profile_derivative(s) - fd) < 1e-7);
    }
    CHECK(d.second_moment_s() == 1.0);
  }
}
