#include "renyi/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "renyi/random.hpp"

namespace renyi {

namespace {

// Godfrey's coefficients for g = 607/128.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};

constexpr double kHalfLogTwoPi = 0.91893853320467274178;

double lanczos_log_gamma(double x) {
  // Γ(z+1) = √(2π) t^{z+1/2} e^{-t} A(z), t = z + g + 1/2.
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t k = 1; k < kLanczos.size(); ++k) {
    sum += kLanczos[k] / (z + static_cast<double>(k));
  }
  const double t = z + kLanczosG + 0.5;
  return kHalfLogTwoPi + (z + 0.5) * std::log(t) - t + std::log(sum);
}

double stirling_log_gamma(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0))))));
  return (x - 0.5) * std::log(x) - x + kHalfLogTwoPi + series;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be positive and finite");
  }
  if (x < 0.5) {
    return lanczos_log_gamma(x + 1.0) - std::log(x);
  }
  if (x < 12.0) {
    return lanczos_log_gamma(x);
  }
  return stirling_log_gamma(x);
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("digamma: argument must be positive and finite");
  }
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic expansion, Bernoulli terms through B_12.
  const double inv2 = 1.0 / (x * x);
  const double tail =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
  return shift + std::log(x) - 0.5 / x - tail;
}

ChiParams::ChiParams(double dof) : dof_(dof) {
  if (!(dof > 0.0) || !std::isfinite(dof)) {
    throw DomainError("ChiParams: degrees of freedom must be positive");
  }
  log_norm_ = (1.0 - 0.5 * dof_) * std::numbers::ln2 - log_gamma(0.5 * dof_);
}

double chi_density(const ChiParams& params, double x) {
  if (!(x > 0.0)) return 0.0;
  return std::exp(params.log_norm() + (params.dof() - 1.0) * std::log(x) - 0.5 * x * x);
}

double chi_sample(const ChiParams& params, RandomStream& rng) {
  return std::sqrt(2.0 * rng.gamma(0.5 * params.dof()));
}

}  // namespace renyi
