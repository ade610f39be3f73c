#pragma once

#include "renyi/errors.hpp"

namespace renyi {

class RandomStream;

/// ln Γ(x) for x > 0. Lanczos approximation (g = 607/128, 15 terms) for
/// x < 12, Stirling series above; absolute error below 1e-12 on [1e-3, 1e3].
double log_gamma(double x);

/// Ψ(x) = d/dx ln Γ(x) for x > 0.
double digamma(double x);

/// Degrees-of-freedom parameter of the χ_m law. Non-integer m is allowed:
/// χ_m is the square root of a Gamma(m/2) variate with scale 2.
class ChiParams {
 public:
  explicit ChiParams(double dof);
  double dof() const noexcept { return dof_; }
  double log_norm() const noexcept { return log_norm_; }

 private:
  double dof_;
  double log_norm_;  // ln(2^{1-m/2} / Γ(m/2))
};

/// f_m(x) = 2^{1-m/2}/Γ(m/2) x^{m-1} e^{-x²/2} for x > 0, else 0.
double chi_density(const ChiParams& params, double x);

/// One χ_m draw.
double chi_sample(const ChiParams& params, RandomStream& rng);

}  // namespace renyi
