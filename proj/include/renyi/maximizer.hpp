#pragma once

#include <limits>
#include <vector>

#include "renyi/covariance.hpp"
#include "renyi/density.hpp"

namespace renyi {

/// Entropy order q and dimension n. q = 1 selects the Gaussian branch.
struct QIndex {
  double q = 1.0;
  int n = 1;

  bool gaussian() const noexcept { return q == 1.0; }
  /// Throws DomainError unless n ≥ 1 and q > n/(n+2).
  void validate() const;
};

/// Degrees of freedom m: n + 2q/(q-1) for q > 1, 2/(1-q) - n for q < 1,
/// +inf for q = 1.
double maximizer_dof(const QIndex& idx);

/// The index q' with maximizer_dof({q', n}) == m on the given branch.
double index_from_dof(double m, int n, bool bounded_branch);

struct MaximizerParams {
  QIndex idx;
  Covariance cov;
  double beta = 0.5;
  double log_norm_const = 0.0;
  double norm_const = 0.0;
  double dof = std::numeric_limits<double>::infinity();

  double q() const noexcept { return idx.q; }
  int n() const noexcept { return idx.n; }
  bool gaussian() const noexcept { return idx.gaussian(); }
  bool bounded() const noexcept { return idx.q > 1.0; }
};

/// Validates the index and computes β, A_q (in log space) and m.
MaximizerParams make_params(const QIndex& idx, const Covariance& cov);
inline MaximizerParams make_params(double q, const Covariance& cov) { return make_params({q, cov.dim()}, cov); }

/// A_q (1 - (q-1) β s)_+^{1/(q-1)} as a function of s = xᵀC⁻¹x.
double maximizer_profile(const MaximizerParams& p, double s);
double density(const MaximizerParams& p, const VecRef& x);
double log_density(const MaximizerParams& p, const VecRef& x);

/// Largest xᵀC⁻¹x in the support: m for q > 1, +inf otherwise.
double support_s(const MaximizerParams& p);
bool support_contains(const MaximizerParams& p, const VecRef& x);

/// Closed-form Shannon entropy; q ≤ 1 only (DomainError for q > 1).
double shannon_entropy(const MaximizerParams& p);
/// H_q(g) = log(∫g^q)/(1-q); equals the Shannon entropy at q = 1.
double renyi_entropy(const MaximizerParams& p);
/// ∫ g^q = A_q^{q-1} · 2qβ.
double power_integral(const MaximizerParams& p);

/// Marginal law of the selected coordinates: a maximizer with the same m
/// in the smaller dimension and the corresponding covariance block.
MaximizerParams marginal(const MaximizerParams& p, const std::vector<int>& coords);

/// The maximizer as a Density (analytic profile, derivative and sampler).
class MaximizerDensity final : public EllipticalDensity {
 public:
  explicit MaximizerDensity(MaximizerParams params);

  const MaximizerParams& params() const noexcept { return params_; }
  double profile(double s) const override { return maximizer_profile(params_, s); }
  double log_profile(double s) const override;
  double profile_derivative(double s) const override;
  double support_s() const override { return renyi::support_s(params_); }
  double second_moment_s() const override { return params_.n(); }
  bool can_sample() const override { return true; }
  void sample(RandomStream& rng, Eigen::Ref<Vec> out) const override;
  std::string describe() const override;

 private:
  MaximizerParams params_;
};

}  // namespace renyi
