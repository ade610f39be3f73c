#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "renyi/covariance.hpp"
#include "renyi/random.hpp"

namespace renyi {

/// A probability density on R^n with pointwise evaluation and, optionally,
/// exact sampling. Implementations are immutable after construction.
class Density {
 public:
  virtual ~Density() = default;

  virtual int dim() const = 0;
  virtual double pdf(const VecRef& x) const = 0;
  virtual double log_pdf(const VecRef& x) const;
  /// ∇p(x). The default is a central difference with step 1e-5 per
  /// coordinate scale (square root of the covariance diagonal).
  virtual Vec gradient(const VecRef& x) const;
  virtual Covariance covariance() const = 0;

  virtual bool can_sample() const { return false; }
  virtual void sample(RandomStream& rng, Eigen::Ref<Vec> out) const;

  /// Per-coordinate bounding box of the support (entries may be ±inf).
  virtual std::pair<Vec, Vec> bounding_box() const;

  virtual std::string describe() const = 0;
};

using DensityPtr = std::shared_ptr<const Density>;

/// Density of the form p(x) = h(xᵀ S⁻¹ x) for a fixed shape matrix S.
/// Integrals of functions of p then reduce to one radial quadrature.
class EllipticalDensity : public Density {
 public:
  explicit EllipticalDensity(Covariance shape) : shape_(std::move(shape)) {}

  const Covariance& shape() const noexcept { return shape_; }
  int dim() const override { return shape_.dim(); }

  /// h(s); must be zero for s > support_s().
  virtual double profile(double s) const = 0;
  virtual double log_profile(double s) const;
  /// h'(s); the default is a relative central difference.
  virtual double profile_derivative(double s) const;
  /// Largest value of xᵀ S⁻¹ x in the support (+inf if unbounded).
  virtual double support_s() const { return std::numeric_limits<double>::infinity(); }
  /// E[xᵀ S⁻¹ x]; covariance() = shape · second_moment_s() / n.
  virtual double second_moment_s() const = 0;

  double pdf(const VecRef& x) const override { return profile(shape_.quad_form(x)); }
  double log_pdf(const VecRef& x) const override { return log_profile(shape_.quad_form(x)); }
  Vec gradient(const VecRef& x) const override;
  Covariance covariance() const override;
  std::pair<Vec, Vec> bounding_box() const override;

 private:
  Covariance shape_;
};

/// If both densities are elliptical with shapes S_a = λ S_b, returns λ.
std::optional<double> shape_ratio(const EllipticalDensity& a, const EllipticalDensity& b);

class GaussianDensity final : public EllipticalDensity {
 public:
  explicit GaussianDensity(Covariance cov);
  double profile(double s) const override;
  double log_profile(double s) const override;
  double profile_derivative(double s) const override { return -0.5 * profile(s); }
  double second_moment_s() const override { return dim(); }
  bool can_sample() const override { return true; }
  void sample(RandomStream& rng, Eigen::Ref<Vec> out) const override;
  std::string describe() const override;

 private:
  double log_norm_;
};

/// Σ_k w_k N(0, c_k S): zero-mean scale mixture of Gaussians sharing a shape.
class ScaleMixtureDensity final : public EllipticalDensity {
 public:
  ScaleMixtureDensity(Covariance shape, std::vector<double> weights, std::vector<double> scales);
  /// Rescales `scales` so the mixture has covariance exactly `cov`.
  static ScaleMixtureDensity matched(const Covariance& cov, std::vector<double> weights,
                                     std::vector<double> scales);

  double profile(double s) const override;
  double profile_derivative(double s) const override;
  double second_moment_s() const override;
  bool can_sample() const override { return true; }
  void sample(RandomStream& rng, Eigen::Ref<Vec> out) const override;
  std::string describe() const override;

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& scales() const { return scales_; }

 private:
  std::vector<double> weights_;
  std::vector<double> scales_;
  std::vector<double> log_norms_;
};

/// Law of λ·X conditioned on XᵀS⁻¹X ≤ s_cut, for an elliptical base X.
class TruncatedEllipticalDensity final : public EllipticalDensity {
 public:
  TruncatedEllipticalDensity(std::shared_ptr<const EllipticalDensity> base, double s_cut, double stretch);

  double profile(double s) const override;
  double profile_derivative(double s) const override;
  double support_s() const override { return s_cut_ * stretch_ * stretch_; }
  double second_moment_s() const override { return second_moment_s_; }
  bool can_sample() const override { return base_->can_sample(); }
  void sample(RandomStream& rng, Eigen::Ref<Vec> out) const override;
  std::string describe() const override;

  /// Mass of the base inside the cut.
  double retained_mass() const noexcept { return mass_; }

 private:
  std::shared_ptr<const EllipticalDensity> base_;
  double s_cut_;
  double stretch_;
  double mass_ = 1.0;
  double second_moment_s_ = 0.0;
};

/// Truncates `base` and stretches the result so its covariance equals
/// base.shape() · target_factor while the support satisfies
/// xᵀS⁻¹x ≤ support_fraction · s_limit.
TruncatedEllipticalDensity truncated_matched(std::shared_ptr<const EllipticalDensity> base, double s_limit,
                                             double support_fraction);

/// One-dimensional Laplace law with the given variance.
class LaplaceDensity final : public EllipticalDensity {
 public:
  explicit LaplaceDensity(double variance);
  double profile(double s) const override;
  double log_profile(double s) const override;
  double profile_derivative(double s) const override;
  double second_moment_s() const override { return 1.0; }
  bool can_sample() const override { return true; }
  void sample(RandomStream& rng, Eigen::Ref<Vec> out) const override;
  std::string describe() const override;

 private:
  double variance_;
};

/// General finite Gaussian mixture Σ_k w_k N(μ_k, Σ_k).
class GaussianMixtureDensity final : public Density {
 public:
  struct Component {
    double weight;
    Vec mean;
    Covariance cov;
  };
  explicit GaussianMixtureDensity(std::vector<Component> components);

  int dim() const override { return components_.front().cov.dim(); }
  double pdf(const VecRef& x) const override;
  double log_pdf(const VecRef& x) const override;
  Vec gradient(const VecRef& x) const override;
  Covariance covariance() const override;
  Vec mean() const;
  bool can_sample() const override { return true; }
  void sample(RandomStream& rng, Eigen::Ref<Vec> out) const override;
  std::string describe() const override;

 private:
  std::vector<Component> components_;
  std::vector<double> log_norms_;
};

/// p(x, y) = p_X(x) p_Y(y) on the product space.
class ProductDensity final : public Density {
 public:
  ProductDensity(DensityPtr x, DensityPtr y);
  int dim() const override { return x_->dim() + y_->dim(); }
  double pdf(const VecRef& z) const override;
  double log_pdf(const VecRef& z) const override;
  Vec gradient(const VecRef& z) const override;
  Covariance covariance() const override;
  bool can_sample() const override { return x_->can_sample() && y_->can_sample(); }
  void sample(RandomStream& rng, Eigen::Ref<Vec> out) const override;
  std::pair<Vec, Vec> bounding_box() const override;
  std::string describe() const override;

 private:
  DensityPtr x_;
  DensityPtr y_;
};

/// Law of T·U with U ~ χ_m independent of T. The density
/// p(y) = ∫ f_m(u) u^{-n} p_T(y/u) du is evaluated per point by quadrature
/// in t = ln u.
class ChiScaledDensity final : public Density {
 public:
  ChiScaledDensity(DensityPtr base, double chi_dof, double rel_tol = 1e-10);

  int dim() const override { return base_->dim(); }
  double pdf(const VecRef& y) const override;
  Covariance covariance() const override;
  bool can_sample() const override { return base_->can_sample(); }
  void sample(RandomStream& rng, Eigen::Ref<Vec> out) const override;
  std::string describe() const override;

 private:
  DensityPtr base_;
  double dof_;
  double rel_tol_;
};

/// Elliptical variant: if T = h_T(xᵀS⁻¹x) then T·U has profile
/// h(s) = ∫ f_m(u) u^{-n} h_T(s/u²) du with the same shape S.
class ChiScaledEllipticalDensity final : public EllipticalDensity {
 public:
  ChiScaledEllipticalDensity(std::shared_ptr<const EllipticalDensity> base, double chi_dof,
                             double rel_tol = 1e-10);

  double profile(double s) const override;
  double second_moment_s() const override { return base_->second_moment_s() * dof_; }
  bool can_sample() const override { return base_->can_sample(); }
  void sample(RandomStream& rng, Eigen::Ref<Vec> out) const override;
  std::string describe() const override;

 private:
  std::shared_ptr<const EllipticalDensity> base_;
  double dof_;
  double rel_tol_;
};

/// ChiScaledEllipticalDensity when `base` is elliptical, else ChiScaledDensity.
DensityPtr chi_scaled(DensityPtr base, double chi_dof, double rel_tol = 1e-10);

/// ∫_0^∞ f_m(u) u^{-n} g(u) du over u = e^t, where g(u) vanishes for
/// u < u_min (pass 0 when unrestricted).
double chi_mixture_integral(double chi_dof, int n, const std::function<double(double)>& g, double u_min,
                            double rel_tol);

}  // namespace renyi
