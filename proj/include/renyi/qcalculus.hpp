#pragma once

#include <string>

#include "renyi/density.hpp"
#include "renyi/maximizer.hpp"
#include "renyi/report.hpp"

namespace renyi {

/// Which exponent to use for the self-similar family f_τ = g_{q, τ^μ C}.
///   Proof:     μ = 2/(2 + n(q-1)), the value that makes the heat equation
///              hold for every τ.
///   Statement: μ = 2/(2 + n(q-1)/2), kept to demonstrate that it fails.
enum class MuVariant { Proof, Statement };
double heat_mu(double q, int n, MuVariant variant = MuVariant::Proof);

struct HeatFamily {
  double q = 2.0;
  int n = 1;
  Covariance base_cov = Covariance::identity(1);
  double mu = 0.0;
  double tau = 1.0;

  static HeatFamily make(double q, const Covariance& base, double tau, MuVariant v = MuVariant::Proof);
  MaximizerParams params_at(double t) const;
};

/// K_q = A_q^{q-1} · 2q(2 + n(q-1)) / (2q + n(q-1)) with A_q the
/// normalising constant for the base covariance.
double kq_constant(double q, int n, double norm_const);
double kq_constant(const MaximizerParams& base);

struct HeatGrid {
  int points_per_axis = 201;   // 1-D; 2-D grids use points_per_axis / 5
  double support_fraction = 0.95;  // q > 1: fraction of the support radius
  double extent_sd = 4.0;      // q < 1: half-width in units of √(diag C_τ)
  double h_rel = 1e-3;         // spatial step relative to the radius / sd
  double dtau_rel = 1e-4;      // time step relative to τ
  double floor_fraction = 1e-2;  // floor on the denominator, relative to the grid maximum
};

struct HeatResidual {
  double q = 0.0;
  int n = 0;
  double tau = 0.0;
  double mu = 0.0;
  double max_rel_residual = 0.0;
  double mean_rel_residual = 0.0;
  std::size_t points = 0;
  Json grid_spec;

  Json to_json() const;
};

/// |K_q ∂_τ f - Σ C_kl ∂_k∂_l f^q| / max(|K_q ∂_τ f|, floor) over the grid,
/// by central differences of the analytic density.
HeatResidual heat_residual(const HeatFamily& family, const HeatGrid& grid = {});

/// ρ_q(x) = ∇p(x) / p(x)^{2-q}. DomainError where p(x) = 0.
Vec q_score(const Density& p, double q, const VecRef& x);

struct FisherResult {
  Mat matrix;          // J_q(p)
  Mat numerator;       // ∫ p^{2q-3} ∇p ∇pᵀ
  double power_integral = 0.0;  // ∫ p^q
  std::string method;  // "quadrature-radial" or "quadrature-box"
};

/// J_q(p) = ∫ p ρ_q ρ_qᵀ / ∫ p^q by quadrature (n ≤ 3; one radial integral
/// for elliptical p). Throws DivergenceError if an integral appears divergent.
FisherResult q_fisher(const Density& p, double q, double rel_tol = 1e-10);

struct CramerRaoGap {
  Mat gap;  // J_q(p) - (∫p^q / q²) C⁻¹
  double min_eigenvalue = 0.0;
  bool psd = false;  // min eigenvalue ≥ -1e-8
  FisherResult fisher;
};

CramerRaoGap cramer_rao_gap(const Density& p, double q, double rel_tol = 1e-10);

/// The constant in front of tr(C J_q) on the right of the de Bruijn
/// identity: Stated is q(q-1), Corrected is q² (the derivative of ∫f^q
/// carries a factor q, not q-1).
enum class DebruijnConstant { Stated, Corrected };
double debruijn_factor(double q, DebruijnConstant c);

/// dH_q(f_τ)/dτ by central difference against K_q⁻¹ c tr(C J_q(f_τ)).
/// tolerance is relative to the right-hand side.
VerificationReport debruijn_verify(const HeatFamily& family, double rel_tolerance, double dtau_rel = 1e-4,
                                   DebruijnConstant c = DebruijnConstant::Corrected);

/// α_q(X) = ∫p_X^{2q-1} / ∫p_X^q.
double extensivity_alpha(const Density& p, double q, double rel_tol = 1e-11);

/// Joint J_q of the product p_X p_Y (box quadrature, n_X + n_Y ≤ 3) against
/// blockdiag(α_q(Y) J_q(X), α_q(X) J_q(Y)).
VerificationReport extensivity_verify(const DensityPtr& px, const DensityPtr& py, double q, double block_tol,
                                      double offdiag_tol);

}  // namespace renyi
