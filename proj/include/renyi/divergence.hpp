#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "renyi/density.hpp"
#include "renyi/maximizer.hpp"
#include "renyi/random.hpp"
#include "renyi/report.hpp"
#include "renyi/sampling.hpp"

namespace renyi {

enum class EstimateMethod { PluginQuadrature, PluginMc, Knn };
std::string to_string(EstimateMethod m);

struct DivergenceEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 only for deterministic quadrature
  EstimateMethod method = EstimateMethod::PluginQuadrature;
  long long count = 0;     // samples used (0 for quadrature)
};

/// Support mismatch, duplicate points, or a divergent integral.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ∫ F(x) dx for a functional of a density evaluated on the support of
/// `ref`: one radial quadrature when F depends on xᵀS⁻¹x only (elliptical
/// `ref`, `radial` true), nested box quadrature (n ≤ 3) otherwise.
double integrate_functional(const Density& ref, const std::function<double(const VecRef&)>& f, double rel_tol,
                            const char* what);

/// D(f‖g) by quadrature. Radial when both are elliptical with proportional
/// shapes; nested box quadrature otherwise (n ≤ 3).
DivergenceEstimate kl_quadrature(const Density& f, const Density& g, double rel_tol = 1e-10);
/// D(f‖g) as the sample mean of log f - log g over draws from f.
DivergenceEstimate kl_mc(const Density& f, const Density& g, long long count, const RandomStream& rng);
/// Quadrature when n ≤ 2, Monte Carlo otherwise.
DivergenceEstimate kl(const Density& f, const Density& g, const RandomStream& rng, long long count = 200000);

struct KnnOptions {
  int k = 5;
};

/// Two-sample k-nearest-neighbour estimate of D(F‖G) (Wang, Kulkarni and
/// Verdú), after whitening both batches by G's sample covariance:
///   (d/N) Σ log(ν_k(i)/ρ_k(i)) + log(M/(N-1)).
/// The standard error is the jackknife standard error of the mean term.
DivergenceEstimate kl_knn(const SampleBatch& f, const SampleBatch& g, KnnOptions opt = {});

/// One-sample variant against a known reference density:
///   -Ĥ_KL(F) - mean log g(x_i),
/// with the Kozachenko-Leonenko entropy estimate Ĥ_KL.
DivergenceEstimate kl_knn_reference(const SampleBatch& f, const Density& g, KnnOptions opt = {});

/// Relative q-Rényi entropy
///   D_q(f‖g) = log ∫g^{q-1}f/(1-q) + (1-q)/q H_q(g) - H_q(f)/q,
/// with D_1 = D. Quadrature route.
DivergenceEstimate dq_relative(const Density& f, const Density& g, double q, double rel_tol = 1e-10);
/// Monte Carlo route (draws from f; ∫g^q by quadrature), delta-method error.
DivergenceEstimate dq_relative_mc(const Density& f, const Density& g, double q, long long count,
                                  const RandomStream& rng);

/// H_q(p) = log ∫p^q / (1-q) (Shannon entropy at q = 1) by quadrature.
double renyi_entropy_quadrature(const Density& p, double q, double rel_tol = 1e-10);

/// d(T|R_{q,C}) = D(T·U ‖ Z_{mC}), U ~ χ_m, m = n + 2q/(q-1). Plug-in
/// quadrature on the scale-mixture density of T·U.
DivergenceEstimate dist_to_maximizer(const DensityPtr& t, const MaximizerParams& params, double rel_tol = 1e-8);
/// Sample route: kNN estimate of D(T·U ‖ Z_{mC}) from draws of T.
DivergenceEstimate dist_to_maximizer_knn(const SampleBatch& t, const MaximizerParams& params,
                                         const RandomStream& rng, KnnOptions opt = {});

/// Shannon entropy by Monte Carlo: mean of -log p over draws from p.
DivergenceEstimate shannon_entropy_mc(const Density& p, long long count, const RandomStream& rng);

struct EpiOptions {
  long long count = 100000;  // draws of S and T for the ⋆ term
  KnnOptions knn;
  Relation relation = Relation::GreaterEqual;
};

/// Checks |C_S+C_T|^{1/n} e^{-2d(S⋆T)/n} against
/// |C_S|^{1/n} e^{-2d(S)/n} + |C_T|^{1/n} e^{-2d(T)/n} (lhs, rhs). The
/// single-input distances use quadrature; d(S⋆T) uses the kNN route.
VerificationReport epi_verify(const DensityPtr& s, const DensityPtr& t, double q, const RandomStream& rng,
                              const EpiOptions& opt = {});

struct MapgoodOptions {
  long long count = 100000;
  KnnOptions knn;
  Relation relation = Relation::LessEqual;
};

/// lhs = D(M/√(MᵀC⁻¹M + N²)·U ‖ Z_C) by kNN, N ~ χ_{2q/(q-1)},
/// U ~ χ_{2q/(q-1)+n}; rhs = D(M ‖ Z_C) by quadrature.
VerificationReport mapgood_verify(const DensityPtr& m, const Covariance& c, double q, const RandomStream& rng,
                                  const MapgoodOptions& opt = {});

}  // namespace renyi
