#pragma once

#include <vector>

#include "renyi/covariance.hpp"
#include "renyi/random.hpp"
#include "renyi/sampling.hpp"

namespace renyi {

/// Parameters of a ⋆ (q > 1) or ∘ (q < 1) convolution.
///   q > 1: dof_m = n + 2q/(q-1), dof_v = 2q/(q-1)
///   q < 1: dof_m = 2/(1-q) - n; the inner ⋆ runs at q̃ = m/(m-2),
///          i.e. 1/(q̃-1) = m/2 - 1.
struct ConvolutionSpec {
  double q = 2.0;
  int n = 1;
  Covariance cov_s;
  Covariance cov_t;
  double dof_m = 0.0;
  double dof_v = 0.0;

  Covariance cov_sum() const { return cov_s + cov_t; }
  double inner_q() const;
};

ConvolutionSpec make_convolution_spec(double q, const Covariance& cov_s, const Covariance& cov_t);

/// S ⋆ T row by row: W = U_S s + U_T t, output W / √(Wᵀ(mC)⁻¹W + V²)
/// with C = C_S + C_T and fresh χ draws per row.
SampleBatch star_convolve(const ConvolutionSpec& spec, const SampleBatch& s, const SampleBatch& t,
                          const RandomStream& rng);

/// S ∘ T = Θ⁻¹_{(m-2)C}( Θ_{(m-2)C_S}(S) ⋆_{q̃} Θ_{(m-2)C_T}(T) ).
SampleBatch circle_convolve(const ConvolutionSpec& spec, const SampleBatch& s, const SampleBatch& t,
                            const RandomStream& rng);

/// ⋆ for q > 1, ∘ for q < 1.
SampleBatch convolve(const ConvolutionSpec& spec, const SampleBatch& s, const SampleBatch& t,
                     const RandomStream& rng);

struct LimitProbeRow {
  double q = 0.0;
  double kl = 0.0;
  double std_error = 0.0;
};

/// kNN KL between S ⋆_q T and the plain row sum S + T for each q.
std::vector<LimitProbeRow> gaussian_limit_probe(const std::vector<double>& qs, const SampleBatch& s,
                                                const SampleBatch& t, const Covariance& cov_s,
                                                const Covariance& cov_t, const RandomStream& rng);

/// Row-wise S + T.
SampleBatch row_sum(const SampleBatch& s, const SampleBatch& t);

}  // namespace renyi
