#include "renyi/convolve.hpp"

#include <cmath>
#include <sstream>

#include "renyi/divergence.hpp"
#include "renyi/maximizer.hpp"
#include "renyi/parallel.hpp"
#include "renyi/specfun.hpp"

namespace renyi {

double ConvolutionSpec::inner_q() const {
  if (!(q < 1.0)) throw DomainError("inner index is defined for q < 1 only");
  return dof_m / (dof_m - 2.0);
}

ConvolutionSpec make_convolution_spec(double q, const Covariance& cov_s, const Covariance& cov_t) {
  const int n = cov_s.dim();
  if (cov_t.dim() != n) throw InvalidArgument("convolution: covariance dimensions differ");
  QIndex{q, n}.validate();
  if (q == 1.0) throw DomainError("convolution: q = 1 has no ⋆/∘ operation (use plain addition)");
  ConvolutionSpec spec{q, n, cov_s, cov_t};
  spec.dof_m = maximizer_dof({q, n});
  spec.dof_v = q > 1.0 ? 2.0 * q / (q - 1.0) : 0.0;
  return spec;
}

namespace {

void check_pair(const SampleBatch& s, const SampleBatch& t, int n) {
  if (s.dim() != n || t.dim() != n) throw InvalidArgument("convolution: batch dimension does not match n");
  if (s.count() != t.count()) throw InvalidArgument("convolution: batches have different counts");
}

// Core ⋆ with explicit degrees of freedom and scale matrix mC.
RowMat star_rows(const RowMat& s, const RowMat& t, double dof_u, double dof_v, const Covariance& mc,
                 const RandomStream& rng) {
  RowMat out(s.rows(), s.cols());
  const ChiParams chi_u(dof_u), chi_v(dof_v);
  for_each_chunk(static_cast<std::size_t>(s.rows()), kChunkRows, [&](std::size_t chunk, std::size_t lo,
                                                                      std::size_t hi) {
    RandomStream local = rng.substream(chunk);
    for (std::size_t i = lo; i < hi; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const double us = chi_sample(chi_u, local);
      const double ut = chi_sample(chi_u, local);
      const double v = chi_sample(chi_v, local);
      const Vec w = us * s.row(r).transpose() + ut * t.row(r).transpose();
      out.row(r) = (w / std::sqrt(mc.quad_form(w) + v * v)).transpose();
    }
  });
  return out;
}

}  // namespace

SampleBatch star_convolve(const ConvolutionSpec& spec, const SampleBatch& s, const SampleBatch& t,
                          const RandomStream& rng) {
  if (!(spec.q > 1.0)) throw DomainError("star_convolve requires q > 1");
  check_pair(s, t, spec.n);
  SampleBatch out;
  out.data = star_rows(s.data, t.data, spec.dof_m, spec.dof_v, spec.cov_sum().scaled(spec.dof_m), rng);
  out.seed = rng.seed();
  std::ostringstream os;
  os << "star q=" << spec.q << " (" << s.description << ") (" << t.description << ")";
  out.description = os.str();
  return out;
}

SampleBatch circle_convolve(const ConvolutionSpec& spec, const SampleBatch& s, const SampleBatch& t,
                            const RandomStream& rng) {
  if (!(spec.q < 1.0)) throw DomainError("circle_convolve requires q < 1");
  check_pair(s, t, spec.n);
  const int n = spec.n;
  const double m = spec.dof_m;
  const Covariance ds = spec.cov_s.scaled(m - 2.0);
  const Covariance dt = spec.cov_t.scaled(m - 2.0);
  const Covariance d_sum = spec.cov_sum().scaled(m - 2.0);
  // Inner ⋆ at q̃ = m/(m-2): its m̃ = n + m, V has m degrees of freedom and
  // m̃ times the inner covariance sum (m-2)/(m+n)(C_S+C_T) is (m-2)(C_S+C_T).
  RowMat ms(s.count(), n), mt(t.count(), n);
  for (Eigen::Index i = 0; i < s.count(); ++i) {
    ms.row(i) = theta_map(ds, s.data.row(i).transpose()).transpose();
    mt.row(i) = theta_map(dt, t.data.row(i).transpose()).transpose();
  }
  RowMat inner = star_rows(ms, mt, m + n, m, d_sum, rng);
  SampleBatch out;
  out.data.resize(inner.rows(), n);
  for (Eigen::Index i = 0; i < inner.rows(); ++i) {
    out.data.row(i) = theta_inverse(d_sum, inner.row(i).transpose()).transpose();
  }
  out.seed = rng.seed();
  std::ostringstream os;
  os << "circle q=" << spec.q << " (" << s.description << ") (" << t.description << ")";
  out.description = os.str();
  return out;
}

SampleBatch convolve(const ConvolutionSpec& spec, const SampleBatch& s, const SampleBatch& t,
                     const RandomStream& rng) {
  return spec.q > 1.0 ? star_convolve(spec, s, t, rng) : circle_convolve(spec, s, t, rng);
}

SampleBatch row_sum(const SampleBatch& s, const SampleBatch& t) {
  if (s.dim() != t.dim() || s.count() != t.count()) throw InvalidArgument("row_sum: batch shapes differ");
  SampleBatch out;
  out.data = s.data + t.data;
  out.seed = s.seed;
  out.description = "sum (" + s.description + ") (" + t.description + ")";
  return out;
}

std::vector<LimitProbeRow> gaussian_limit_probe(const std::vector<double>& qs, const SampleBatch& s,
                                                const SampleBatch& t, const Covariance& cov_s,
                                                const Covariance& cov_t, const RandomStream& rng) {
  const SampleBatch sum = row_sum(s, t);
  // ⋆ of row i is close to row i of the sum, so the two halves of the
  // batch are kept apart: ⋆ on the first half against sums of the second.
  const Eigen::Index half = s.count() / 2;
  if (half < 2) throw InvalidArgument("gaussian_limit_probe: batches too small");
  SampleBatch s1, t1, baseline;
  s1.data = s.data.topRows(half);
  t1.data = t.data.topRows(half);
  baseline.data = sum.data.bottomRows(s.count() - half);
  std::vector<LimitProbeRow> rows;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto spec = make_convolution_spec(qs[i], cov_s, cov_t);
    const auto star = star_convolve(spec, s1, t1, rng.substream(i));
    const auto est = kl_knn(star, baseline);
    rows.push_back({qs[i], est.value, est.std_error});
  }
  return rows;
}

}  // namespace renyi
