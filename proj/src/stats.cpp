#include "renyi/stats.hpp"

#include <algorithm>
#include <cmath>

#include "renyi/quadrature.hpp"

namespace renyi {

MeanEstimate mean_estimate(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n == 0) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

SampleMoments sample_moments(const RowMat& data) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (n < 2) throw InvalidArgument("sample_moments: need at least two rows");
  SampleMoments out;
  out.mean = data.colwise().mean().transpose();
  out.cov = Mat::Zero(d, d);
  Mat sq = Mat::Zero(d, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Vec x = data.row(r).transpose() - out.mean;
    const Mat p = x * x.transpose();
    out.cov += p;
    sq += p.cwiseProduct(p);
  }
  const double nn = static_cast<double>(n);
  const Mat mean_p = out.cov / nn;
  out.cov /= nn - 1.0;
  const Mat var_p = (sq / nn - mean_p.cwiseProduct(mean_p)) * (nn / (nn - 1.0));
  out.cov_se = (var_p.cwiseMax(0.0) / nn).cwiseSqrt();
  return out;
}

double kolmogorov_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_test_sorted(const std::vector<double>& sorted, const std::vector<double>& cdf) {
  const std::size_t n = sorted.size();
  if (n == 0 || cdf.size() != n) throw InvalidArgument("ks_test: empty sample or CDF size mismatch");
  double d = 0.0;
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    d = std::max(d, std::max(static_cast<double>(i + 1) / nn - cdf[i], cdf[i] - static_cast<double>(i) / nn));
  }
  return {d, kolmogorov_p_value(d, n), n};
}

KsResult ks_test(std::vector<double> values, const std::function<double(double)>& cdf) {
  std::sort(values.begin(), values.end());
  std::vector<double> f(values.size());
  std::transform(values.begin(), values.end(), f.begin(), cdf);
  return ks_test_sorted(values, f);
}

KsResult ks_test_pdf(std::vector<double> values, const std::function<double(double)>& pdf, double lower,
                     double upper) {
  std::sort(values.begin(), values.end());
  std::vector<double> f(values.size());
  // Accumulate from the side nearer each point's tail to keep relative
  // accuracy in both tails: left half from `lower`, right half from `upper`.
  const std::size_t mid = values.size() / 2;
  double acc = 0.0;
  double prev = lower;
  for (std::size_t i = 0; i < mid; ++i) {
    acc += integrate(pdf, prev, values[i], 1e-12).value;
    f[i] = acc;
    prev = values[i];
  }
  acc = 0.0;
  prev = upper;
  for (std::size_t i = values.size(); i-- > mid;) {
    acc += integrate(pdf, values[i], prev, 1e-12).value;
    f[i] = 1.0 - acc;
    prev = values[i];
  }
  return ks_test_sorted(values, f);
}

}  // namespace renyi
