#pragma once

#include <functional>
#include <vector>

#include "renyi/covariance.hpp"
#include "renyi/sampling.hpp"

namespace renyi {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanEstimate mean_estimate(const std::vector<double>& values);

/// Mean-subtracted sample covariance and the standard error of each entry
/// (standard deviation of the centred products over √N).
struct SampleMoments {
  Vec mean;
  Mat cov;
  Mat cov_se;
};

SampleMoments sample_moments(const RowMat& data);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
  std::size_t count = 0;
};

/// Asymptotic Kolmogorov tail probability with Stephens' small-sample
/// correction, for the one-sample statistic d at sample size n.
double kolmogorov_p_value(double d, std::size_t n);

/// One-sample KS test given the model CDF at each value of `sorted`.
KsResult ks_test_sorted(const std::vector<double>& sorted, const std::vector<double>& cdf);
KsResult ks_test(std::vector<double> values, const std::function<double(double)>& cdf);

/// KS test against a 1-D density whose CDF is built by quadrature between
/// consecutive sorted sample points, starting from `lower` (may be -inf).
KsResult ks_test_pdf(std::vector<double> values, const std::function<double(double)>& pdf, double lower,
                     double upper);

}  // namespace renyi
