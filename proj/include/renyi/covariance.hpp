#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include "renyi/errors.hpp"

namespace renyi {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;

/// Symmetric positive-definite matrix with its Cholesky factor cached.
class Covariance {
 public:
  /// Throws InvalidArgument unless `c` is square, symmetric within 1e-12
  /// relative, and positive definite.
  explicit Covariance(const Mat& c);

  static Covariance identity(int n);
  static Covariance diagonal(const Vec& d);
  static Covariance scalar(double variance) { return diagonal(Vec::Constant(1, variance)); }

  int dim() const noexcept { return static_cast<int>(c_.rows()); }
  const Mat& matrix() const noexcept { return c_; }
  /// Lower-triangular L with L Lᵀ = C.
  const Mat& chol() const noexcept { return l_; }
  double log_det() const noexcept { return log_det_; }
  double det() const;
  Mat inverse() const;

  /// xᵀ C⁻¹ x.
  double quad_form(const VecRef& x) const;
  /// C⁻¹ x.
  Vec solve(const VecRef& x) const;
  /// Solves L z = x (whitening).
  Vec whiten(const VecRef& x) const;

  Covariance scaled(double factor) const;
  Covariance operator+(const Covariance& other) const;
  bool same_as(const Covariance& other, double rel_tol = 1e-12) const;

 private:
  Mat c_;
  Mat l_;
  double log_det_ = 0.0;
};

/// Parses a row-major covariance matrix: n lines of n comma-separated reals.
Covariance parse_covariance_csv(const std::string& text);
Covariance read_covariance_csv(const std::filesystem::path& path);

}  // namespace renyi
