#include "renyi/covariance.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace renyi {

Covariance::Covariance(const Mat& c) : c_(c) {
  if (c.rows() == 0 || c.rows() != c.cols()) {
    throw InvalidArgument("covariance must be a non-empty square matrix");
  }
  if (!c.allFinite()) {
    throw InvalidArgument("covariance has non-finite entries");
  }
  const double scale = c.cwiseAbs().maxCoeff();
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("covariance is not symmetric");
  }
  c_ = 0.5 * (c + c.transpose());
  Eigen::LLT<Mat> llt(c_);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("covariance is not positive definite");
  }
  l_ = llt.matrixL();
  for (Eigen::Index i = 0; i < l_.rows(); ++i) {
    if (!(l_(i, i) > 0.0)) throw InvalidArgument("covariance is not positive definite");
    log_det_ += 2.0 * std::log(l_(i, i));
  }
}

Covariance Covariance::identity(int n) { return Covariance(Mat::Identity(n, n)); }

Covariance Covariance::diagonal(const Vec& d) { return Covariance(Mat(d.asDiagonal())); }

double Covariance::det() const { return std::exp(log_det_); }

Mat Covariance::inverse() const {
  Mat inv = Mat::Identity(dim(), dim());
  l_.triangularView<Eigen::Lower>().solveInPlace(inv);
  l_.transpose().triangularView<Eigen::Upper>().solveInPlace(inv);
  return 0.5 * (inv + inv.transpose());
}

double Covariance::quad_form(const VecRef& x) const {
  const int n = dim();
  if (x.size() != n) throw InvalidArgument("quad_form: dimension mismatch");
  // Forward substitution without allocating for the usual small n.
  std::array<double, 8> small{};
  std::vector<double> large;
  double* z = small.data();
  if (n > 8) {
    large.resize(n);
    z = large.data();
  }
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = x[i];
    for (int j = 0; j < i; ++j) v -= l_(i, j) * z[j];
    z[i] = v / l_(i, i);
    sum += z[i] * z[i];
  }
  return sum;
}

Vec Covariance::solve(const VecRef& x) const { return Eigen::LLT<Mat>(c_).solve(x); }

Vec Covariance::whiten(const VecRef& x) const { return l_.triangularView<Eigen::Lower>().solve(x); }

Covariance Covariance::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("covariance scale factor must be positive");
  return Covariance(c_ * factor);
}

Covariance Covariance::operator+(const Covariance& other) const {
  if (other.dim() != dim()) throw InvalidArgument("covariance dimension mismatch");
  return Covariance(c_ + other.c_);
}

bool Covariance::same_as(const Covariance& other, double rel_tol) const {
  if (other.dim() != dim()) return false;
  return (c_ - other.c_).cwiseAbs().maxCoeff() <= rel_tol * c_.cwiseAbs().maxCoeff();
}

Covariance parse_covariance_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw InvalidArgument("covariance CSV: cannot parse '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t\r", used) != std::string::npos) {
        throw InvalidArgument("covariance CSV: trailing characters in '" + cell + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw InvalidArgument("covariance CSV is empty");
  Mat c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw InvalidArgument("covariance CSV: expected " + std::to_string(n) + " entries on line " +
                            std::to_string(i + 1));
    }
    for (std::size_t j = 0; j < n; ++j) c(i, j) = rows[i][j];
  }
  return Covariance(c);
}

Covariance read_covariance_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open covariance file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_covariance_csv(buffer.str());
}

}  // namespace renyi
