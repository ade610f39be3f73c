#include "renyi/maximizer.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "renyi/sampling.hpp"
#include "renyi/specfun.hpp"

namespace renyi {

void QIndex::validate() const {
  if (n < 1) throw DomainError("dimension n must be at least 1");
  if (!std::isfinite(q) || !(q > n / (n + 2.0))) {
    std::ostringstream os;
    os << "q must exceed n/(n+2) = " << n / (n + 2.0) << " (got q = " << q << ")";
    throw DomainError(os.str());
  }
}

double maximizer_dof(const QIndex& idx) {
  if (idx.q > 1.0) return idx.n + 2.0 * idx.q / (idx.q - 1.0);
  if (idx.q < 1.0) return 2.0 / (1.0 - idx.q) - idx.n;
  return std::numeric_limits<double>::infinity();
}

double index_from_dof(double m, int n, bool bounded_branch) {
  if (bounded_branch) {
    // m - n = 2q/(q-1)  =>  q = (m-n)/(m-n-2)
    const double k = m - n;
    if (!(k > 2.0)) throw DomainError("no bounded-branch index for these degrees of freedom");
    return k / (k - 2.0);
  }
  return 1.0 - 2.0 / (m + n);
}

MaximizerParams make_params(const QIndex& idx, const Covariance& cov) {
  idx.validate();
  if (cov.dim() != idx.n) throw InvalidArgument("covariance dimension does not match n");
  MaximizerParams p{idx, cov};
  const double q = idx.q;
  const double half_n = 0.5 * idx.n;
  const double log_pi = std::log(std::numbers::pi);
  p.dof = maximizer_dof(idx);
  if (idx.gaussian()) {
    p.beta = 0.5;
    p.log_norm_const = -half_n * std::log(2.0 * std::numbers::pi) - 0.5 * cov.log_det();
  } else {
    p.beta = 1.0 / (2.0 * q - idx.n * (1.0 - q));
    if (q > 1.0) {
      const double a = q / (q - 1.0);
      p.log_norm_const = log_gamma(a + half_n) + half_n * std::log(p.beta * (q - 1.0)) - log_gamma(a) -
                         half_n * log_pi - 0.5 * cov.log_det();
    } else {
      const double a = 1.0 / (1.0 - q);
      p.log_norm_const = log_gamma(a) + half_n * std::log(p.beta * (1.0 - q)) - log_gamma(a - half_n) -
                         half_n * log_pi - 0.5 * cov.log_det();
    }
  }
  p.norm_const = std::exp(p.log_norm_const);
  return p;
}

double maximizer_profile(const MaximizerParams& p, double s) {
  if (p.gaussian()) return std::exp(p.log_norm_const - 0.5 * s);
  const double q = p.q();
  const double base = 1.0 - (q - 1.0) * p.beta * std::max(s, 0.0);
  if (base <= 0.0) return 0.0;
  return std::exp(p.log_norm_const + std::log(base) / (q - 1.0));
}

double density(const MaximizerParams& p, const VecRef& x) { return maximizer_profile(p, p.cov.quad_form(x)); }

double log_density(const MaximizerParams& p, const VecRef& x) {
  const double s = p.cov.quad_form(x);
  if (p.gaussian()) return p.log_norm_const - 0.5 * s;
  const double base = 1.0 - (p.q() - 1.0) * p.beta * s;
  if (base <= 0.0) return -std::numeric_limits<double>::infinity();
  return p.log_norm_const + std::log(base) / (p.q() - 1.0);
}

double support_s(const MaximizerParams& p) {
  return p.bounded() ? p.dof : std::numeric_limits<double>::infinity();
}

bool support_contains(const MaximizerParams& p, const VecRef& x) {
  if (!p.bounded()) return true;
  return p.cov.quad_form(x) <= p.dof;
}

double shannon_entropy(const MaximizerParams& p) {
  if (p.bounded()) throw DomainError("no closed-form Shannon entropy for q > 1; use the Monte Carlo estimate");
  if (p.gaussian()) {
    return 0.5 * (p.n() * std::log(2.0 * std::numbers::pi * std::numbers::e) + p.cov.log_det());
  }
  const double a = 1.0 / (1.0 - p.q());
  return -p.log_norm_const + a * (digamma(a) - digamma(a - 0.5 * p.n()));
}

double power_integral(const MaximizerParams& p) {
  return std::exp((p.q() - 1.0) * p.log_norm_const + std::log(2.0 * p.q() * p.beta));
}

double renyi_entropy(const MaximizerParams& p) {
  if (p.gaussian()) return shannon_entropy(p);
  const double log_power = (p.q() - 1.0) * p.log_norm_const + std::log(2.0 * p.q() * p.beta);
  return log_power / (1.0 - p.q());
}

MaximizerParams marginal(const MaximizerParams& p, const std::vector<int>& coords) {
  const int k = static_cast<int>(coords.size());
  if (k == 0 || k > p.n()) throw InvalidArgument("marginal: invalid coordinate selection");
  Mat block(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (coords[i] < 0 || coords[i] >= p.n()) throw InvalidArgument("marginal: coordinate out of range");
      block(i, j) = p.cov.matrix()(coords[i], coords[j]);
    }
  }
  const double q = p.gaussian() ? 1.0 : index_from_dof(p.dof, k, p.bounded());
  return make_params(QIndex{q, k}, Covariance(block));
}

MaximizerDensity::MaximizerDensity(MaximizerParams params)
    : EllipticalDensity(params.cov), params_(std::move(params)) {}

double MaximizerDensity::log_profile(double s) const {
  if (params_.gaussian()) return params_.log_norm_const - 0.5 * s;
  const double base = 1.0 - (params_.q() - 1.0) * params_.beta * s;
  if (base <= 0.0) return -std::numeric_limits<double>::infinity();
  return params_.log_norm_const + std::log(base) / (params_.q() - 1.0);
}

double MaximizerDensity::profile_derivative(double s) const {
  if (params_.gaussian()) return -0.5 * profile(s);
  const double q = params_.q();
  const double base = 1.0 - (q - 1.0) * params_.beta * s;
  if (base <= 0.0) return 0.0;
  // h' = -β A base^{(2-q)/(q-1)}
  return -params_.beta * std::exp(params_.log_norm_const + std::log(base) * (2.0 - q) / (q - 1.0));
}

void MaximizerDensity::sample(RandomStream& rng, Eigen::Ref<Vec> out) const { draw_maximizer(params_, rng, out); }

std::string MaximizerDensity::describe() const {
  std::ostringstream os;
  os << "maximizer(q=" << params_.q() << ",n=" << params_.n() << ")";
  return os.str();
}

}  // namespace renyi
