#include "renyi/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "renyi/quadrature.hpp"
#include "renyi/specfun.hpp"

namespace renyi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gaussian_log_norm(int n, double log_det) {
  return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;
}

void fill_normal(RandomStream& rng, Eigen::Ref<Vec> out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.normal();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- Density

double Density::log_pdf(const VecRef& x) const {
  const double p = pdf(x);
  return p > 0.0 ? std::log(p) : -kInf;
}

Vec Density::gradient(const VecRef& x) const {
  const Mat cov = covariance().matrix();
  Vec g(x.size());
  Vec xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * std::sqrt(cov(i, i));
    xp[i] = x[i] + h;
    const double up = pdf(xp);
    xp[i] = x[i] - h;
    const double down = pdf(xp);
    xp[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

void Density::sample(RandomStream&, Eigen::Ref<Vec>) const {
  throw std::logic_error("density '" + describe() + "' has no sampler");
}

std::pair<Vec, Vec> Density::bounding_box() const {
  return {Vec::Constant(dim(), -kInf), Vec::Constant(dim(), kInf)};
}

// ------------------------------------------------------- EllipticalDensity

double EllipticalDensity::log_profile(double s) const {
  const double h = profile(s);
  return h > 0.0 ? std::log(h) : -kInf;
}

double EllipticalDensity::profile_derivative(double s) const {
  const double h = 1e-6 * std::max(s, 1e-3);
  const double lo = std::max(0.0, s - h);
  const double hi = s + h;
  return (profile(hi) - profile(lo)) / (hi - lo);
}

Vec EllipticalDensity::gradient(const VecRef& x) const {
  const double s = shape_.quad_form(x);
  if (s == 0.0) return Vec::Zero(x.size());
  if (s >= support_s()) return Vec::Zero(x.size());
  return 2.0 * profile_derivative(s) * shape_.solve(x);
}

Covariance EllipticalDensity::covariance() const { return shape_.scaled(second_moment_s() / dim()); }

std::pair<Vec, Vec> EllipticalDensity::bounding_box() const {
  const double s_max = support_s();
  if (!std::isfinite(s_max)) return Density::bounding_box();
  Vec half = (shape_.matrix().diagonal() * s_max).cwiseSqrt();
  return {-half, half};
}

std::optional<double> shape_ratio(const EllipticalDensity& a, const EllipticalDensity& b) {
  if (a.dim() != b.dim()) return std::nullopt;
  const Mat& sa = a.shape().matrix();
  const Mat& sb = b.shape().matrix();
  const double lambda = sa.trace() / sb.trace();
  if ((sa - lambda * sb).cwiseAbs().maxCoeff() > 1e-10 * sa.cwiseAbs().maxCoeff()) return std::nullopt;
  return lambda;
}

// --------------------------------------------------------- GaussianDensity

GaussianDensity::GaussianDensity(Covariance cov)
    : EllipticalDensity(std::move(cov)), log_norm_(gaussian_log_norm(dim(), shape().log_det())) {}

double GaussianDensity::profile(double s) const { return std::exp(log_norm_ - 0.5 * s); }

double GaussianDensity::log_profile(double s) const { return log_norm_ - 0.5 * s; }

void GaussianDensity::sample(RandomStream& rng, Eigen::Ref<Vec> out) const {
  Vec z(dim());
  fill_normal(rng, z);
  out = shape().chol() * z;
}

std::string GaussianDensity::describe() const { return "gaussian(n=" + std::to_string(dim()) + ")"; }

// ----------------------------------------------------- ScaleMixtureDensity

ScaleMixtureDensity::ScaleMixtureDensity(Covariance shape, std::vector<double> weights, std::vector<double> scales)
    : EllipticalDensity(std::move(shape)), weights_(std::move(weights)), scales_(std::move(scales)) {
  if (weights_.empty() || weights_.size() != scales_.size()) {
    throw InvalidArgument("scale mixture: weights and scales must be non-empty and of equal length");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] >= 0.0) || !(scales_[k] > 0.0)) {
      throw InvalidArgument("scale mixture: weights must be >= 0 and scales > 0");
    }
    total += weights_[k];
  }
  if (!(total > 0.0)) throw InvalidArgument("scale mixture: weights sum to zero");
  for (auto& w : weights_) w /= total;
  const int n = dim();
  for (double c : scales_) log_norms_.push_back(gaussian_log_norm(n, this->shape().log_det() + n * std::log(c)));
}

ScaleMixtureDensity ScaleMixtureDensity::matched(const Covariance& cov, std::vector<double> weights,
                                                 std::vector<double> scales) {
  const double w_total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double mean_scale = 0.0;
  for (std::size_t k = 0; k < std::min(weights.size(), scales.size()); ++k) mean_scale += weights[k] * scales[k];
  mean_scale /= w_total;
  for (auto& c : scales) c /= mean_scale;
  return ScaleMixtureDensity(cov, std::move(weights), std::move(scales));
}

double ScaleMixtureDensity::profile(double s) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) sum += weights_[k] * std::exp(log_norms_[k] - 0.5 * s / scales_[k]);
  return sum;
}

double ScaleMixtureDensity::profile_derivative(double s) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    sum -= weights_[k] * std::exp(log_norms_[k] - 0.5 * s / scales_[k]) * 0.5 / scales_[k];
  }
  return sum;
}

double ScaleMixtureDensity::second_moment_s() const {
  double m = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) m += weights_[k] * scales_[k];
  return m * dim();
}

void ScaleMixtureDensity::sample(RandomStream& rng, Eigen::Ref<Vec> out) const {
  const double u = rng.uniform();
  std::size_t k = 0;
  double acc = weights_[0];
  while (u > acc && k + 1 < weights_.size()) acc += weights_[++k];
  Vec z(dim());
  fill_normal(rng, z);
  out = std::sqrt(scales_[k]) * (shape().chol() * z);
}

std::string ScaleMixtureDensity::describe() const {
  std::string s = "scale-mixture(n=" + std::to_string(dim()) + ";";
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    s += (k ? "," : "") + fmt(weights_[k]) + "@" + fmt(scales_[k]);
  }
  return s + ")";
}

// ---------------------------------------------- TruncatedEllipticalDensity

TruncatedEllipticalDensity::TruncatedEllipticalDensity(std::shared_ptr<const EllipticalDensity> base, double s_cut,
                                                       double stretch)
    : EllipticalDensity(base->shape()), base_(std::move(base)), s_cut_(s_cut), stretch_(stretch) {
  if (!(s_cut_ > 0.0) || !(stretch_ > 0.0)) throw InvalidArgument("truncation: s_cut and stretch must be positive");
  const int n = dim();
  const double ld = shape().log_det();
  const double upper = std::min(s_cut_, base_->support_s());
  mass_ = integrate_radial(n, ld, [&](double s) { return base_->profile(s); }, upper, 1e-12).value;
  const double ms = integrate_radial(n, ld, [&](double s) { return s * base_->profile(s); }, upper, 1e-12).value;
  second_moment_s_ = stretch_ * stretch_ * ms / mass_;
}

double TruncatedEllipticalDensity::profile(double s) const {
  if (s > support_s()) return 0.0;
  const double l2 = stretch_ * stretch_;
  return base_->profile(s / l2) / (std::pow(stretch_, dim()) * mass_);
}

double TruncatedEllipticalDensity::profile_derivative(double s) const {
  if (s > support_s()) return 0.0;
  const double l2 = stretch_ * stretch_;
  return base_->profile_derivative(s / l2) / (l2 * std::pow(stretch_, dim()) * mass_);
}

void TruncatedEllipticalDensity::sample(RandomStream& rng, Eigen::Ref<Vec> out) const {
  Vec x(dim());
  for (;;) {
    base_->sample(rng, x);
    if (shape().quad_form(x) <= s_cut_) break;
  }
  out = stretch_ * x;
}

std::string TruncatedEllipticalDensity::describe() const {
  return "truncated(" + base_->describe() + ";s_cut=" + fmt(s_cut_) + ",stretch=" + fmt(stretch_) + ")";
}

TruncatedEllipticalDensity truncated_matched(std::shared_ptr<const EllipticalDensity> base, double s_limit,
                                             double support_fraction) {
  const int n = base->dim();
  const double target = support_fraction * s_limit;
  // With stretch² = target / c the truncated law has E[s] = target · r(c),
  // r(c) = E[s | s ≤ c] / c, which falls from n/(n+2) to 0 as c grows.
  const double wanted = base->second_moment_s() / target;
  if (!(wanted < n / (n + 2.0))) {
    throw InvalidArgument("truncated_matched: support too small to hold the requested covariance");
  }
  const double ld = base->shape().log_det();
  auto ratio = [&](double c) {
    const double mass = integrate_radial(n, ld, [&](double s) { return base->profile(s); }, c, 1e-12).value;
    const double ms = integrate_radial(n, ld, [&](double s) { return s * base->profile(s); }, c, 1e-12).value;
    return ms / (mass * c);
  };
  double lo = std::log(1e-6), hi = std::log(1e6);
  if (std::isfinite(base->support_s())) hi = std::log(base->support_s());
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ratio(std::exp(mid)) > wanted ? lo : hi) = mid;
  }
  const double c = std::exp(0.5 * (lo + hi));
  return TruncatedEllipticalDensity(std::move(base), c, std::sqrt(target / c));
}

// ---------------------------------------------------------- LaplaceDensity

LaplaceDensity::LaplaceDensity(double variance)
    : EllipticalDensity(Covariance::scalar(variance)), variance_(variance) {}

double LaplaceDensity::profile(double s) const { return std::exp(log_profile(s)); }

double LaplaceDensity::log_profile(double s) const {
  const double b = std::sqrt(0.5 * variance_);
  return -std::sqrt(2.0 * s) - std::log(2.0 * b);
}

double LaplaceDensity::profile_derivative(double s) const {
  if (s <= 0.0) return -kInf;
  return -profile(s) / std::sqrt(2.0 * s);
}

void LaplaceDensity::sample(RandomStream& rng, Eigen::Ref<Vec> out) const {
  const double b = std::sqrt(0.5 * variance_);
  const double e = -b * std::log(rng.uniform());
  out[0] = rng.uniform() < 0.5 ? -e : e;
}

std::string LaplaceDensity::describe() const { return "laplace(var=" + fmt(variance_) + ")"; }

// -------------------------------------------------- GaussianMixtureDensity

GaussianMixtureDensity::GaussianMixtureDensity(std::vector<Component> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("gaussian mixture needs at least one component");
  const int n = components_.front().cov.dim();
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.cov.dim() != n || c.mean.size() != n) throw InvalidArgument("gaussian mixture: dimension mismatch");
    if (!(c.weight >= 0.0)) throw InvalidArgument("gaussian mixture: negative weight");
    total += c.weight;
  }
  if (!(total > 0.0)) throw InvalidArgument("gaussian mixture: weights sum to zero");
  for (auto& c : components_) {
    c.weight /= total;
    log_norms_.push_back(gaussian_log_norm(n, c.cov.log_det()));
  }
}

double GaussianMixtureDensity::pdf(const VecRef& x) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    sum += c.weight * std::exp(log_norms_[k] - 0.5 * c.cov.quad_form(x - c.mean));
  }
  return sum;
}

double GaussianMixtureDensity::log_pdf(const VecRef& x) const {
  std::vector<double> terms;
  terms.reserve(components_.size());
  double top = -kInf;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    if (c.weight == 0.0) continue;
    terms.push_back(std::log(c.weight) + log_norms_[k] - 0.5 * c.cov.quad_form(x - c.mean));
    top = std::max(top, terms.back());
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum);
}

Vec GaussianMixtureDensity::gradient(const VecRef& x) const {
  Vec g = Vec::Zero(x.size());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    const Vec d = x - c.mean;
    g -= c.weight * std::exp(log_norms_[k] - 0.5 * c.cov.quad_form(d)) * c.cov.solve(d);
  }
  return g;
}

Vec GaussianMixtureDensity::mean() const {
  Vec m = Vec::Zero(dim());
  for (const auto& c : components_) m += c.weight * c.mean;
  return m;
}

Covariance GaussianMixtureDensity::covariance() const {
  const Vec mu = mean();
  Mat second = Mat::Zero(dim(), dim());
  for (const auto& c : components_) second += c.weight * (c.cov.matrix() + c.mean * c.mean.transpose());
  return Covariance(second - mu * mu.transpose());
}

void GaussianMixtureDensity::sample(RandomStream& rng, Eigen::Ref<Vec> out) const {
  const double u = rng.uniform();
  std::size_t k = 0;
  double acc = components_[0].weight;
  while (u > acc && k + 1 < components_.size()) acc += components_[++k].weight;
  Vec z(dim());
  fill_normal(rng, z);
  out = components_[k].mean + components_[k].cov.chol() * z;
}

std::string GaussianMixtureDensity::describe() const {
  return "gaussian-mixture(n=" + std::to_string(dim()) + ",k=" + std::to_string(components_.size()) + ")";
}

// ---------------------------------------------------------- ProductDensity

ProductDensity::ProductDensity(DensityPtr x, DensityPtr y) : x_(std::move(x)), y_(std::move(y)) {
  if (!x_ || !y_) throw InvalidArgument("product density: null factor");
}

double ProductDensity::pdf(const VecRef& z) const {
  const int nx = x_->dim();
  return x_->pdf(z.head(nx)) * y_->pdf(z.tail(y_->dim()));
}

double ProductDensity::log_pdf(const VecRef& z) const {
  const int nx = x_->dim();
  return x_->log_pdf(z.head(nx)) + y_->log_pdf(z.tail(y_->dim()));
}

Vec ProductDensity::gradient(const VecRef& z) const {
  const int nx = x_->dim(), ny = y_->dim();
  const Vec zx = z.head(nx), zy = z.tail(ny);
  Vec g(nx + ny);
  g.head(nx) = x_->gradient(zx) * y_->pdf(zy);
  g.tail(ny) = y_->gradient(zy) * x_->pdf(zx);
  return g;
}

Covariance ProductDensity::covariance() const {
  const int nx = x_->dim(), ny = y_->dim();
  Mat c = Mat::Zero(nx + ny, nx + ny);
  c.topLeftCorner(nx, nx) = x_->covariance().matrix();
  c.bottomRightCorner(ny, ny) = y_->covariance().matrix();
  return Covariance(c);
}

void ProductDensity::sample(RandomStream& rng, Eigen::Ref<Vec> out) const {
  Vec a(x_->dim()), b(y_->dim());
  x_->sample(rng, a);
  y_->sample(rng, b);
  out << a, b;
}

std::pair<Vec, Vec> ProductDensity::bounding_box() const {
  auto [xl, xh] = x_->bounding_box();
  auto [yl, yh] = y_->bounding_box();
  Vec lo(dim()), hi(dim());
  lo << xl, yl;
  hi << xh, yh;
  return {lo, hi};
}

std::string ProductDensity::describe() const { return "product(" + x_->describe() + "," + y_->describe() + ")"; }

// ------------------------------------------------------------- χ scaling

double chi_mixture_integral(double chi_dof, int n, const std::function<double(double)>& g, double u_min,
                            double rel_tol) {
  const double k = chi_dof - n;
  if (!(k > 0.0)) throw InvalidArgument("chi mixture: degrees of freedom must exceed the dimension");
  const ChiParams chi(chi_dof);
  // In t = ln u the weight f_m(u) u^{1-n} is exp(log_norm + k t - e^{2t}/2),
  // peaked at u² = k. Beyond the cut-offs it is below e^{-60} of the peak.
  const double t_peak = 0.5 * std::log(k);
  auto log_w = [&](double t) { return k * (t - t_peak) - 0.5 * (std::exp(2.0 * t) - k); };
  double t_lo = t_peak - 60.0 / k;
  double t_hi = t_peak + 1.0;
  while (log_w(t_hi) > -60.0) t_hi += 0.25;
  if (u_min > 0.0) t_lo = std::max(t_lo, std::log(u_min));
  if (t_lo >= t_hi) return 0.0;
  const double log_scale = chi.log_norm() + k * t_peak - 0.5 * k;
  auto integrand = [&](double t) {
    const double v = g(std::exp(t));
    return v == 0.0 ? 0.0 : v * std::exp(log_w(t));
  };
  const auto r = integrate(integrand, t_lo, t_hi, rel_tol);
  if (!std::isfinite(r.value)) throw QuadratureError("chi mixture: non-finite quadrature");
  return r.value * std::exp(log_scale);
}

ChiScaledDensity::ChiScaledDensity(DensityPtr base, double chi_dof, double rel_tol)
    : base_(std::move(base)), dof_(chi_dof), rel_tol_(rel_tol) {}

double ChiScaledDensity::pdf(const VecRef& y) const {
  const int n = dim();
  Vec z(n);
  return chi_mixture_integral(
      dof_, n,
      [&](double u) {
        z = y / u;
        return base_->pdf(z);
      },
      0.0, rel_tol_);
}

Covariance ChiScaledDensity::covariance() const { return base_->covariance().scaled(dof_); }

void ChiScaledDensity::sample(RandomStream& rng, Eigen::Ref<Vec> out) const {
  base_->sample(rng, out);
  out *= chi_sample(ChiParams(dof_), rng);
}

std::string ChiScaledDensity::describe() const { return base_->describe() + "*chi(" + fmt(dof_) + ")"; }

ChiScaledEllipticalDensity::ChiScaledEllipticalDensity(std::shared_ptr<const EllipticalDensity> base,
                                                       double chi_dof, double rel_tol)
    : EllipticalDensity(base->shape()), base_(std::move(base)), dof_(chi_dof), rel_tol_(rel_tol) {}

double ChiScaledEllipticalDensity::profile(double s) const {
  const double s_max = base_->support_s();
  const double u_min = std::isfinite(s_max) ? std::sqrt(s / s_max) : 0.0;
  return chi_mixture_integral(dof_, dim(), [&](double u) { return base_->profile(s / (u * u)); }, u_min, rel_tol_);
}

void ChiScaledEllipticalDensity::sample(RandomStream& rng, Eigen::Ref<Vec> out) const {
  base_->sample(rng, out);
  out *= chi_sample(ChiParams(dof_), rng);
}

std::string ChiScaledEllipticalDensity::describe() const {
  return base_->describe() + "*chi(" + fmt(dof_) + ")";
}

DensityPtr chi_scaled(DensityPtr base, double chi_dof, double rel_tol) {
  if (auto e = std::dynamic_pointer_cast<const EllipticalDensity>(base)) {
    return std::make_shared<ChiScaledEllipticalDensity>(std::move(e), chi_dof, rel_tol);
  }
  return std::make_shared<ChiScaledDensity>(std::move(base), chi_dof, rel_tol);
}

}  // namespace renyi
