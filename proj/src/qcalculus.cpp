#include "renyi/qcalculus.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "renyi/divergence.hpp"
#include "renyi/parallel.hpp"
#include "renyi/quadrature.hpp"

namespace renyi {

double heat_mu(double q, int n, MuVariant variant) {
  const double d = variant == MuVariant::Proof ? n * (q - 1.0) : 0.5 * n * (q - 1.0);
  return 2.0 / (2.0 + d);
}

HeatFamily HeatFamily::make(double q, const Covariance& base, double tau, MuVariant v) {
  if (!(tau > 0.0)) throw InvalidArgument("heat family: tau must be positive");
  QIndex{q, base.dim()}.validate();
  return {q, base.dim(), base, heat_mu(q, base.dim(), v), tau};
}

MaximizerParams HeatFamily::params_at(double t) const {
  return make_params(QIndex{q, n}, base_cov.scaled(std::pow(t, mu)));
}

double kq_constant(double q, int n, double norm_const) {
  const double nq = n * (q - 1.0);
  return std::pow(norm_const, q - 1.0) * 2.0 * q * (2.0 + nq) / (2.0 * q + nq);
}

double kq_constant(const MaximizerParams& base) { return kq_constant(base.q(), base.n(), base.norm_const); }

Json HeatResidual::to_json() const {
  Json j;
  j["q"] = q;
  j["n"] = n;
  j["tau"] = tau;
  j["mu"] = mu;
  j["max_rel_residual"] = max_rel_residual;
  j["mean_rel_residual"] = mean_rel_residual;
  j["grid_spec"] = grid_spec;
  return j;
}

HeatResidual heat_residual(const HeatFamily& family, const HeatGrid& grid) {
  const int n = family.n;
  if (n > 2) throw InvalidArgument("heat_residual: grids are implemented for n <= 2");
  const double q = family.q;
  const double tau = family.tau;
  const double dtau = grid.dtau_rel * tau;
  const MaximizerParams now = family.params_at(tau);
  const MaximizerParams later = family.params_at(tau + dtau);
  const MaximizerParams earlier = family.params_at(tau - dtau);
  const double k = kq_constant(family.params_at(1.0));
  const Mat& c = family.base_cov.matrix();
  const bool bounded = now.bounded();
  const double radius = bounded ? grid.support_fraction * std::sqrt(now.dof) : grid.extent_sd;

  Vec h(n);
  for (int i = 0; i < n; ++i) {
    const double scale = std::sqrt(now.cov.matrix()(i, i));
    h[i] = grid.h_rel * scale * (bounded ? std::sqrt(now.dof) : 1.0);
  }

  // Whitened grid points t, mapped through the Cholesky factor of C_τ.
  std::vector<Vec> points;
  const int per_axis = n == 1 ? grid.points_per_axis : std::max(5, grid.points_per_axis / 5);
  for (int a = 0; a < per_axis; ++a) {
    const double ta = -radius + 2.0 * radius * a / (per_axis - 1);
    if (n == 1) {
      points.push_back(now.cov.chol() * Vec::Constant(1, ta));
      continue;
    }
    for (int b = 0; b < per_axis; ++b) {
      const double tb = -radius + 2.0 * radius * b / (per_axis - 1);
      Vec t(2);
      t << ta, tb;
      if (bounded && t.norm() > radius) continue;
      points.push_back(now.cov.chol() * t);
    }
  }
  for (const auto& x : points) {
    if (!support_contains(now, x)) throw DomainError("heat_residual: grid point outside the support");
  }

  auto fq = [&](const Vec& x) { return std::exp(q * log_density(now, x)); };
  std::vector<double> lhs(points.size()), rhs(points.size());
  for_each_chunk(points.size(), 256, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec& x = points[i];
      lhs[i] = k * (density(later, x) - density(earlier, x)) / (2.0 * dtau);
      const double f0 = fq(x);
      double sum = 0.0;
      for (int a = 0; a < n; ++a) {
        Vec xp = x, xm = x;
        xp[a] += h[a];
        xm[a] -= h[a];
        sum += c(a, a) * (fq(xp) - 2.0 * f0 + fq(xm)) / (h[a] * h[a]);
        for (int b = a + 1; b < n; ++b) {
          Vec pp = x, pm = x, mp = x, mm = x;
          pp[a] += h[a], pp[b] += h[b];
          pm[a] += h[a], pm[b] -= h[b];
          mp[a] -= h[a], mp[b] += h[b];
          mm[a] -= h[a], mm[b] -= h[b];
          sum += 2.0 * c(a, b) * (fq(pp) - fq(pm) - fq(mp) + fq(mm)) / (4.0 * h[a] * h[b]);
        }
      }
      rhs[i] = sum;
    }
  });

  double peak = 0.0;
  for (double v : lhs) peak = std::max(peak, std::abs(v));
  const double floor = grid.floor_fraction * peak;
  HeatResidual out;
  out.q = q;
  out.n = n;
  out.tau = tau;
  out.mu = family.mu;
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = std::abs(lhs[i] - rhs[i]) / std::max(std::abs(lhs[i]), floor);
    out.max_rel_residual = std::max(out.max_rel_residual, r);
    total += r;
  }
  out.points = points.size();
  out.mean_rel_residual = total / static_cast<double>(points.size());
  out.grid_spec = {{"points", points.size()},
                   {"points_per_axis", per_axis},
                   {"whitened_radius", radius},
                   {"h", std::vector<double>(h.data(), h.data() + n)},
                   {"dtau", dtau},
                   {"floor", floor},
                   {"K_q", k}};
  return out;
}

Vec q_score(const Density& p, double q, const VecRef& x) {
  const double px = p.pdf(x);
  if (!(px > 0.0)) throw DomainError("q_score: density vanishes at the evaluation point");
  return p.gradient(x) / std::pow(px, 2.0 - q);
}

namespace {

double checked(const QuadratureResult& r, const char* what) {
  if (!std::isfinite(r.value) || !(r.error <= 1e-6 * std::abs(r.value) + 1e-300)) {
    throw DivergenceError(std::string("q_fisher: ") + what + " did not converge (integral may diverge)");
  }
  return r.value;
}

double pow_or_zero(double h, double e) { return h > 0.0 ? std::exp(e * std::log(h)) : 0.0; }

}  // namespace

FisherResult q_fisher(const Density& p, double q, double rel_tol) {
  const int n = p.dim();
  FisherResult out;
  if (const auto* e = dynamic_cast<const EllipticalDensity*>(&p)) {
    // ∇p = 2h'(s) S⁻¹x and ∫ φ(s) x xᵀ dx = S/n ∫ φ(s) s dx.
    const double ld = e->shape().log_det();
    const double s_max = e->support_s();
    const double g = checked(integrate_radial(
                                 n, ld,
                                 [&](double s) {
                                   const double h = e->profile(s);
                                   if (!(h > 0.0)) return 0.0;
                                   const double d = e->profile_derivative(s);
                                   return s * d * d * pow_or_zero(h, 2.0 * q - 3.0);
                                 },
                                 s_max, rel_tol),
                             "numerator");
    out.numerator = (4.0 / n) * g * e->shape().inverse();
    out.power_integral =
        checked(integrate_radial(n, ld, [&](double s) { return pow_or_zero(e->profile(s), q); }, s_max, rel_tol),
                "power integral");
    out.method = "quadrature-radial";
  } else {
    if (n > 3) throw InvalidArgument("q_fisher: quadrature is limited to n <= 3");
    auto [lo, hi] = p.bounding_box();
    std::vector<double> l(lo.data(), lo.data() + n), u(hi.data(), hi.data() + n);
    auto box = [&](const std::function<double(const VecRef&)>& f, const char* what) {
      return checked(integrate_box(l, u,
                                   [&](std::span<const double> x) {
                                     Eigen::Map<const Vec> v(x.data(), static_cast<Eigen::Index>(x.size()));
                                     return f(v);
                                   },
                                   rel_tol),
                     what);
    };
    out.numerator = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double v = box(
            [&](const VecRef& x) {
              const double px = p.pdf(x);
              if (!(px > 0.0)) return 0.0;
              const Vec g = p.gradient(x);
              return pow_or_zero(px, 2.0 * q - 3.0) * g[i] * g[j];
            },
            "numerator");
        out.numerator(i, j) = out.numerator(j, i) = v;
      }
    }
    out.power_integral = box([&](const VecRef& x) { return pow_or_zero(p.pdf(x), q); }, "power integral");
    out.method = "quadrature-box";
  }
  out.matrix = out.numerator / out.power_integral;
  return out;
}

CramerRaoGap cramer_rao_gap(const Density& p, double q, double rel_tol) {
  CramerRaoGap out;
  out.fisher = q_fisher(p, q, rel_tol);
  const Covariance c = p.covariance();
  out.gap = out.fisher.matrix - out.fisher.power_integral / (q * q) * c.inverse();
  out.gap = 0.5 * (out.gap + out.gap.transpose());
  out.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Mat>(out.gap, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  out.psd = out.min_eigenvalue >= -1e-8;
  return out;
}

double debruijn_factor(double q, DebruijnConstant c) { return c == DebruijnConstant::Stated ? q * (q - 1.0) : q * q; }

VerificationReport debruijn_verify(const HeatFamily& family, double rel_tolerance, double dtau_rel,
                                   DebruijnConstant c) {
  const double tau = family.tau;
  const double dtau = dtau_rel * tau;
  const double lhs =
      (renyi_entropy(family.params_at(tau + dtau)) - renyi_entropy(family.params_at(tau - dtau))) / (2.0 * dtau);
  const MaximizerDensity f(family.params_at(tau));
  const auto fisher = q_fisher(f, family.q, 1e-11);
  const double trace = (family.base_cov.matrix() * fisher.matrix).trace();
  const double k = kq_constant(family.params_at(1.0));
  const double rhs = debruijn_factor(family.q, c) / k * trace;
  auto rep = make_check("debruijn", Relation::Equal, lhs, rhs, 0.0, 0.0, rel_tolerance * std::abs(rhs), 0.0);
  rep.inputs = {{"q", family.q}, {"n", family.n}, {"tau", tau}, {"mu", family.mu}, {"dtau", dtau},
                {"constant", c == DebruijnConstant::Stated ? "stated" : "corrected"}};
  rep.details = {{"relative_error", std::abs(lhs - rhs) / std::abs(rhs)},
                 {"K_q", k},
                 {"trace_CJ", trace},
                 {"fisher_method", fisher.method}};
  return rep;
}

double extensivity_alpha(const Density& p, double q, double rel_tol) {
  const double num = std::exp((1.0 - (2.0 * q - 1.0)) * renyi_entropy_quadrature(p, 2.0 * q - 1.0, rel_tol));
  const double den = std::exp((1.0 - q) * renyi_entropy_quadrature(p, q, rel_tol));
  return num / den;
}

VerificationReport extensivity_verify(const DensityPtr& px, const DensityPtr& py, double q, double block_tol,
                                      double offdiag_tol) {
  if (!(q > 0.5)) throw DomainError("extensivity requires q > 1/2");
  const int nx = px->dim(), ny = py->dim();
  if (nx + ny > 3) throw InvalidArgument("extensivity: joint dimension is limited to 3");
  const ProductDensity joint(px, py);
  const auto j = q_fisher(joint, q, 1e-10);
  const auto jx = q_fisher(*px, q, 1e-11);
  const auto jy = q_fisher(*py, q, 1e-11);
  const double ax = q == 1.0 ? 1.0 : extensivity_alpha(*px, q);
  const double ay = q == 1.0 ? 1.0 : extensivity_alpha(*py, q);
  const double block_err =
      std::max((j.matrix.topLeftCorner(nx, nx) - ay * jx.matrix).cwiseAbs().maxCoeff(),
               (j.matrix.bottomRightCorner(ny, ny) - ax * jy.matrix).cwiseAbs().maxCoeff());
  const double off = j.matrix.topRightCorner(nx, ny).cwiseAbs().maxCoeff();
  auto blocks = make_check("extensivity/blocks", Relation::LessEqual, block_err, 0.0, 0.0, 0.0, block_tol, 0.0);
  auto offd = make_check("extensivity/off-diagonal", Relation::LessEqual, off, 0.0, 0.0, 0.0, offdiag_tol, 0.0);
  auto rep = make_composite("extensivity", {blocks, offd});
  rep.inputs = {{"q", q}, {"X", px->describe()}, {"Y", py->describe()}};
  rep.details = {{"alpha_X", ax}, {"alpha_Y", ay}, {"joint_J_00", j.matrix(0, 0)}};
  return rep;
}

}  // namespace renyi
