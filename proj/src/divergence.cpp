#include "renyi/divergence.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "renyi/convolve.hpp"
#include "renyi/knn.hpp"
#include "renyi/parallel.hpp"
#include "renyi/quadrature.hpp"
#include "renyi/specfun.hpp"
#include "renyi/stats.hpp"

namespace renyi {

std::string to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::PluginQuadrature: return "plugin-quadrature";
    case EstimateMethod::PluginMc: return "plugin-mc";
    case EstimateMethod::Knn: return "knn";
  }
  return "unknown";
}

namespace {

constexpr double kTiny = 1e-300;

const EllipticalDensity* as_elliptical(const Density& d) { return dynamic_cast<const EllipticalDensity*>(&d); }

// λ with s_g = λ s_f when both are elliptical with proportional shapes.
std::optional<double> radial_pair(const Density& f, const Density& g) {
  const auto* ef = as_elliptical(f);
  const auto* eg = as_elliptical(g);
  if (!ef || !eg) return std::nullopt;
  return shape_ratio(*ef, *eg);
}

double radial(const EllipticalDensity& ref, const ScalarFn& fn, double rel_tol, const char* what) {
  const auto r = integrate_radial(ref.dim(), ref.shape().log_det(), fn, ref.support_s(), rel_tol);
  if (!std::isfinite(r.value)) throw DivergenceError(std::string(what) + ": integral is not finite");
  return r.value;
}

}  // namespace

double integrate_functional(const Density& ref, const std::function<double(const VecRef&)>& f, double rel_tol,
                            const char* what) {
  const int n = ref.dim();
  if (n > 3) throw InvalidArgument(std::string(what) + ": quadrature is limited to n <= 3");
  auto [lo, hi] = ref.bounding_box();
  std::vector<double> l(lo.data(), lo.data() + n), h(hi.data(), hi.data() + n);
  const auto r = integrate_box(l, h,
                               [&](std::span<const double> x) {
                                 Eigen::Map<const Vec> v(x.data(), static_cast<Eigen::Index>(x.size()));
                                 return f(v);
                               },
                               rel_tol);
  if (!std::isfinite(r.value)) throw DivergenceError(std::string(what) + ": integral is not finite");
  return r.value;
}

DivergenceEstimate kl_quadrature(const Density& f, const Density& g, double rel_tol) {
  if (f.dim() != g.dim()) throw InvalidArgument("kl: dimension mismatch");
  auto term = [](double lf, double lg) {
    if (!(lf > std::log(kTiny))) return 0.0;
    if (!std::isfinite(lg)) throw DivergenceError("kl: g vanishes where f is positive (support mismatch)");
    return std::exp(lf) * (lf - lg);
  };
  double value = 0.0;
  if (auto lambda = radial_pair(f, g)) {
    const auto& ef = *as_elliptical(f);
    const auto& eg = *as_elliptical(g);
    value = radial(ef, [&](double s) { return term(ef.log_profile(s), eg.log_profile(*lambda * s)); }, rel_tol,
                   "kl");
  } else {
    value = integrate_functional(f, [&](const VecRef& x) { return term(f.log_pdf(x), g.log_pdf(x)); }, rel_tol,
                                 "kl");
  }
  return {value, 0.0, EstimateMethod::PluginQuadrature, 0};
}

namespace {

// Per-sample values v(x) over `count` draws from f, chunked by substream.
std::vector<double> sample_values(const Density& f, long long count, const RandomStream& rng,
                                  const std::function<double(const VecRef&)>& v) {
  std::vector<double> out(static_cast<std::size_t>(count));
  const int n = f.dim();
  for_each_chunk(out.size(), kChunkRows, [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
    RandomStream local = rng.substream(chunk);
    Vec x(n);
    for (std::size_t i = lo; i < hi; ++i) {
      f.sample(local, x);
      out[i] = v(x);
    }
  });
  return out;
}

}  // namespace

DivergenceEstimate kl_mc(const Density& f, const Density& g, long long count, const RandomStream& rng) {
  if (f.dim() != g.dim()) throw InvalidArgument("kl: dimension mismatch");
  auto values = sample_values(f, count, rng, [&](const VecRef& x) {
    const double lg = g.log_pdf(x);
    if (!std::isfinite(lg)) throw DivergenceError("kl: g vanishes at a sampled point (support mismatch)");
    return f.log_pdf(x) - lg;
  });
  const auto m = mean_estimate(values);
  return {m.mean, m.std_error, EstimateMethod::PluginMc, count};
}

DivergenceEstimate kl(const Density& f, const Density& g, const RandomStream& rng, long long count) {
  if (f.dim() <= 2) return kl_quadrature(f, g);
  return kl_mc(f, g, count, rng);
}

namespace {

struct Whitened {
  RowMat data;
  double log_det = 0.0;  // ln|Σ| of the whitening covariance
};

Whitened whiten(const RowMat& x, const Vec& mean, const Covariance& cov) {
  Whitened w;
  w.data.resize(x.rows(), x.cols());
  const Mat& l = cov.chol();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    w.data.row(i) = l.triangularView<Eigen::Lower>().solve(Vec(x.row(i).transpose() - mean)).transpose();
  }
  w.log_det = cov.log_det();
  return w;
}

double log_unit_ball(int d) { return 0.5 * d * std::log(std::numbers::pi) - log_gamma(0.5 * d + 1.0); }

}  // namespace

DivergenceEstimate kl_knn(const SampleBatch& f, const SampleBatch& g, KnnOptions opt) {
  if (f.dim() != g.dim()) throw InvalidArgument("kl_knn: dimension mismatch");
  const auto n = static_cast<std::size_t>(f.count());
  const auto m = static_cast<std::size_t>(g.count());
  const std::size_t k = static_cast<std::size_t>(opt.k);
  if (n <= k + 1 || m <= k) throw InvalidArgument("kl_knn: batches too small for k");
  const int d = f.dim();
  const auto mg = sample_moments(g.data);
  const Covariance cov(mg.cov);
  const KdTree tf(whiten(f.data, mg.mean, cov).data);
  const KdTree tg(whiten(g.data, mg.mean, cov).data);
  const RowMat wf = whiten(f.data, mg.mean, cov).data;
  std::vector<double> terms(n);
  bool duplicate = false;
  for_each_chunk(n, kChunkRows, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double* x = wf.row(static_cast<Eigen::Index>(i)).data();
      const double rho = tf.kth_distance(x, k, i);
      const double nu = tg.kth_distance(x, k);
      if (rho == 0.0 || nu == 0.0) {
        duplicate = true;
        terms[i] = 0.0;
        continue;
      }
      terms[i] = d * std::log(nu / rho);
    }
  });
  if (duplicate) throw DivergenceError("kl_knn: duplicate points give zero neighbour distances");
  const auto est = mean_estimate(terms);
  const double value = est.mean + std::log(static_cast<double>(m) / static_cast<double>(n - 1));
  return {value, est.std_error, EstimateMethod::Knn, static_cast<long long>(n + m)};
}

DivergenceEstimate kl_knn_reference(const SampleBatch& f, const Density& g, KnnOptions opt) {
  if (f.dim() != g.dim()) throw InvalidArgument("kl_knn: dimension mismatch");
  const auto n = static_cast<std::size_t>(f.count());
  const std::size_t k = static_cast<std::size_t>(opt.k);
  if (n <= k + 1) throw InvalidArgument("kl_knn: batch too small for k");
  const int d = f.dim();
  const auto mf = sample_moments(f.data);
  const Covariance cov(mf.cov);
  const Whitened w = whiten(f.data, mf.mean, cov);
  const KdTree tree(w.data);
  std::vector<double> terms(n);
  bool duplicate = false, outside = false;
  for_each_chunk(n, kChunkRows, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const double eps = tree.kth_distance(w.data.row(r).data(), k, i);
      const double lg = g.log_pdf(f.data.row(r).transpose());
      if (eps == 0.0) duplicate = true;
      if (!std::isfinite(lg)) outside = true;
      terms[i] = (eps > 0.0 && std::isfinite(lg)) ? -(d * std::log(eps)) - lg : 0.0;
    }
  });
  if (duplicate) throw DivergenceError("kl_knn: duplicate points give zero neighbour distances");
  if (outside) throw DivergenceError("kl_knn: reference density vanishes at a sample (support mismatch)");
  const auto est = mean_estimate(terms);
  const double constant = digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) + log_unit_ball(d) +
                          0.5 * w.log_det;
  return {est.mean - constant, est.std_error, EstimateMethod::Knn, static_cast<long long>(n)};
}

double renyi_entropy_quadrature(const Density& p, double q, double rel_tol) {
  if (q == 1.0) {
    auto term = [](double lp) { return lp > std::log(kTiny) ? -std::exp(lp) * lp : 0.0; };
    if (const auto* e = as_elliptical(p)) {
      return radial(*e, [&](double s) { return term(e->log_profile(s)); }, rel_tol, "entropy");
    }
    return integrate_functional(p, [&](const VecRef& x) { return term(p.log_pdf(x)); }, rel_tol, "entropy");
  }
  auto power = [q](double lp) { return std::isfinite(lp) ? std::exp(q * lp) : 0.0; };
  double integral = 0.0;
  if (const auto* e = as_elliptical(p)) {
    integral = radial(*e, [&](double s) { return power(e->log_profile(s)); }, rel_tol, "entropy");
  } else {
    integral = integrate_functional(p, [&](const VecRef& x) { return power(p.log_pdf(x)); }, rel_tol, "entropy");
  }
  return std::log(integral) / (1.0 - q);
}

namespace {

double combine_dq(double q, double log_cross, double log_pf, double log_pg) {
  return (log_cross + (1.0 - q) / q * log_pg - log_pf / q) / (1.0 - q);
}

}  // namespace

DivergenceEstimate dq_relative(const Density& f, const Density& g, double q, double rel_tol) {
  if (!(q > 0.0)) throw InvalidArgument("dq_relative: q must be positive");
  if (q == 1.0) return kl_quadrature(f, g, rel_tol);
  if (f.dim() != g.dim()) throw InvalidArgument("dq_relative: dimension mismatch");
  auto cross = [q](double lf, double lg) {
    if (!std::isfinite(lf)) return 0.0;
    if (!std::isfinite(lg)) {
      if (q < 1.0) throw DivergenceError("dq_relative: g vanishes where f is positive, integral diverges");
      return 0.0;
    }
    return std::exp((q - 1.0) * lg + lf);
  };
  auto power = [q](double lp) { return std::isfinite(lp) ? std::exp(q * lp) : 0.0; };
  double i_cross = 0.0, p_f = 0.0, p_g = 0.0;
  if (auto lambda = radial_pair(f, g)) {
    const auto& ef = *as_elliptical(f);
    const auto& eg = *as_elliptical(g);
    i_cross = radial(ef, [&](double s) { return cross(ef.log_profile(s), eg.log_profile(*lambda * s)); }, rel_tol,
                     "dq cross term");
    p_f = radial(ef, [&](double s) { return power(ef.log_profile(s)); }, rel_tol, "dq power of f");
    p_g = radial(eg, [&](double s) { return power(eg.log_profile(s)); }, rel_tol, "dq power of g");
  } else {
    i_cross = integrate_functional(f, [&](const VecRef& x) { return cross(f.log_pdf(x), g.log_pdf(x)); }, rel_tol,
                                   "dq cross term");
    p_f = integrate_functional(f, [&](const VecRef& x) { return power(f.log_pdf(x)); }, rel_tol, "dq power of f");
    p_g = integrate_functional(g, [&](const VecRef& x) { return power(g.log_pdf(x)); }, rel_tol, "dq power of g");
  }
  if (!(i_cross > 0.0) || !(p_f > 0.0) || !(p_g > 0.0)) throw DivergenceError("dq_relative: degenerate integrals");
  return {combine_dq(q, std::log(i_cross), std::log(p_f), std::log(p_g)), 0.0, EstimateMethod::PluginQuadrature,
          0};
}

DivergenceEstimate dq_relative_mc(const Density& f, const Density& g, double q, long long count,
                                  const RandomStream& rng) {
  if (q == 1.0) return kl_mc(f, g, count, rng);
  const int n = f.dim();
  std::vector<double> a(static_cast<std::size_t>(count)), b(a.size());
  for_each_chunk(a.size(), kChunkRows, [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
    RandomStream local = rng.substream(chunk);
    Vec x(n);
    for (std::size_t i = lo; i < hi; ++i) {
      f.sample(local, x);
      const double lg = g.log_pdf(x);
      if (!std::isfinite(lg) && q < 1.0) throw DivergenceError("dq_relative: g vanishes at a sampled point");
      a[i] = std::isfinite(lg) ? std::exp((q - 1.0) * lg) : 0.0;
      b[i] = std::exp((q - 1.0) * f.log_pdf(x));
    }
  });
  const auto ma = mean_estimate(a), mb = mean_estimate(b);
  double cov_ab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) cov_ab += (a[i] - ma.mean) * (b[i] - mb.mean);
  cov_ab /= static_cast<double>(a.size() - 1) * static_cast<double>(a.size());
  const double log_pg = (1.0 - q) * renyi_entropy_quadrature(g, q);
  const double value = combine_dq(q, std::log(ma.mean), std::log(mb.mean), log_pg);
  // Delta method on (log Ā - log B̄ / q) / (1 - q).
  const double ga = 1.0 / (ma.mean * (1.0 - q));
  const double gb = -1.0 / (q * mb.mean * (1.0 - q));
  const double var = ga * ga * ma.std_error * ma.std_error + gb * gb * mb.std_error * mb.std_error +
                     2.0 * ga * gb * cov_ab;
  return {value, std::sqrt(std::max(var, 0.0)), EstimateMethod::PluginMc, count};
}

DivergenceEstimate dist_to_maximizer(const DensityPtr& t, const MaximizerParams& params, double rel_tol) {
  if (!params.bounded()) throw DomainError("d(T|R) is defined for q > 1 only");
  const double m = params.dof;
  // The inner mixture integral runs well below the outer tolerance so its
  // noise does not stall the outer adaptive rule.
  const auto tu = chi_scaled(t, m, std::min(rel_tol * 1e-3, 1e-11));
  const GaussianDensity z(params.cov.scaled(m));
  return kl_quadrature(*tu, z, rel_tol);
}

DivergenceEstimate dist_to_maximizer_knn(const SampleBatch& t, const MaximizerParams& params,
                                         const RandomStream& rng, KnnOptions opt) {
  if (!params.bounded()) throw DomainError("d(T|R) is defined for q > 1 only");
  const double m = params.dof;
  const ChiParams chi(m);
  SampleBatch tu = t;
  for_each_chunk(static_cast<std::size_t>(t.count()), kChunkRows,
                 [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
                   RandomStream local = rng.substream(chunk);
                   for (std::size_t i = lo; i < hi; ++i) {
                     tu.data.row(static_cast<Eigen::Index>(i)) *= chi_sample(chi, local);
                   }
                 });
  return kl_knn_reference(tu, GaussianDensity(params.cov.scaled(m)), opt);
}

DivergenceEstimate shannon_entropy_mc(const Density& p, long long count, const RandomStream& rng) {
  auto values = sample_values(p, count, rng, [&](const VecRef& x) { return -p.log_pdf(x); });
  const auto m = mean_estimate(values);
  return {m.mean, m.std_error, EstimateMethod::PluginMc, count};
}

namespace {

Json estimate_json(const DivergenceEstimate& e) {
  Json j;
  j["value"] = e.value;
  j["stderr"] = e.std_error;
  j["method"] = to_string(e.method);
  j["count"] = e.count;
  return j;
}

}  // namespace

VerificationReport epi_verify(const DensityPtr& s, const DensityPtr& t, double q, const RandomStream& rng,
                              const EpiOptions& opt) {
  if (!(q > 1.0)) throw DomainError("the ⋆-EPI is stated for q > 1 only");
  const int n = s->dim();
  if (t->dim() != n) throw InvalidArgument("epi: dimension mismatch");
  const Covariance cs = s->covariance(), ct = t->covariance();
  const Covariance c = cs + ct;
  const auto d_s = dist_to_maximizer(s, make_params(q, cs));
  const auto d_t = dist_to_maximizer(t, make_params(q, ct));
  const auto bs = sample_density(*s, opt.count, rng.substream(1));
  const auto bt = sample_density(*t, opt.count, rng.substream(2));
  const auto star = star_convolve(make_convolution_spec(q, cs, ct), bs, bt, rng.substream(3));
  const auto d_star = dist_to_maximizer_knn(star, make_params(q, c), rng.substream(4), opt.knn);

  const double lhs = std::exp((c.log_det() - 2.0 * d_star.value) / n);
  const double rs = std::exp((cs.log_det() - 2.0 * d_s.value) / n);
  const double rt = std::exp((ct.log_det() - 2.0 * d_t.value) / n);
  const double se_lhs = lhs * 2.0 / n * d_star.std_error;
  const double se_rhs = std::hypot(rs * 2.0 / n * d_s.std_error, rt * 2.0 / n * d_t.std_error);
  auto rep = make_check("epi", opt.relation, lhs, rs + rt, se_lhs, se_rhs, 0.0);
  rep.inputs["q"] = q;
  rep.inputs["n"] = n;
  rep.inputs["S"] = s->describe();
  rep.inputs["T"] = t->describe();
  rep.inputs["k"] = opt.knn.k;
  rep.seed = rng.seed();
  rep.count = opt.count;
  rep.details["d_S"] = estimate_json(d_s);
  rep.details["d_T"] = estimate_json(d_t);
  rep.details["d_star"] = estimate_json(d_star);
  return rep;
}

VerificationReport mapgood_verify(const DensityPtr& m, const Covariance& c, double q, const RandomStream& rng,
                                  const MapgoodOptions& opt) {
  if (!(q > 1.0)) throw DomainError("the projection inequality is stated for q > 1 only");
  const int n = m->dim();
  if (c.dim() != n) throw InvalidArgument("mapgood: dimension mismatch");
  const double k = 2.0 * q / (q - 1.0);
  const ChiParams chi_n(k), chi_u(k + n);
  SampleBatch y = sample_density(*m, opt.count, rng.substream(1));
  const RandomStream mix = rng.substream(2);
  for_each_chunk(static_cast<std::size_t>(y.count()), kChunkRows,
                 [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
                   RandomStream local = mix.substream(chunk);
                   for (std::size_t i = lo; i < hi; ++i) {
                     auto row = y.data.row(static_cast<Eigen::Index>(i));
                     const double nv = chi_sample(chi_n, local);
                     const double u = chi_sample(chi_u, local);
                     const double s = c.quad_form(row.transpose());
                     row *= u / std::sqrt(s + nv * nv);
                   }
                 });
  const GaussianDensity z(c);
  const auto lhs = kl_knn_reference(y, z, opt.knn);
  const auto rhs = kl_quadrature(*m, z);
  auto rep = make_check("mapgood", opt.relation, lhs.value, rhs.value, lhs.std_error, rhs.std_error, 0.0);
  rep.inputs["q"] = q;
  rep.inputs["n"] = n;
  rep.inputs["M"] = m->describe();
  rep.inputs["k"] = opt.knn.k;
  rep.seed = rng.seed();
  rep.count = opt.count;
  rep.details["lhs"] = estimate_json(lhs);
  rep.details["rhs"] = estimate_json(rhs);
  return rep;
}

}  // namespace renyi
