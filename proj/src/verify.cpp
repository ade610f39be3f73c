#include "renyi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include "renyi/convolve.hpp"
#include "renyi/divergence.hpp"
#include "renyi/embedded_config.hpp"
#include "renyi/maximizer.hpp"
#include "renyi/parallel.hpp"
#include "renyi/quadrature.hpp"
#include "renyi/sampling.hpp"
#include "renyi/stats.hpp"

namespace renyi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// configuration access

const Json& section(const Json& tol, const char* name) {
  if (!tol.contains(name) || !tol.at(name).is_object()) {
    throw InvalidArgument(std::string("tolerances: missing section '") + name + "'");
  }
  return tol.at(name);
}

template <typename T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("tolerances: missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("tolerances: key '") + key + "' has the wrong type");
  }
}

struct Ctx {
  const ScenarioConfig& cfg;
  const Json& tol;       // the claim's section
  double k_se = 3.0;
  RandomStream rng;

  long long count() const {
    const long long c = cfg.count.value_or(get<long long>(tol, "count"));
    if (c < 100) throw InvalidArgument("count must be at least 100");
    return c;
  }
  double q(double fallback) const { return cfg.q.value_or(fallback); }
  int n(int fallback) const { return cfg.n.value_or(fallback); }
  VerificationReport check(std::string id, Relation r, double lhs, double rhs, double se_l, double se_r,
                           double tol_value) const {
    return make_check(std::move(id), r, lhs, rhs, se_l, se_r, tol_value, k_se);
  }
};

std::string label(double q, int n) {
  std::ostringstream os;
  os << "q=" << q << ",n=" << n;
  return os.str();
}

// Reference covariances: the identity for n = 1 and a correlated matrix in
// two dimensions.
Covariance fixture_cov(int n) {
  if (n == 1) return Covariance::identity(1);
  if (n == 2) {
    Mat c(2, 2);
    c << 1.0, 0.3, 0.3, 2.0;
    return Covariance(c);
  }
  Mat c = Mat::Identity(n, n);
  for (int i = 0; i < n; ++i) c(i, i) = 1.0 + i;
  return Covariance(c);
}

bool index_valid(double q, int n) { return q > static_cast<double>(n) / (n + 2) && q > 0.0; }

std::shared_ptr<const MaximizerDensity> maximizer(double q, const Covariance& c) {
  return std::make_shared<MaximizerDensity>(make_params(q, c));
}

Json mat_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json estimate_json(const DivergenceEstimate& e) {
  Json j;
  j["value"] = e.value;
  j["stderr"] = e.std_error;
  j["method"] = to_string(e.method);
  j["count"] = e.count;
  return j;
}

double uniform_in(RandomStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Zero-mean Gaussian scale mixture with 2-3 components and covariance c.
std::shared_ptr<const ScaleMixtureDensity> random_scale_mixture(RandomStream& rng, const Covariance& c) {
  const int k = 2 + static_cast<int>(rng.uniform() * 2.0);
  std::vector<double> w, s;
  for (int i = 0; i < k; ++i) {
    w.push_back(uniform_in(rng, 0.1, 1.0));
    s.push_back(std::exp(uniform_in(rng, -1.5, 1.5)));
  }
  return std::make_shared<ScaleMixtureDensity>(ScaleMixtureDensity::matched(c, w, s));
}

// Elliptical competitor with covariance c. For q > 1 the support lies
// inside that of g_{q,c}; for q < 1 the tails are light enough for every
// integral involved to converge.
std::shared_ptr<const EllipticalDensity> random_competitor(RandomStream& rng, double q, const Covariance& c,
                                                           int kind) {
  const int n = c.dim();
  const double m = maximizer_dof({q, n});
  auto truncate = [&](std::shared_ptr<const EllipticalDensity> base) -> std::shared_ptr<const EllipticalDensity> {
    const double lo = (n + 2.0) / m * 1.02;
    const double frac = uniform_in(rng, lo, 0.99);
    return std::make_shared<TruncatedEllipticalDensity>(truncated_matched(std::move(base), m, frac));
  };
  switch (kind % 3) {
    case 0: {
      auto mix = random_scale_mixture(rng, c);
      return q > 1.0 ? truncate(mix) : mix;
    }
    case 1: {
      // Another maximizer with the same covariance: a larger index for q > 1
      // (smaller support), any lighter-tailed index for q < 1.
      double other = q > 1.0 ? q + uniform_in(rng, 0.1, 3.0) : uniform_in(rng, q + 0.05, 4.0);
      if (std::abs(other - 1.0) < 1e-3) other = 1.0;
      return maximizer(other, c);
    }
    default: {
      auto gauss = std::make_shared<GaussianDensity>(c);
      return q > 1.0 ? truncate(gauss) : gauss;
    }
  }
}

// ∫ g^{q-1} f over the support of f, for elliptical f and g with
// proportional shapes.
double cross_integral(const EllipticalDensity& f, const EllipticalDensity& g, double q) {
  const auto lambda = shape_ratio(f, g);
  if (!lambda) throw InvalidArgument("cross_integral: shapes are not proportional");
  auto fn = [&](double s) {
    const double hf = f.profile(s);
    if (hf == 0.0) return 0.0;
    const double hg = g.profile(*lambda * s);
    if (hg == 0.0) return 0.0;
    return std::pow(hg, q - 1.0) * hf;
  };
  return integrate_radial(f.dim(), f.shape().log_det(), fn, f.support_s(), 1e-12).value;
}

double total_mass(const EllipticalDensity& d) {
  return integrate_radial(d.dim(), d.shape().log_det(), [&](double s) { return d.profile(s); }, d.support_s(),
                          1e-12)
      .value;
}

// Density of s = xᵀS⁻¹x when x has the elliptical density d.
std::function<double(double)> radial_law(const EllipticalDensity& d) {
  const int n = d.dim();
  const double c = std::exp(0.5 * d.shape().log_det()) * unit_sphere_area(n) / 2.0;
  return [&d, c, n](double s) { return s > 0.0 ? c * std::pow(s, 0.5 * n - 1.0) * d.profile(s) : 0.0; };
}

// Law of Θ_D(X) for a density p_X on R^n.
class ThetaPushforward final : public Density {
 public:
  ThetaPushforward(DensityPtr base, Covariance d) : base_(std::move(base)), d_(std::move(d)) {}
  int dim() const override { return base_->dim(); }
  double pdf(const VecRef& y) const override {
    const double u = d_.quad_form(y);
    if (!(u < 1.0)) return 0.0;
    const Vec x = y / std::sqrt(1.0 - u);
    return std::exp(log_pdf(y));
  }
  double log_pdf(const VecRef& y) const override {
    const double u = d_.quad_form(y);
    if (!(u < 1.0)) return -kInf;
    const Vec x = y / std::sqrt(1.0 - u);
    return base_->log_pdf(x) - (0.5 * dim() + 1.0) * std::log1p(-u);
  }
  Covariance covariance() const override {
    throw InvalidArgument("ThetaPushforward: covariance is not available");
  }
  std::pair<Vec, Vec> bounding_box() const override {
    const Vec r = d_.matrix().diagonal().cwiseSqrt();
    return {-r, r};
  }
  std::string describe() const override { return "theta-pushforward(" + base_->describe() + ")"; }

 private:
  DensityPtr base_;
  Covariance d_;
};

// Relative deviation of a sample covariance from the target.
double cov_rel_error(const Mat& sample, const Covariance& target) {
  return (sample - target.matrix()).cwiseAbs().maxCoeff() / target.matrix().cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// scenarios

VerificationReport scenario_maxent(const Ctx& ctx) {
  const auto qs = get<std::vector<double>>(ctx.tol, "q_values");
  const auto ns = get<std::vector<int>>(ctx.tol, "n_values");
  const int total = get<int>(ctx.tol, "competitors");
  const double norm_tol = get<double>(ctx.tol, "normalization_tol");
  const double closed_tol = get<double>(ctx.tol, "entropy_closed_form_tol");
  const double slack = get<double>(ctx.tol, "entropy_slack");
  const double floor = get<double>(ctx.tol, "dq_floor");
  const double identity_tol = get<double>(ctx.tol, "identity_tol");

  std::vector<std::pair<double, int>> grid;
  Json skipped = Json::array();
  for (int n : ns) {
    for (double q : qs) {
      if (index_valid(q, n)) {
        grid.emplace_back(q, n);
      } else {
        skipped.push_back(label(q, n));
      }
    }
  }
  if (grid.empty()) throw InvalidArgument("maxent: empty parameter grid");

  std::vector<VerificationReport> checks;
  int drawn = 0;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const auto [q, n] = grid[gi];
    const Covariance c = fixture_cov(n);
    const auto g = maximizer(q, c);
    const std::string tag = label(q, n);
    checks.push_back(ctx.check("normalization " + tag, Relation::Equal, total_mass(*g), 1.0, 0, 0, norm_tol));
    const double h_closed = renyi_entropy(g->params());
    const double h_quad = renyi_entropy_quadrature(*g, q, 1e-12);
    checks.push_back(ctx.check("closed-form entropy " + tag, Relation::Equal, h_closed, h_quad, 0, 0, closed_tol));

    // Competitors are spread evenly over the grid, at least `total` in all.
    const int per = (total + static_cast<int>(grid.size()) - 1) / static_cast<int>(grid.size());
    RandomStream local = ctx.rng.substream(gi);
    double worst_gap = -kInf, min_dq = kInf, worst_identity = 0.0;
    for (int i = 0; i < per; ++i) {
      const auto f = random_competitor(local, q, c, i);
      const double hf = renyi_entropy_quadrature(*f, q);
      const double dq = dq_relative(*f, *g, q).value;
      worst_gap = std::max(worst_gap, hf - h_closed);
      min_dq = std::min(min_dq, dq);
      worst_identity = std::max(worst_identity, std::abs(dq - (h_closed - hf) / q));
      ++drawn;
    }
    checks.push_back(
        ctx.check("competitor entropy bound " + tag, Relation::LessEqual, worst_gap, 0.0, 0, 0, slack));
    checks.push_back(ctx.check("relative q-entropy non-negative " + tag, Relation::GreaterEqual, min_dq, 0.0, 0, 0,
                               floor));
    checks.push_back(ctx.check("relative q-entropy equals entropy gap / q " + tag, Relation::Equal,
                               worst_identity, 0.0, 0, 0, identity_tol));
  }
  auto rep = make_composite("maxent", std::move(checks));
  rep.inputs["q_values"] = qs;
  rep.inputs["n_values"] = ns;
  rep.inputs["competitors"] = drawn;
  rep.details["skipped_invalid_indices"] = skipped;
  return rep;
}

VerificationReport scenario_orthogonality(const Ctx& ctx) {
  const auto qs = get<std::vector<double>>(ctx.tol, "q_values");
  const auto ns = get<std::vector<int>>(ctx.tol, "n_values");
  const double tol = get<double>(ctx.tol, "tol");
  std::vector<VerificationReport> checks;
  std::size_t gi = 0;
  for (int n : ns) {
    for (double q : qs) {
      if (!index_valid(q, n)) continue;
      const Covariance c = fixture_cov(n);
      const auto g = maximizer(q, c);
      const double target = power_integral(g->params());
      RandomStream local = ctx.rng.substream(gi++);
      double worst = 0.0;
      for (int kind = 0; kind < 3; ++kind) {
        const auto f = random_competitor(local, q, c, kind);
        worst = std::max(worst, std::abs(cross_integral(*f, *g, q) - target));
      }
      checks.push_back(ctx.check("cross integral equals power integral " + label(q, n), Relation::Equal, worst,
                                 0.0, 0, 0, tol));
    }
  }
  auto rep = make_composite("orthogonality", std::move(checks));
  rep.inputs["q_values"] = qs;
  rep.inputs["n_values"] = ns;
  return rep;
}

VerificationReport scenario_stability(const Ctx& ctx, const std::string& id, double default_q) {
  const double q = ctx.q(default_q);
  const int n = ctx.n(1);
  if ((id == "stability-star") != (q > 1.0) || q == 1.0) {
    throw InvalidArgument(id + ": q must be " + (id == "stability-star" ? "> 1" : "< 1"));
  }
  const long long count = ctx.count();
  const Covariance cs = fixture_cov(n);
  const Covariance ct = Covariance::identity(n).scaled(n == 1 ? 2.0 : 1.0);
  const auto spec = make_convolution_spec(q, cs, ct);
  const auto s = sample_maximizer(make_params(q, cs), count, ctx.rng.substream(1));
  const auto t = sample_maximizer(make_params(q, ct), count, ctx.rng.substream(2));
  const auto out = convolve(spec, s, t, ctx.rng.substream(3));
  const Covariance sum = spec.cov_sum();
  const MaximizerDensity target(make_params(q, sum));
  const auto direct = sample_maximizer(target.params(), count, ctx.rng.substream(4));

  KnnOptions knn{get<int>(ctx.tol, "k")};
  const auto kl = kl_knn(out, direct, knn);
  const auto moments = sample_moments(out.data);
  std::vector<double> radial(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < out.count(); ++i) {
    radial[static_cast<std::size_t>(i)] = sum.quad_form(out.data.row(i).transpose());
  }
  const auto ks = ks_test_pdf(radial, radial_law(target), 0.0, target.support_s());

  std::vector<VerificationReport> checks;
  checks.push_back(ctx.check("knn KL to direct maximizer", Relation::LessEqual, kl.value,
                             get<double>(ctx.tol, "kl_max"), kl.std_error, 0, 0));
  const double cov_err = cov_rel_error(moments.cov, sum);
  const double m = maximizer_dof({q, n});
  if (m > 4.0) {
    const double cov_se = moments.cov_se.maxCoeff() / sum.matrix().cwiseAbs().maxCoeff();
    checks.push_back(ctx.check("covariance relative error", Relation::LessEqual, cov_err,
                               get<double>(ctx.tol, "cov_rel_tol"), cov_se, 0, 0));
  } else {
    // With m ≤ 4 the fourth moment is infinite and the sample covariance has
    // no usable error bar. E[XXᵀ; s ≤ c] = C E[s; s ≤ c] / n is checked
    // instead, entry by entry with its standard error.
    const double cut = get<double>(ctx.tol, "truncation_s");
    const double expected_s =
        integrate_radial(n, sum.log_det(), [&](double s) { return s * target.profile(s); }, cut, 1e-12).value;
    std::vector<std::vector<double>> prods(static_cast<std::size_t>(n * n), std::vector<double>(radial.size()));
    for (std::size_t r = 0; r < radial.size(); ++r) {
      if (radial[r] > cut) continue;
      const auto x = out.data.row(static_cast<Eigen::Index>(r));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) prods[static_cast<std::size_t>(i * n + j)][r] = x(i) * x(j);
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const auto est = mean_estimate(prods[static_cast<std::size_t>(i * n + j)]);
        std::ostringstream id;
        id << "truncated second moment (" << i << "," << j << ")";
        checks.push_back(ctx.check(id.str(), Relation::Equal, est.mean, sum.matrix()(i, j) * expected_s / n,
                                   est.std_error, 0, 0));
      }
    }
  }
  checks.push_back(ctx.check("radial KS p-value", Relation::GreaterEqual, ks.p_value,
                             get<double>(ctx.tol, "ks_p_min"), 0, 0, 0));
  auto rep = make_composite(id, std::move(checks));
  rep.inputs["q"] = q;
  rep.inputs["n"] = n;
  rep.inputs["cov_s"] = mat_json(cs.matrix());
  rep.inputs["cov_t"] = mat_json(ct.matrix());
  rep.inputs["count"] = count;
  rep.inputs["k"] = knn.k;
  rep.details["knn_kl"] = estimate_json(kl);
  rep.details["ks_statistic"] = ks.statistic;
  rep.details["covariance_relative_error"] = cov_err;
  rep.details["sample_covariance"] = mat_json(moments.cov);
  rep.count = count;
  return rep;
}

VerificationReport scenario_epi(const Ctx& ctx) {
  const double q = ctx.q(2.0);
  if (!(q > 1.0)) throw InvalidArgument("epi: q must be > 1");
  EpiOptions opt;
  opt.count = ctx.count();
  opt.knn.k = get<int>(ctx.tol, "k");

  std::vector<VerificationReport> checks;
  auto run = [&](const char* name, DensityPtr s, DensityPtr t, Relation r, std::uint64_t stream) {
    opt.relation = r;
    auto rep = epi_verify(s, t, q, ctx.rng.substream(stream), opt);
    rep.claim_id = name;
    checks.push_back(std::move(rep));
  };
  run("equality: proportional maximizers", maximizer(q, Covariance::identity(1)),
      maximizer(q, Covariance::scalar(2.0)), Relation::Equal, 1);
  // Gaussian inputs satisfy the inequality strictly; whether the margin is
  // resolved depends on the sample size, so it is recorded, not required.
  run("Gaussian inputs", std::make_shared<GaussianDensity>(Covariance::identity(1)),
      std::make_shared<GaussianDensity>(Covariance::identity(1)), Relation::GreaterEqual, 2);
  {
    auto& g = checks.back();
    g.details["strict_margin_resolved"] =
        evaluate_relation(Relation::Greater, g.lhs, g.rhs, g.stderr_lhs, g.stderr_rhs, 0.0, ctx.k_se);
  }
  Vec a(2), b(2);
  a << 1.0, 2.0;
  b << 2.0, 1.0;
  if (index_valid(q, 2)) {
    run("inequality: non-proportional maximizers", maximizer(q, Covariance::diagonal(a)),
        maximizer(q, Covariance::diagonal(b)), Relation::GreaterEqual, 3);
  }
  auto rep = make_composite("epi", std::move(checks));
  rep.inputs["q"] = q;
  rep.inputs["count"] = opt.count;
  rep.inputs["k"] = opt.knn.k;
  return rep;
}

VerificationReport scenario_mapgood(const Ctx& ctx) {
  const double q = ctx.q(2.0);
  if (!(q > 1.0)) throw InvalidArgument("mapgood: q must be > 1");
  MapgoodOptions opt;
  opt.count = ctx.count();
  opt.knn.k = get<int>(ctx.tol, "k");
  std::vector<VerificationReport> checks;
  auto run = [&](const char* name, DensityPtr m, Relation r, std::uint64_t stream) {
    opt.relation = r;
    auto rep = mapgood_verify(m, m->covariance(), q, ctx.rng.substream(stream), opt);
    rep.claim_id = name;
    checks.push_back(std::move(rep));
  };
  run("Gaussian M: both sides vanish", std::make_shared<GaussianDensity>(Covariance::identity(1)), Relation::Equal,
      1);
  run("Laplace M", std::make_shared<LaplaceDensity>(1.0), Relation::LessEqual, 2);
  run("scale-mixture M (n=2)",
      std::make_shared<ScaleMixtureDensity>(ScaleMixtureDensity::matched(fixture_cov(2), {0.7, 0.3}, {0.5, 3.0})),
      Relation::LessEqual, 3);
  auto rep = make_composite("mapgood", std::move(checks));
  rep.inputs["q"] = q;
  rep.inputs["count"] = opt.count;
  rep.inputs["k"] = opt.knn.k;
  return rep;
}

HeatGrid heat_grid(const Json& tol) {
  HeatGrid grid;
  grid.points_per_axis = get<int>(tol, "points_per_axis");
  grid.h_rel = get<double>(tol, "h_rel");
  grid.dtau_rel = get<double>(tol, "dtau_rel");
  grid.floor_fraction = get<double>(tol, "floor_fraction");
  return grid;
}

VerificationReport scenario_heat(const Ctx& ctx) {
  const auto qs = ctx.cfg.q ? std::vector<double>{*ctx.cfg.q} : get<std::vector<double>>(ctx.tol, "q_values");
  const auto ns = ctx.cfg.n ? std::vector<int>{*ctx.cfg.n} : get<std::vector<int>>(ctx.tol, "n_values");
  const auto taus = get<std::vector<double>>(ctx.tol, "tau_values");
  const double tol = get<double>(ctx.tol, "max_rel_residual");
  const HeatGrid grid = heat_grid(ctx.tol);

  std::vector<VerificationReport> checks;
  Json residuals = Json::array();
  for (int n : ns) {
    for (double q : qs) {
      if (!index_valid(q, n) || q == 1.0) continue;
      for (double tau : taus) {
        const auto fam = HeatFamily::make(q, fixture_cov(n), tau, ctx.cfg.mu);
        const auto r = heat_residual(fam, grid);
        std::ostringstream id;
        id << "residual " << label(q, n) << ",tau=" << tau;
        checks.push_back(ctx.check(id.str(), Relation::LessEqual, r.max_rel_residual, tol, 0, 0, 0));
        residuals.push_back(r.to_json());
      }
    }
  }

  // The other exponent leaves a residual that depends on τ; the probe
  // records it and checks that it is detected.
  const double pq = get<double>(ctx.tol, "probe_q");
  const int pn = get<int>(ctx.tol, "probe_n");
  const auto ptau = get<std::vector<double>>(ctx.tol, "probe_tau");
  if (ptau.size() != 2) throw InvalidArgument("heat: probe_tau needs two values");
  const auto r1 = heat_residual(HeatFamily::make(pq, fixture_cov(pn), ptau[0], MuVariant::Statement), grid);
  const auto r2 = heat_residual(HeatFamily::make(pq, fixture_cov(pn), ptau[1], MuVariant::Statement), grid);
  Json probe;
  probe["variant"] = "statement";
  probe["q"] = pq;
  probe["n"] = pn;
  probe["mu"] = r1.mu;
  probe["residual_tau_a"] = r1.to_json();
  probe["residual_tau_b"] = r2.to_json();
  probe["difference"] = std::abs(r1.max_rel_residual - r2.max_rel_residual);
  probe["exceeds_tolerance"] = r1.max_rel_residual > tol && r2.max_rel_residual > tol;
  checks.push_back(ctx.check("statement exponent shows tau-dependent residual", Relation::Greater,
                             std::abs(r1.max_rel_residual - r2.max_rel_residual), tol, 0, 0, 0));

  auto rep = make_composite("heat", std::move(checks));
  rep.inputs["mu_variant"] = ctx.cfg.mu == MuVariant::Proof ? "proof" : "statement";
  rep.inputs["q_values"] = qs;
  rep.inputs["n_values"] = ns;
  rep.inputs["tau_values"] = taus;
  rep.inputs["points_per_axis"] = grid.points_per_axis;
  rep.details["residuals"] = residuals;
  rep.details["mu_probe"] = probe;
  return rep;
}

VerificationReport scenario_debruijn(const Ctx& ctx) {
  const auto qs = ctx.cfg.q ? std::vector<double>{*ctx.cfg.q} : get<std::vector<double>>(ctx.tol, "q_values");
  const auto ns = ctx.cfg.n ? std::vector<int>{*ctx.cfg.n} : get<std::vector<int>>(ctx.tol, "n_values");
  const auto taus = get<std::vector<double>>(ctx.tol, "tau_values");
  const double tol = get<double>(ctx.tol, "rel_tol");
  const double dtau = get<double>(ctx.tol, "dtau_rel");
  const DebruijnConstant other =
      ctx.cfg.debruijn == DebruijnConstant::Corrected ? DebruijnConstant::Stated : DebruijnConstant::Corrected;

  std::vector<VerificationReport> checks;
  Json other_errors = Json::array();
  for (int n : ns) {
    for (double q : qs) {
      if (!index_valid(q, n) || q == 1.0) continue;
      for (double tau : taus) {
        const auto fam = HeatFamily::make(q, fixture_cov(n), tau, ctx.cfg.mu);
        auto r = debruijn_verify(fam, tol, dtau, ctx.cfg.debruijn);
        std::ostringstream id;
        id << "entropy rate " << label(q, n) << ",tau=" << tau;
        r.claim_id = id.str();
        checks.push_back(std::move(r));
        const auto alt = debruijn_verify(fam, tol, dtau, other);
        Json row;
        row["q"] = q;
        row["n"] = n;
        row["tau"] = tau;
        row["relative_error"] = alt.details.at("relative_error");
        other_errors.push_back(row);
      }
    }
  }

  // K_q → 2 as q → 1 (n = 1, C = 1). Since K_q - 2 is first order in q - 1,
  // the limit is checked on the Richardson extrapolation of the last two
  // points and on the monotone decrease of |K_q - 2|.
  const auto kq_q = get<std::vector<double>>(ctx.tol, "kq_limit_q");
  const double kq_tol = get<double>(ctx.tol, "kq_limit_tol");
  if (kq_q.size() < 2) throw InvalidArgument("debruijn: kq_limit_q needs at least two values");
  std::vector<double> kq;
  Json kq_rows = Json::array();
  for (double q : kq_q) {
    kq.push_back(kq_constant(make_params(q, Covariance::identity(1))));
    kq_rows.push_back({{"q", q}, {"K_q", kq.back()}, {"abs_error", std::abs(kq.back() - 2.0)}});
  }
  bool monotone = true;
  for (std::size_t i = 1; i < kq.size(); ++i) monotone = monotone && std::abs(kq[i] - 2) < std::abs(kq[i - 1] - 2);
  const std::size_t last = kq.size() - 1;
  const double h1 = kq_q[last - 1] - 1.0, h2 = kq_q[last] - 1.0;
  const double extrapolated = (h1 * kq[last] - h2 * kq[last - 1]) / (h1 - h2);
  checks.push_back(ctx.check("K_q extrapolated limit", Relation::Equal, extrapolated, 2.0, 0, 0, kq_tol));
  checks.push_back(ctx.check("|K_q - 2| decreasing", Relation::Equal, monotone ? 0.0 : 1.0, 0.0, 0, 0, 0));

  auto rep = make_composite("debruijn", std::move(checks));
  rep.inputs["constant"] = ctx.cfg.debruijn == DebruijnConstant::Corrected ? "corrected" : "stated";
  rep.inputs["q_values"] = qs;
  rep.inputs["n_values"] = ns;
  rep.inputs["tau_values"] = taus;
  rep.inputs["dtau_rel"] = dtau;
  rep.details[other == DebruijnConstant::Stated ? "stated_constant_relative_errors"
                                                : "corrected_constant_relative_errors"] = other_errors;
  rep.details["kq_limit"] = kq_rows;
  return rep;
}

VerificationReport scenario_cramer_rao(const Ctx& ctx) {
  const double q = ctx.q(get<double>(ctx.tol, "q"));
  const double gap_tol = get<double>(ctx.tol, "gap_tol");
  const double fisher_tol = get<double>(ctx.tol, "fisher_tol");
  const double psd_floor = get<double>(ctx.tol, "psd_floor");
  const int perturbed = get<int>(ctx.tol, "perturbed");
  std::vector<VerificationReport> checks;

  for (int n : {1, 2}) {
    if (!index_valid(q, n)) continue;
    const auto g = maximizer(q, fixture_cov(n));
    const auto gap = cramer_rao_gap(*g, q);
    checks.push_back(ctx.check("maximizer gap vanishes " + label(q, n), Relation::Equal,
                               gap.gap.cwiseAbs().maxCoeff(), 0.0, 0, 0, gap_tol));
    if (n == 1) {
      // J_q(g) = ∫g^q / (q² C) with ∫g^q in closed form.
      const double expected = power_integral(g->params()) / (q * q);
      checks.push_back(ctx.check("maximizer J_q closed form " + label(q, n), Relation::Equal,
                                 gap.fisher.matrix(0, 0), expected, 0, 0, fisher_tol));
    }
  }
  {
    const GaussianDensity gauss(Covariance::identity(1));
    const auto gap = cramer_rao_gap(gauss, 1.0);
    checks.push_back(ctx.check("Gaussian gap vanishes at q=1", Relation::Equal, gap.gap.cwiseAbs().maxCoeff(), 0.0,
                               0, 0, gap_tol));
  }

  // Perturbed densities: the gap must be positive semidefinite.
  RandomStream local = ctx.rng.substream(1);
  double min_eig = kInf;
  Json rows = Json::array();
  for (int i = 0; i < perturbed; ++i) {
    DensityPtr p;
    const int n = (i % 2 == 0) ? 1 : 2;
    const Covariance c = fixture_cov(n).scaled(std::exp(uniform_in(local, -0.5, 0.5)));
    switch (i % 5) {
      case 0:
      case 1: p = random_scale_mixture(local, c); break;
      case 2: {
        // Maximizer at another index with h'² h^{2q-3} integrable at the edge.
        const double choices[] = {0.8, 1.5, 2.5, 3.5};
        double other = choices[(i / 5) % 4];
        if (other == q) other += 0.25;
        if (!index_valid(other, n)) other = 1.5;
        p = maximizer(other, c);
        break;
      }
      case 3: {
        if (n == 1) {
          std::vector<GaussianMixtureDensity::Component> comps;
          for (int k = 0; k < 2; ++k) {
            comps.push_back({uniform_in(local, 0.2, 1.0), Vec::Constant(1, uniform_in(local, -1.5, 1.5)),
                             Covariance::scalar(std::exp(uniform_in(local, -1.0, 0.5)))});
          }
          p = std::make_shared<GaussianMixtureDensity>(comps);
        } else {
          p = std::make_shared<GaussianDensity>(c);
        }
        break;
      }
      default:
        p = n == 1 ? DensityPtr(std::make_shared<LaplaceDensity>(c.matrix()(0, 0)))
                   : DensityPtr(std::make_shared<GaussianDensity>(c));
        break;
    }
    const auto gap = cramer_rao_gap(*p, q);
    min_eig = std::min(min_eig, gap.min_eigenvalue);
    rows.push_back({{"density", p->describe()}, {"min_eigenvalue", gap.min_eigenvalue}});
  }
  checks.push_back(ctx.check("perturbed gaps positive semidefinite", Relation::GreaterEqual, min_eig, 0.0, 0, 0,
                             psd_floor));
  auto rep = make_composite("cramer-rao", std::move(checks));
  rep.inputs["q"] = q;
  rep.inputs["perturbed"] = perturbed;
  rep.details["perturbed"] = rows;
  return rep;
}

VerificationReport scenario_extensivity(const Ctx& ctx) {
  const double q = ctx.q(get<double>(ctx.tol, "q"));
  const double block = get<double>(ctx.tol, "block_tol");
  const double off = get<double>(ctx.tol, "offdiag_tol");
  std::vector<VerificationReport> checks;
  auto run = [&](const char* name, DensityPtr x, DensityPtr y) {
    auto rep = extensivity_verify(x, y, q, block, off);
    rep.claim_id = name;
    checks.push_back(std::move(rep));
  };
  run("Gaussian x Gaussian", std::make_shared<GaussianDensity>(Covariance::identity(1)),
      std::make_shared<GaussianDensity>(Covariance::scalar(2.0)));
  if (index_valid(q, 1) && q != 1.0) {
    run("maximizer x Gaussian", maximizer(q, Covariance::identity(1)),
        std::make_shared<GaussianDensity>(Covariance::scalar(0.5)));
  }
  auto rep = make_composite("extensivity", std::move(checks));
  rep.inputs["q"] = q;
  return rep;
}

VerificationReport scenario_duality(const Ctx& ctx) {
  const double q = ctx.q(0.5);
  const int n = ctx.n(1);
  if (!(q < 1.0)) throw InvalidArgument("duality: q must be < 1");
  const double exact_tol = get<double>(ctx.tol, "exact_tol");
  const long long count = ctx.count();
  const Covariance c = fixture_cov(n);
  const auto p = make_params(q, c);
  const auto dual = dualize(p);
  // Θ_{(m-2)C} carries dof m to the bounded family with n + 2p/(p-1) = m + n.
  const double m = p.dof;
  const double p_expected = m / (m - 2.0);
  const Mat c_expected = c.matrix() * (m - 2.0) / (m + n);

  std::vector<VerificationReport> checks;
  checks.push_back(ctx.check("dual index", Relation::Equal, dual.dual.q(), p_expected, 0, 0, exact_tol));
  checks.push_back(ctx.check("dual covariance", Relation::Equal,
                             (dual.dual.cov.matrix() - c_expected).cwiseAbs().maxCoeff(), 0.0, 0, 0, exact_tol));

  const auto mapped = theta_map(dual.map_matrix, sample_maximizer(p, count, ctx.rng.substream(1)));
  const MaximizerDensity target(dual.dual);
  if (n == 1) {
    std::vector<double> xs(mapped.data.data(), mapped.data.data() + mapped.count());
    const double r = std::sqrt(support_s(dual.dual) * dual.dual.cov.matrix()(0, 0));
    const auto ks = ks_test_pdf(xs, [&](double x) { return target.pdf(Vec::Constant(1, x)); }, -r, r);
    checks.push_back(ctx.check("mapped sample KS p-value", Relation::GreaterEqual, ks.p_value,
                               get<double>(ctx.tol, "ks_p_min"), 0, 0, 0));
  } else {
    std::vector<double> radial(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < mapped.count(); ++i) {
      radial[static_cast<std::size_t>(i)] = dual.dual.cov.quad_form(mapped.data.row(i).transpose());
    }
    const auto ks = ks_test_pdf(radial, radial_law(target), 0.0, target.support_s());
    checks.push_back(ctx.check("mapped sample radial KS p-value", Relation::GreaterEqual, ks.p_value,
                               get<double>(ctx.tol, "ks_p_min"), 0, 0, 0));
  }
  const auto mom = sample_moments(mapped.data);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::ostringstream id;
      id << "mapped covariance (" << i << "," << j << ")";
      checks.push_back(ctx.check(id.str(), Relation::Equal, mom.cov(i, j), c_expected(i, j), mom.cov_se(i, j), 0, 0));
    }
  }
  auto rep = make_composite("duality", std::move(checks));
  rep.inputs["q"] = q;
  rep.inputs["n"] = n;
  rep.inputs["count"] = count;
  rep.details["dual_index"] = dual.dual.q();
  rep.details["dual_covariance"] = mat_json(dual.dual.cov.matrix());
  rep.count = count;
  return rep;
}

// Random 1-D Gaussian mixture with 1-3 components.
std::vector<GaussianMixtureDensity::Component> random_mixture(RandomStream& rng) {
  const int k = 1 + static_cast<int>(rng.uniform() * 3.0);
  std::vector<GaussianMixtureDensity::Component> comps;
  for (int i = 0; i < k; ++i) {
    comps.push_back({uniform_in(rng, 0.1, 1.0), Vec::Constant(1, 2.0 * rng.normal()),
                     Covariance::scalar(std::exp(uniform_in(rng, -1.0, 1.0)))});
  }
  return comps;
}

double max_variance(const std::vector<GaussianMixtureDensity::Component>& comps) {
  double v = 0.0;
  for (const auto& c : comps) v = std::max(v, c.cov.matrix()(0, 0));
  return v;
}

VerificationReport scenario_gibbs(const Ctx& ctx) {
  const int pairs = get<int>(ctx.tol, "pairs");
  const auto qs = get<std::vector<double>>(ctx.tol, "q_values");
  const double floor = get<double>(ctx.tol, "floor");
  const double inv_tol = get<double>(ctx.tol, "invariance_tol");
  const double q_min = *std::min_element(qs.begin(), qs.end());
  if (!(q_min > 0.0)) throw InvalidArgument("gibbs: q values must be positive");

  RandomStream local = ctx.rng.substream(1);
  double min_dq = kInf, max_self = 0.0;
  Json per_q = Json::object();
  std::vector<double> min_by_q(qs.size(), kInf);
  for (int i = 0; i < pairs; ++i) {
    auto cf = random_mixture(local);
    const auto cg = random_mixture(local);
    // For q < 1 the integral of g^{q-1} f converges only if f's widest
    // component is narrower than that of g by the factor (1 - q).
    if (q_min < 1.0) {
      const double limit = 0.8 * max_variance(cg) / (1.0 - q_min);
      const double widest = max_variance(cf);
      if (widest > limit) {
        for (auto& c : cf) c.cov = c.cov.scaled(limit / widest);
      }
    }
    const GaussianMixtureDensity f(cf), g(cg);
    for (std::size_t j = 0; j < qs.size(); ++j) {
      const double d = dq_relative(f, g, qs[j]).value;
      min_dq = std::min(min_dq, d);
      min_by_q[j] = std::min(min_by_q[j], d);
      if (i < 10) max_self = std::max(max_self, std::abs(dq_relative(f, f, qs[j]).value));
    }
  }
  for (std::size_t j = 0; j < qs.size(); ++j) {
    std::ostringstream key;
    key << qs[j];
    per_q[key.str()] = min_by_q[j];
  }
  std::vector<VerificationReport> checks;
  checks.push_back(ctx.check("relative q-entropy non-negative", Relation::GreaterEqual, min_dq, 0.0, 0, 0, floor));
  checks.push_back(ctx.check("relative q-entropy of f to itself", Relation::Equal, max_self, 0.0, 0, 0, floor));

  // Relative entropy is unchanged by Θ_D (here D = 1).
  const Covariance d1 = Covariance::identity(1);
  auto invariance = [&](const char* name, DensityPtr x, DensityPtr y) {
    const double before = kl_quadrature(*x, *y).value;
    const double after = kl_quadrature(ThetaPushforward(x, d1), ThetaPushforward(y, d1)).value;
    checks.push_back(ctx.check(name, Relation::Equal, after, before, 0, 0, inv_tol));
  };
  invariance("theta map invariance: Gaussians", std::make_shared<GaussianDensity>(Covariance::identity(1)),
             std::make_shared<GaussianDensity>(Covariance::scalar(2.0)));
  invariance("theta map invariance: Laplace vs Gaussian", std::make_shared<LaplaceDensity>(1.0),
             std::make_shared<GaussianDensity>(Covariance::scalar(1.5)));

  // Chain rule: the joint relative entropy dominates the marginal one.
  Mat joint(2, 2);
  joint << 1.0, 0.6, 0.6, 1.5;
  const GaussianDensity fxy((Covariance(joint)));
  Vec uv(2);
  uv << 2.0, 1.0;
  const GaussianDensity guv(Covariance::diagonal(uv));
  const double d_joint = kl_quadrature(fxy, guv).value;
  const double d_marginal =
      kl_quadrature(GaussianDensity(Covariance::identity(1)), GaussianDensity(Covariance::scalar(2.0))).value;
  checks.push_back(
      ctx.check("chain rule: joint dominates marginal", Relation::GreaterEqual, d_joint, d_marginal, 0, 0, 0));

  auto rep = make_composite("gibbs", std::move(checks));
  rep.inputs["pairs"] = pairs;
  rep.inputs["q_values"] = qs;
  rep.details["min_dq"] = min_dq;
  rep.details["min_dq_by_q"] = per_q;
  rep.details["chain_rule"] = {{"joint", d_joint}, {"marginal", d_marginal}};
  return rep;
}

VerificationReport scenario_gaussian_limit(const Ctx& ctx) {
  const auto qs = get<std::vector<double>>(ctx.tol, "q_values");
  if (qs.size() < 2) throw InvalidArgument("gaussian-limit: need at least two q values");
  const long long count = ctx.count();
  const Covariance c = Covariance::identity(1);
  const GaussianDensity gauss(c);
  const auto s = sample_density(gauss, count, ctx.rng.substream(1));
  const auto t = sample_density(gauss, count, ctx.rng.substream(2));
  const auto rows = gaussian_limit_probe(qs, s, t, c, c, ctx.rng.substream(3));
  Json table = Json::array();
  for (const auto& r : rows) table.push_back({{"q", r.q}, {"kl", r.kl}, {"stderr", r.std_error}});
  std::vector<VerificationReport> checks;
  checks.push_back(ctx.check("KL to the sum vanishes at the smallest q", Relation::Equal, rows.back().kl, 0.0,
                             rows.back().std_error, 0, 0));
  checks.push_back(ctx.check("KL at the largest q is not below KL at the smallest q", Relation::GreaterEqual,
                             rows.front().kl, rows.back().kl, rows.front().std_error, rows.back().std_error, 0));
  auto rep = make_composite("gaussian-limit", std::move(checks));
  rep.inputs["q_values"] = qs;
  rep.inputs["count"] = count;
  rep.details["probe"] = table;
  rep.count = count;
  return rep;
}

// ---------------------------------------------------------------------------
// registry

using ScenarioFn = std::function<VerificationReport(const Ctx&)>;

struct Entry {
  ClaimInfo info;
  const char* section;
  ScenarioFn run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    const Json manifest = Json::parse(embedded::kClaimsJson);
    auto statement = [&](const std::string& id) -> std::string {
      for (const auto& c : manifest) {
        if (c.at("id") == id) return c.at("statement").get<std::string>();
      }
      return "";
    };
    auto add = [&](const char* id, const char* sec, ScenarioFn fn) {
      e.push_back({{id, statement(id)}, sec, std::move(fn)});
    };
    add("maxent", "maxent", scenario_maxent);
    add("orthogonality", "orthogonality", scenario_orthogonality);
    add("stability-star", "stability", [](const Ctx& c) { return scenario_stability(c, "stability-star", 2.0); });
    add("stability-circle", "stability",
        [](const Ctx& c) { return scenario_stability(c, "stability-circle", 0.5); });
    add("epi", "epi", scenario_epi);
    add("mapgood", "mapgood", scenario_mapgood);
    add("heat", "heat", scenario_heat);
    add("debruijn", "debruijn", scenario_debruijn);
    add("cramer-rao", "cramer_rao", scenario_cramer_rao);
    add("extensivity", "extensivity", scenario_extensivity);
    add("duality", "duality", scenario_duality);
    add("gibbs", "gibbs", scenario_gibbs);
    add("gaussian-limit", "gaussian_limit", scenario_gaussian_limit);
    return e;
  }();
  return entries;
}

Json config_json(const ScenarioConfig& cfg) {
  Json j;
  j["seed"] = cfg.seed;
  if (cfg.count) j["count"] = *cfg.count;
  if (cfg.q) j["q"] = *cfg.q;
  if (cfg.n) j["n"] = *cfg.n;
  j["mu_variant"] = cfg.mu == MuVariant::Proof ? "proof" : "statement";
  j["debruijn_constant"] = cfg.debruijn == DebruijnConstant::Corrected ? "corrected" : "stated";
  return j;
}

VerificationReport run_entry(std::size_t index, const ScenarioConfig& config) {
  const Entry& e = registry()[index];
  const Json tol = config.tolerances.is_object() && !config.tolerances.empty() ? config.tolerances
                                                                                : default_tolerances();
  const double k = tol.contains("se_multiplier") ? get<double>(tol, "se_multiplier") : 3.0;
  Ctx ctx{config, section(tol, e.section), k, RandomStream(config.seed).substream(index + 1)};
  VerificationReport rep = e.run(ctx);
  rep.claim_id = e.info.id;
  rep.seed = config.seed;
  rep.se_multiplier = k;
  rep.inputs["config"] = config_json(config);
  return rep;
}

}  // namespace

const std::vector<ClaimInfo>& registered_claims() {
  static const std::vector<ClaimInfo> claims = [] {
    std::vector<ClaimInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return claims;
}

std::vector<std::string> manifest_claims() {
  std::vector<std::string> ids;
  for (const auto& c : Json::parse(embedded::kClaimsJson)) ids.push_back(c.at("id").get<std::string>());
  return ids;
}

Json default_tolerances() { return Json::parse(embedded::kTolerancesJson); }

Json load_tolerances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tolerance file " + path);
  Json user;
  try {
    user = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("tolerance file " + path + ": " + e.what());
  }
  if (!user.is_object()) throw InvalidArgument("tolerance file " + path + " must hold a JSON object");
  Json merged = default_tolerances();
  merged.merge_patch(user);
  return merged;
}

VerificationReport run_scenario(const std::string& claim_id, const ScenarioConfig& config) {
  const auto& reg = registry();
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (reg[i].info.id == claim_id) return run_entry(i, config);
  }
  throw InvalidArgument("unknown claim id '" + claim_id + "'");
}

RunAllResult run_all(const ScenarioConfig& config) {
  const auto& reg = registry();
  RunAllResult result;
  result.reports.resize(reg.size());
  for_each_chunk(reg.size(), 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      try {
        result.reports[i] = run_entry(i, config);
      } catch (const std::exception& ex) {
        VerificationReport rep;
        rep.claim_id = reg[i].info.id;
        rep.seed = config.seed;
        rep.inputs["config"] = config_json(config);
        rep.lhs = 1.0;
        rep.rhs = 0.0;
        rep.pass = false;
        rep.details["error"] = ex.what();
        result.reports[i] = std::move(rep);
      }
    }
  });
  Json claims = Json::array();
  int passed = 0;
  for (const auto& r : result.reports) {
    Json row;
    row["claim_id"] = r.claim_id;
    row["pass"] = r.pass;
    if (r.details.contains("error")) row["error"] = r.details["error"];
    claims.push_back(row);
    passed += r.pass ? 1 : 0;
  }
  result.all_pass = passed == static_cast<int>(result.reports.size());
  result.summary["config"] = config_json(config);
  result.summary["claims"] = claims;
  result.summary["passed"] = passed;
  result.summary["failed"] = static_cast<int>(result.reports.size()) - passed;
  result.summary["all_pass"] = result.all_pass;
  return result;
}

}  // namespace renyi
