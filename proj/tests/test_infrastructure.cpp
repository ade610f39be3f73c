#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "renyi/covariance.hpp"
#include "renyi/knn.hpp"
#include "renyi/parallel.hpp"
#include "renyi/quadrature.hpp"
#include "renyi/random.hpp"
#include "renyi/report.hpp"
#include "renyi/sampling.hpp"
#include "renyi/stats.hpp"

using namespace renyi;

TEST_CASE("random streams are reproducible and substreams differ") {
  RandomStream a(5), b(5), c(6);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  const RandomStream root(5);
  auto s1 = root.substream(1), s1b = root.substream(1), s2 = root.substream(2);
  CHECK(s1.next_u64() == s1b.next_u64());
  CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("uniform, normal and gamma variates have the right moments") {
  RandomStream rng(3);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sg = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sg += rng.gamma(0.4);
  }
  CHECK(std::abs(su / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sn / n) < 4 / std::sqrt(n));
  CHECK(std::abs(sn2 / n - 1.0) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(sg / n - 0.4) < 4 * std::sqrt(0.4 / n));
}

TEST_CASE("for_each_chunk visits every index once, whatever the thread cap") {
  for (unsigned threads : {1u, 3u}) {
    set_thread_limit(threads);
    std::vector<int> hits(10007, 0);
    for_each_chunk(hits.size(), 100, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) ++hits[i];
    });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  set_thread_limit(0);
}

TEST_CASE("covariance: validation, quadratic form and CSV parsing") {
  Mat m(2, 2);
  m << 2.0, 0.5, 0.5, 1.0;
  const Covariance c(m);
  Vec x(2);
  x << 0.3, -1.2;
  CHECK(std::abs(c.quad_form(x) - x.dot(m.inverse() * x)) < 1e-14);
  CHECK(std::abs(c.log_det() - std::log(m.determinant())) < 1e-14);
  CHECK((c.inverse() - m.inverse()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(c.same_as(parse_covariance_csv("2,0.5\n0.5,1\n")));

  Mat asym = m;
  asym(0, 1) = 0.6;
  CHECK_THROWS_AS(Covariance{asym}, InvalidArgument);
  Mat indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(Covariance{indefinite}, InvalidArgument);
  CHECK_THROWS_AS(parse_covariance_csv("1,0\n0\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_covariance_csv("1,x\nx,1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_covariance_csv(""), InvalidArgument);
  CHECK_THROWS_AS(read_covariance_csv("/nonexistent/cov.csv"), IoError);
}

TEST_CASE("quadrature: reference integrals") {
  CHECK(std::abs(integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0).value - 2.0 / 3.0) < 1e-12);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(std::abs(integrate([](double x) { return std::exp(-x * x); }, -inf, inf).value - std::sqrt(std::numbers::pi)) <
        1e-12);
  CHECK(std::abs(unit_sphere_area(1) - 2.0) < 1e-15);
  CHECK(std::abs(unit_sphere_area(3) - 4.0 * std::numbers::pi) < 1e-13);
  // Standard normal mass in two and three dimensions.
  for (int n : {2, 3}) {
    const double mass = integrate_radial(n, 0.0, [n](double s) { return std::pow(2 * std::numbers::pi, -0.5 * n) * std::exp(-0.5 * s); }, inf).value;
    CHECK(std::abs(mass - 1.0) < 1e-10);
  }
  std::vector<double> lo{0.0, 0.0}, hi{1.0, 2.0};
  const auto box = integrate_box(lo, hi, [](std::span<const double> x) { return x[0] * x[1]; });
  CHECK(std::abs(box.value - 1.0) < 1e-10);
}

TEST_CASE("stats: Kolmogorov tail and KS tests") {
  // √n D > 1.3581 has asymptotic probability 0.05.
  CHECK(std::abs(kolmogorov_p_value(1.3581 / std::sqrt(1e8), 100000000) - 0.05) < 1e-3);
  CHECK(kolmogorov_p_value(0.0, 100) == doctest::Approx(1.0));
  RandomStream rng(9);
  std::vector<double> u(5000);
  for (auto& x : u) x = rng.uniform();
  const auto ok = ks_test(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(ok.p_value > 0.01);
  const auto bad = ks_test(u, [](double x) { return std::clamp(x * x, 0.0, 1.0); });
  CHECK(bad.p_value < 1e-6);
  const auto viapdf = ks_test_pdf(u, [](double) { return 1.0; }, 0.0, 1.0);
  CHECK(std::abs(viapdf.statistic - ok.statistic) < 1e-9);

  const auto m = mean_estimate({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("kd-tree neighbour distances match brute force") {
  RandomStream rng(4);
  RowMat pts(500, 3);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (int j = 0; j < 3; ++j) pts(i, j) = rng.normal();
  const KdTree tree(pts);
  for (Eigen::Index i = 0; i < 40; ++i) {
    std::vector<double> d;
    for (Eigen::Index j = 0; j < pts.rows(); ++j) {
      if (j != i) d.push_back((pts.row(i) - pts.row(j)).norm());
    }
    std::sort(d.begin(), d.end());
    CHECK(std::abs(tree.kth_distance(pts.row(i).data(), 5, static_cast<std::size_t>(i)) - d[4]) < 1e-12);
  }
}

TEST_CASE("report: relations, composite and JSON layout") {
  CHECK(evaluate_relation(Relation::Equal, 1.0, 1.05, 0.0, 0.0, 0.1));
  CHECK_FALSE(evaluate_relation(Relation::Equal, 1.0, 1.5, 0.0, 0.0, 0.1));
  CHECK(evaluate_relation(Relation::Equal, 1.0, 1.5, 0.1, 0.12, 0.1, 3.0));
  CHECK(evaluate_relation(Relation::LessEqual, 1.0, 0.9, 0.05, 0.0, 0.0, 3.0));
  CHECK_FALSE(evaluate_relation(Relation::LessEqual, 1.0, 0.9, 0.0, 0.0, 0.0));
  CHECK(evaluate_relation(Relation::GreaterEqual, 0.9, 1.0, 0.0, 0.0, 0.1));
  CHECK(evaluate_relation(Relation::Greater, 2.0, 1.0, 0.1, 0.1, 0.0, 3.0));
  CHECK_FALSE(evaluate_relation(Relation::Greater, 2.0, 1.0, 0.3, 0.3, 0.0, 3.0));

  auto a = make_check("a", Relation::Equal, 1.0, 1.0, 0, 0, 0);
  auto b = make_check("b", Relation::LessEqual, 2.0, 1.0, 0, 0, 0);
  CHECK(a.pass);
  CHECK_FALSE(b.pass);
  const auto comp = make_composite("c", {a, b});
  CHECK_FALSE(comp.pass);
  CHECK(comp.lhs == 1.0);

  const Json j = a.to_json();
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  const std::vector<std::string> head{"claim_id", "inputs", "lhs", "rhs", "stderr_lhs", "stderr_rhs",
                                      "tolerance", "pass", "seed", "count"};
  REQUIRE(keys.size() >= head.size());
  CHECK(std::equal(head.begin(), head.end(), keys.begin()));

  auto nan = make_check("nan", Relation::Equal, std::nan(""), 0.0, 0, 0, 1.0);
  CHECK_FALSE(nan.pass);
  CHECK(nan.to_json()["lhs"].is_string());
}

TEST_CASE("sample batches round-trip through CSV bit for bit") {
  const auto dir = std::filesystem::temp_directory_path() / "renyi_io_test";
  std::filesystem::create_directories(dir);
  const auto p = make_params(2.0, Covariance::identity(2));
  const auto batch = sample_maximizer(p, 257, RandomStream(21));
  write_batch(batch, dir / "b.csv");
  const auto back = read_batch(dir / "b.csv");
  CHECK(back.count() == 257);
  CHECK(back.dim() == 2);
  CHECK((back.data.array() == batch.data.array()).all());
  CHECK(back.seed == 21);
  std::ifstream side(sidecar_path(dir / "b.csv"));
  const auto j = Json::parse(side);
  CHECK(j["count"] == 257);
  CHECK(j["params"]["q"] == 2.0);

  std::ofstream(dir / "bad.csv") << "1,2\n3\n";
  CHECK_THROWS_AS(read_batch(dir / "bad.csv"), InvalidArgument);
  std::ofstream(dir / "nan.csv") << "1\nabc\n";
  CHECK_THROWS_AS(read_batch(dir / "nan.csv"), InvalidArgument);
  CHECK_THROWS_AS(read_batch(dir / "missing.csv"), IoError);
  CHECK_THROWS_AS(write_batch(batch, "/nonexistent/dir/x.csv"), IoError);
  std::filesystem::remove_all(dir);
}
