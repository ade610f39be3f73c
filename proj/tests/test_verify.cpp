#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "renyi/verify.hpp"

using namespace renyi;

namespace {

const std::set<std::string> kClaims{"maxent",     "orthogonality", "stability-star", "stability-circle", "epi",
                                    "mapgood",    "heat",          "debruijn",       "cramer-rao",       "extensivity",
                                    "duality",    "gibbs",         "gaussian-limit"};

void check_consistent(const VerificationReport& r) {
  CAPTURE(r.claim_id);
  if (r.checks.empty()) {
    CHECK(r.pass == evaluate_relation(r.relation, r.lhs, r.rhs, r.stderr_lhs, r.stderr_rhs, r.tolerance,
                                      r.se_multiplier));
    return;
  }
  int failed = 0;
  for (const auto& c : r.checks) {
    check_consistent(c);
    failed += c.pass ? 0 : 1;
  }
  CHECK(r.lhs == failed);
  CHECK(r.pass == (failed == 0));
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("registry, manifest and the expected claim set coincide") {
  std::set<std::string> reg, man;
  for (const auto& c : registered_claims()) {
    reg.insert(c.id);
    CHECK_FALSE(c.statement.empty());
  }
  for (const auto& id : manifest_claims()) man.insert(id);
  CHECK(registered_claims().size() == kClaims.size());
  CHECK(reg == kClaims);
  CHECK(man == kClaims);
}

TEST_CASE("unknown claim ids are rejected") {
  CHECK_THROWS_AS(run_scenario("no-such-claim", {}), InvalidArgument);
}

TEST_CASE("tolerance files are merged over the defaults") {
  const Json d = default_tolerances();
  CHECK(d.contains("se_multiplier"));
  const auto p = temp_file("renyi_tol_ok.json", R"({"heat": {"max_rel_residual": 0.5}})");
  const Json m = load_tolerances(p.string());
  CHECK(m["heat"]["max_rel_residual"].get<double>() == 0.5);
  CHECK(m["heat"]["points_per_axis"] == d["heat"]["points_per_axis"]);
  CHECK(m["debruijn"] == d["debruijn"]);

  CHECK_THROWS_AS(load_tolerances("/nonexistent/dir/tol.json"), IoError);
  CHECK_THROWS_AS(load_tolerances(temp_file("renyi_tol_bad.json", "{not json").string()), InvalidArgument);
  CHECK_THROWS_AS(load_tolerances(temp_file("renyi_tol_arr.json", "[1, 2]").string()), InvalidArgument);

  ScenarioConfig cfg;
  cfg.tolerances = d;
  cfg.tolerances["extensivity"].erase("block_tol");
  CHECK_THROWS_AS(run_scenario("extensivity", cfg), InvalidArgument);
}

TEST_CASE("a scenario is deterministic for a fixed seed") {
  ScenarioConfig cfg;
  cfg.seed = 3;
  const auto a = run_scenario("gibbs", cfg).to_json().dump();
  const auto b = run_scenario("gibbs", cfg).to_json().dump();
  CHECK(a == b);
  cfg.seed = 4;
  CHECK(run_scenario("gibbs", cfg).to_json().dump() != a);
}

TEST_CASE("quadrature scenarios pass and their reports are self-consistent") {
  for (const char* id : {"maxent", "orthogonality", "heat", "debruijn", "cramer-rao", "extensivity", "gibbs"}) {
    const auto r = run_scenario(id, {});
    CAPTURE(id);
    CHECK(r.pass);
    CHECK(r.claim_id == id);
    check_consistent(r);
    const Json j = r.to_json();
    for (const char* key : {"claim_id", "inputs", "lhs", "rhs", "stderr_lhs", "stderr_rhs", "tolerance", "pass",
                            "seed", "count"}) {
      CHECK(j.contains(key));
    }
  }
}

TEST_CASE("the rejected variants fail") {
  ScenarioConfig cfg;
  cfg.mu = MuVariant::Statement;
  CHECK_FALSE(run_scenario("heat", cfg).pass);
  ScenarioConfig stated;
  stated.debruijn = DebruijnConstant::Stated;
  CHECK_FALSE(run_scenario("debruijn", stated).pass);
}

TEST_CASE("sampling scenarios pass at a reduced sample size") {
  ScenarioConfig cfg;
  cfg.count = 20000;
  for (const char* id : {"stability-star", "duality", "mapgood"}) {
    const auto r = run_scenario(id, cfg);
    CAPTURE(id);
    CHECK(r.pass);
    CHECK(r.count >= 20000);
    CHECK(r.count % 20000 == 0);
    check_consistent(r);
  }
}

TEST_CASE("overrides outside the domain of a scenario are rejected") {
  ScenarioConfig cfg;
  cfg.count = 1000;
  cfg.q = 0.5;
  CHECK_THROWS_AS(run_scenario("stability-star", cfg), InvalidArgument);
  cfg.q = 2.0;
  CHECK_THROWS_AS(run_scenario("stability-circle", cfg), InvalidArgument);
}
