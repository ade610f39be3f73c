#include "renyi/report.hpp"

#include <cmath>

namespace renyi {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Equal: return "equal";
    case Relation::LessEqual: return "less_equal";
    case Relation::GreaterEqual: return "greater_equal";
    case Relation::Greater: return "greater";
  }
  return "unknown";
}

bool evaluate_relation(Relation r, double lhs, double rhs, double se_lhs, double se_rhs, double tol,
                       double se_multiplier) {
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) return false;
  const double slack = tol + se_multiplier * std::hypot(se_lhs, se_rhs);
  switch (r) {
    case Relation::Equal: return std::abs(lhs - rhs) <= slack;
    case Relation::LessEqual: return lhs <= rhs + slack;
    case Relation::GreaterEqual: return lhs >= rhs - slack;
    case Relation::Greater: return lhs - rhs > slack;
  }
  return false;
}

VerificationReport make_check(std::string claim_id, Relation r, double lhs, double rhs, double se_lhs,
                              double se_rhs, double tol, double se_multiplier) {
  VerificationReport rep;
  rep.claim_id = std::move(claim_id);
  rep.relation = r;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.stderr_lhs = se_lhs;
  rep.stderr_rhs = se_rhs;
  rep.tolerance = tol;
  rep.se_multiplier = se_multiplier;
  rep.pass = evaluate_relation(r, lhs, rhs, se_lhs, se_rhs, tol, se_multiplier);
  return rep;
}

VerificationReport make_composite(std::string claim_id, std::vector<VerificationReport> checks) {
  int failed = 0;
  long long count = 0;
  for (const auto& c : checks) {
    failed += c.pass ? 0 : 1;
    count += c.count;
  }
  auto rep = make_check(std::move(claim_id), Relation::Equal, failed, 0.0, 0.0, 0.0, 0.0, 0.0);
  rep.count = count;
  rep.checks = std::move(checks);
  return rep;
}

namespace {

Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

Json VerificationReport::to_json() const {
  Json j;
  j["claim_id"] = claim_id;
  j["inputs"] = inputs;
  j["lhs"] = number(lhs);
  j["rhs"] = number(rhs);
  j["stderr_lhs"] = number(stderr_lhs);
  j["stderr_rhs"] = number(stderr_rhs);
  j["tolerance"] = number(tolerance);
  j["pass"] = pass;
  j["seed"] = seed;
  j["count"] = count;
  j["relation"] = to_string(relation);
  j["se_multiplier"] = se_multiplier;
  if (!details.empty()) j["details"] = details;
  if (!checks.empty()) {
    Json arr = Json::array();
    for (const auto& c : checks) arr.push_back(c.to_json());
    j["checks"] = arr;
  }
  return j;
}

}  // namespace renyi
