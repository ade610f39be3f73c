#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace renyi {

using Json = nlohmann::ordered_json;

enum class Relation { Equal, LessEqual, GreaterEqual, Greater };
std::string to_string(Relation r);

/// Pass/fail record of one checked statement. `pass` is computed from
/// (relation, lhs, rhs, stderr_lhs, stderr_rhs, tolerance, se_multiplier):
///   Equal         |lhs - rhs| ≤ tol + k·se
///   LessEqual     lhs ≤ rhs + tol + k·se
///   GreaterEqual  lhs ≥ rhs - tol - k·se
///   Greater       lhs - rhs > tol + k·se
/// with se = √(stderr_lhs² + stderr_rhs²) and k = se_multiplier.
/// A composite report has lhs = number of failed checks and rhs = 0.
struct VerificationReport {
  std::string claim_id;
  Json inputs = Json::object();
  double lhs = 0.0;
  double rhs = 0.0;
  double stderr_lhs = 0.0;
  double stderr_rhs = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::Equal;
  double se_multiplier = 3.0;
  bool pass = false;
  std::uint64_t seed = 0;
  long long count = 0;
  Json details = Json::object();
  std::vector<VerificationReport> checks;

  Json to_json() const;
};

bool evaluate_relation(Relation r, double lhs, double rhs, double se_lhs, double se_rhs, double tol,
                       double se_multiplier = 3.0);

VerificationReport make_check(std::string claim_id, Relation r, double lhs, double rhs, double se_lhs,
                              double se_rhs, double tol, double se_multiplier = 3.0);

/// Report whose pass flag is "no sub-check failed".
VerificationReport make_composite(std::string claim_id, std::vector<VerificationReport> checks);

}  // namespace renyi
