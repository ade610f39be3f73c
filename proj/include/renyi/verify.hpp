#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "renyi/qcalculus.hpp"
#include "renyi/report.hpp"

namespace renyi {

/// Settings shared by all scenarios. Unset optionals keep the defaults of
/// the tolerance file.
struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::optional<long long> count;  // Monte Carlo sample size override
  std::optional<double> q;
  std::optional<int> n;
  MuVariant mu = MuVariant::Proof;
  DebruijnConstant debruijn = DebruijnConstant::Corrected;
  Json tolerances;  // empty: use the embedded defaults
};

struct ClaimInfo {
  std::string id;
  std::string statement;
};

/// Registered claims in registry order.
const std::vector<ClaimInfo>& registered_claims();
/// Claim ids of the embedded manifest (config/claims.json).
std::vector<std::string> manifest_claims();

/// Embedded tolerance defaults, optionally merged with a user file.
Json default_tolerances();
Json load_tolerances(const std::string& path);

/// Runs one scenario; InvalidArgument for an unknown claim id.
VerificationReport run_scenario(const std::string& claim_id, const ScenarioConfig& config);

struct RunAllResult {
  std::vector<VerificationReport> reports;
  Json summary;
  bool all_pass = false;
};

RunAllResult run_all(const ScenarioConfig& config);

}  // namespace renyi
