#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace fbmclt {

using Json = nlohmann::ordered_json;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  Json details = Json::object();

  bool within_budget() const noexcept { return seconds < budget_seconds; }
};

struct VerifyOptions {
  std::uint64_t seed = 20260917;
};

/// Ids of the pure quadrature and identity checks (the quick tier).
std::vector<int> quick_criteria();
/// Ids 1..8.
std::vector<int> all_criteria();

const char* criterion_name(int id);
double criterion_budget_seconds(int id);

/// Runs one acceptance criterion and times it. Throws PreconditionError for an unknown id.
CriterionResult run_criterion(int id, const VerifyOptions& options = {});

CriterionResult check_constant_identity();
CriterionResult check_norm_identity();
CriterionResult check_moment_closed_form();
CriterionResult check_scaling_factorization();
CriterionResult check_generator_exactness(std::uint64_t seed);
CriterionResult check_local_time_oracle(std::uint64_t seed);
CriterionResult check_clt_reproduction(std::uint64_t seed);
CriterionResult check_gaussian_probes(std::uint64_t seed);

}  // namespace fbmclt
