#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "svasym/model.hpp"

namespace svasym {

/// OU factor (beta = 0, m = 0, nu = sqrt 2) with sigma = |y|^{1/2}; invariant law N(0, 1).
ModelParams ou_fixture();
/// Square-root factor (beta = 1/2, m = 1, nu = 1) with sigma = |y|^{1/4}; invariant law Gamma(2, 1/2).
ModelParams cir_fixture();
/// beta = 3/4, m = 1, nu = 1 with sigma = |y|^{1/8}.
ModelParams beta75_fixture();
/// Constant sigma = 0.2 on the OU factor.
ModelParams constant_fixture();

struct CriterionResult {
  std::string id;
  std::string description;
  nlohmann::json measured = nlohmann::json::object();
  nlohmann::json expected = nlohmann::json::object();
  nlohmann::json tolerance = nlohmann::json::object();
  bool pass = false;
  double runtime_s = 0.0;
  std::optional<std::uint64_t> seed;
};

struct AcceptanceOptions {
  std::uint64_t seed = 42;
  /// Criterion ids to run; empty runs all.
  std::vector<std::string> only;
  /// Additional fixture checked by the validation criterion.
  std::optional<ModelParams> extra_fixture;
};

/// AC00 (fixture validation) through AC12, in id order.
std::vector<std::string> criterion_ids();

/// Runs one criterion; failures (including thrown errors) are recorded, never propagated.
CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& options);

/// Runs the selected criteria one after another and returns them ordered by id.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// {"criteria": [{criterion_id, description, measured, expected, tolerance, pass, runtime_s, seed}], ...}
nlohmann::json acceptance_report(const std::vector<CriterionResult>& results);

}  // namespace svasym
