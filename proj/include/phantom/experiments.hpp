// Copyright 2026 The phantom-fields Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include <json.hpp>

#include "phantom/diagnostics.hpp"

namespace phantom {

/// Library version embedded in every summary.
const char* version();

/// Raised for malformed configs; `where` is a JSON pointer to the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Output of one subcommand. exit_code is 0 when every verdict holds, 2 otherwise.
struct ExperimentResult {
  std::string csv;
  nlohmann::json summary;
  int exit_code = 0;
};

/// Defaults reproducing the example field with (gamma1, gamma2) = (0.26, 0.10).
nlohmann::json default_config();

/// Merges a user config onto the defaults (RFC 7386 merge patch).
nlohmann::json resolve_config(const nlohmann::json& user);

FieldModel model_from_json(const nlohmann::json& j);

ExperimentResult run_simulate(const nlohmann::json& config);
/// Phantom distance of the example field along the diagonal against Phi,
/// plus the Berman domination check on the same draws.
ExperimentResult run_sectorial(const nlohmann::json& config);
/// Quadrature law of the equicorrelated array along psi versus H and H0.
ExperimentResult run_directional(const nlohmann::json& config);
ExperimentResult run_extremal_index(const nlohmann::json& config);
ExperimentResult run_beta(const nlohmann::json& config);
ExperimentResult run_berman(const nlohmann::json& config);

/// Dispatch by subcommand name; throws ConfigError on an unknown name.
ExperimentResult run_experiment(const std::string& command, const nlohmann::json& config);

}  // namespace phantom
