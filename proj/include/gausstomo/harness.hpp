// Copyright 2026 The gausstomo Authors
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

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gausstomo/common.hpp"
#include "gausstomo/design_opt.hpp"

namespace gausstomo {

// Campaign strategies pair an input-design rule with a reconstruction model:
// random/geometric/best designs crossed with the trace-preserving (9
// parameter) or unconstrained (14 parameter) fit.
inline const std::vector<std::string>& known_strategies() {
  static const std::vector<std::string> s{"rml-tp", "rml-nontp", "gml-nontp",
                                          "bml-tp", "bml-nontp"};
  return s;
}

struct ExperimentConfig {
  std::vector<std::string> strategies{"rml-nontp"};
  int group = 3;
  int processes = 1;
  int j = 6;
  double l = 1.0;
  int m = 20;
  double extent = 5.0;
  std::vector<long long> shots{10000};
  int repetitions = 10;
  int random_designs = 4;     // random designs averaged per rml row
  bool per_parameter = true;  // normalize MSE by the parameter count
  double x0p0_lo = -2.0;
  double x0p0_hi = 2.0;
  int design_starts = 16;     // geometric optimizer starts
  int bml_starts = 4;         // truth-informed optimizer starts
  int bml_max_evals = 600;    // per start
  double min_gamma = 0.25;    // resample processes whose output escapes the grid
  std::string nontp_method = "ml";  // "li", "li-proj" or "ml"
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct ResultRow {
  std::string strategy;
  int group = 0;
  int process = 0;
  int j = 0;
  long long n = 0;
  double l = 0.0;
  int k = 0;
  double mse_empirical = 0.0;
  double mse_formula = 0.0;
  double stderr_ = 0.0;
  double wall_time = 0.0;  // placeholder column, kept at zero so output
                           // files are bit-reproducible; timing goes to the
                           // progress log
  std::uint64_t seed = 0;
  int failures = 0;  // repetitions that raised a numerical error (json only)
};

nlohmann::json row_to_json(const ResultRow& r);
ResultRow row_from_json(const nlohmann::json& j);

struct CampaignResult {
  std::vector<ResultRow> rows;
  std::vector<InputDesign> designs;
};

// Runs simulate -> reconstruct -> aggregate for every (process, strategy,
// design, N); deterministic for a fixed (config, seed). Per-repetition
// numerical failures are recorded and skipped. Progress lines go to `log`
// when provided.
CampaignResult run_campaign(const ExperimentConfig& cfg,
                            std::ostream* log = nullptr);

// results.csv with the fixed column order
// strategy,group,process,J,N,L,K,mse_empirical,mse_formula,stderr,wall_time,seed
// plus results.json with the config, designs and rows.
void emit_results(const std::vector<ResultRow>& rows,
                  const ExperimentConfig& cfg,
                  const std::vector<InputDesign>& designs,
                  const std::string& csv_path, const std::string& json_path);

std::string results_csv_string(const std::vector<ResultRow>& rows);

int cli_main(int argc, const char* const* argv);

}  // namespace gausstomo
