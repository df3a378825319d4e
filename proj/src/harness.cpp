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

#include "gausstomo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gausstomo/process_gen.hpp"
#include "gausstomo/reconstruction.hpp"

namespace gausstomo {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Stable sub-stream tags.
enum SeedTag : std::uint64_t {
  kTagProcess = 11,
  kTagGeometric = 12,
  kTagRandomDesign = 13,
  kTagBml = 14,
  kTagRepetition = 15,
  kTagMlStarts = 16,
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool is_tp_strategy(const std::string& s) {
  return s == "rml-tp" || s == "bml-tp";
}

struct ProcessEntry {
  int index = 0;
  GroupSample sample;
  Vec14 truth14;
  Vec9 truth9;
};

// Output mass stays on the grid for every amplitude in the box when the
// corners and the center do.
double worst_corner_gamma(const QFunctionParams& p, double l,
                          const PhaseSpaceGrid& grid) {
  const Complex corners[5] = {{l, l}, {l, -l}, {-l, l}, {-l, -l}, {0.0, 0.0}};
  double worst = std::numeric_limits<double>::infinity();
  for (const Complex& a : corners) {
    worst = std::min(worst, bin_probabilities(p, a, grid).gamma);
  }
  return worst;
}

std::vector<ProcessEntry> sample_processes(const ExperimentConfig& cfg,
                                           const PhaseSpaceGrid& grid,
                                           std::ostream* log) {
  std::vector<int> indices;
  if (cfg.group == 1) {
    indices = {1};
  } else if (cfg.group == 2) {
    for (int i = 1; i <= std::min(cfg.processes, 6); ++i) indices.push_back(i);
  } else {
    for (int i = 1; i <= cfg.processes; ++i) indices.push_back(i);
  }

  std::vector<ProcessEntry> out;
  for (int idx : indices) {
    ProcessEntry e;
    e.index = idx;
    bool ok = false;
    for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
      const std::uint64_t s = derive_seed(
          cfg.seed, kTagProcess,
          static_cast<std::uint64_t>(idx) * 1024 + static_cast<std::uint64_t>(attempt));
      e.sample = sample_group(cfg.group, idx, s,
                              std::make_pair(cfg.x0p0_lo, cfg.x0p0_hi));
      if (cfg.min_gamma <= 0.0 ||
          worst_corner_gamma(e.sample.params, cfg.l, grid) >= cfg.min_gamma) {
        ok = true;
      } else if (cfg.group != 3) {
        ok = true;  // fixed rows cannot be resampled away
      }
    }
    if (!ok && log != nullptr) {
      *log << "process " << idx
           << ": output mass below min_gamma after resampling, keeping last\n";
    }
    e.truth14 = vector_from_params(e.sample.params);
    e.truth9 = tp_vector_from_params(e.sample.params);
    out.push_back(std::move(e));
  }
  return out;
}

struct Aggregate {
  double mean = kNan;
  double stderr_ = kNan;
  int failures = 0;
};

Aggregate aggregate_sqerr(const std::vector<double>& samples, int failures) {
  Aggregate a;
  a.failures = failures;
  if (samples.empty()) return a;
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  a.mean = mean;
  a.stderr_ = samples.size() > 1 ? std::sqrt(var / (n * (n - 1.0))) : 0.0;
  return a;
}

}  // namespace

void ExperimentConfig::validate() const {
  for (const std::string& s : strategies) {
    if (std::find(known_strategies().begin(), known_strategies().end(), s) ==
        known_strategies().end()) {
      throw std::invalid_argument("unknown strategy: " + s);
    }
  }
  if (group < 1 || group > 3) {
    throw std::invalid_argument("group must be 1, 2 or 3");
  }
  if (processes < 1 || j < 1 || repetitions < 1 || random_designs < 1) {
    throw std::invalid_argument("counts must be positive");
  }
  if (shots.empty()) {
    throw std::invalid_argument("shot list is empty");
  }
  for (long long n : shots) {
    if (n < 1) throw std::invalid_argument("shot counts must be positive");
  }
  if (!(l > 0.0) || !(extent > 0.0) || m < 2) {
    throw std::invalid_argument("invalid box or grid geometry");
  }
  if (nontp_method != "ml" && nontp_method != "li" && nontp_method != "li-proj") {
    throw std::invalid_argument("nontp_method must be li, li-proj or ml");
  }
  const bool needs_geometric =
      std::find(strategies.begin(), strategies.end(), "gml-nontp") !=
      strategies.end();
  if (needs_geometric && j < 6) {
    throw std::invalid_argument("geometric strategy needs J >= 6");
  }
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return nlohmann::json{{"strategies", cfg.strategies},
                        {"group", cfg.group},
                        {"processes", cfg.processes},
                        {"J", cfg.j},
                        {"L", cfg.l},
                        {"M", cfg.m},
                        {"extent", cfg.extent},
                        {"shots", cfg.shots},
                        {"repetitions", cfg.repetitions},
                        {"random_designs", cfg.random_designs},
                        {"per_parameter", cfg.per_parameter},
                        {"x0p0_lo", cfg.x0p0_lo},
                        {"x0p0_hi", cfg.x0p0_hi},
                        {"design_starts", cfg.design_starts},
                        {"bml_starts", cfg.bml_starts},
                        {"bml_max_evals", cfg.bml_max_evals},
                        {"min_gamma", cfg.min_gamma},
                        {"nontp_method", cfg.nontp_method},
                        {"seed", cfg.seed}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("strategies")) {
    cfg.strategies = j["strategies"].get<std::vector<std::string>>();
  }
  cfg.group = j.value("group", cfg.group);
  cfg.processes = j.value("processes", cfg.processes);
  cfg.j = j.value("J", cfg.j);
  cfg.l = j.value("L", cfg.l);
  cfg.m = j.value("M", cfg.m);
  cfg.extent = j.value("extent", cfg.extent);
  if (j.contains("shots")) {
    cfg.shots = j["shots"].get<std::vector<long long>>();
  }
  cfg.repetitions = j.value("repetitions", cfg.repetitions);
  cfg.random_designs = j.value("random_designs", cfg.random_designs);
  cfg.per_parameter = j.value("per_parameter", cfg.per_parameter);
  cfg.x0p0_lo = j.value("x0p0_lo", cfg.x0p0_lo);
  cfg.x0p0_hi = j.value("x0p0_hi", cfg.x0p0_hi);
  cfg.design_starts = j.value("design_starts", cfg.design_starts);
  cfg.bml_starts = j.value("bml_starts", cfg.bml_starts);
  cfg.bml_max_evals = j.value("bml_max_evals", cfg.bml_max_evals);
  cfg.min_gamma = j.value("min_gamma", cfg.min_gamma);
  cfg.nontp_method = j.value("nontp_method", cfg.nontp_method);
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

nlohmann::json row_to_json(const ResultRow& r) {
  return nlohmann::json{{"strategy", r.strategy},
                        {"group", r.group},
                        {"process", r.process},
                        {"J", r.j},
                        {"N", r.n},
                        {"L", r.l},
                        {"K", r.k},
                        {"mse_empirical", r.mse_empirical},
                        {"mse_formula", r.mse_formula},
                        {"stderr", r.stderr_},
                        {"wall_time", r.wall_time},
                        {"seed", r.seed},
                        {"failures", r.failures}};
}

ResultRow row_from_json(const nlohmann::json& j) {
  ResultRow r;
  r.strategy = j.at("strategy").get<std::string>();
  r.group = j.at("group").get<int>();
  r.process = j.at("process").get<int>();
  r.j = j.at("J").get<int>();
  r.n = j.at("N").get<long long>();
  r.l = j.at("L").get<double>();
  r.k = j.at("K").get<int>();
  r.mse_empirical = j.at("mse_empirical").is_null()
                        ? kNan
                        : j.at("mse_empirical").get<double>();
  r.mse_formula =
      j.at("mse_formula").is_null() ? kNan : j.at("mse_formula").get<double>();
  r.stderr_ = j.at("stderr").is_null() ? kNan : j.at("stderr").get<double>();
  r.wall_time = j.at("wall_time").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.failures = j.value("failures", 0);
  return r;
}

CampaignResult run_campaign(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const PhaseSpaceGrid grid = make_grid(cfg.m, cfg.extent);

  CampaignResult result;
  const std::vector<ProcessEntry> processes = sample_processes(cfg, grid, log);

  const bool wants_gml =
      std::find(cfg.strategies.begin(), cfg.strategies.end(), "gml-nontp") !=
      cfg.strategies.end();
  InputDesign geometric;
  if (wants_gml) {
    geometric = optimize_geometric(cfg.j, cfg.l, grid, cfg.design_starts,
                                   derive_seed(cfg.seed, kTagGeometric));
    result.designs.push_back(geometric);
    if (log != nullptr) {
      *log << "geometric design objective " << geometric.objective << "\n";
    }
  }

  for (const ProcessEntry& proc : processes) {
    for (const std::string& strat : cfg.strategies) {
      const bool tp = is_tp_strategy(strat);
      const int n_params = tp ? kTpParams : kRecoverableParams;
      const double norm =
          cfg.per_parameter ? static_cast<double>(n_params) : 1.0;

      for (long long n : cfg.shots) {
        // Designs for this (strategy, process, N).
        std::vector<std::vector<Complex>> designs;
        if (strat == "gml-nontp") {
          designs.push_back(geometric.amplitudes);
        } else if (strat == "rml-tp" || strat == "rml-nontp") {
          for (int d = 0; d < cfg.random_designs; ++d) {
            designs.push_back(random_design(
                cfg.j, cfg.l,
                derive_seed(derive_seed(cfg.seed, kTagRandomDesign,
                                        static_cast<std::uint64_t>(proc.index)),
                            static_cast<std::uint64_t>(d))));
          }
        } else {  // bml
          InputDesign best = optimize_best_informed(
              proc.sample.params, tp ? MseMode::Tp : MseMode::NonTp, cfg.j,
              cfg.l, grid, n, cfg.bml_starts,
              derive_seed(derive_seed(cfg.seed, kTagBml,
                                      static_cast<std::uint64_t>(proc.index)),
                          static_cast<std::uint64_t>(n), tp ? 1 : 0),
              cfg.bml_max_evals);
          result.designs.push_back(best);
          designs.push_back(best.amplitudes);
        }

        const int reps_per_design = std::max(
            1, cfg.repetitions / static_cast<int>(designs.size()));

        std::vector<double> sqerrs;
        int failures = 0;
        double formula_sum = 0.0;
        int formula_count = 0;

        for (size_t d = 0; d < designs.size(); ++d) {
          const std::vector<Complex>& amps = designs[d];

          try {
            const MseReport formula =
                tp ? mse_formula_tp(proc.truth9, amps, grid, n)
                   : mse_formula_nontp(proc.sample.params, amps, grid, n);
            formula_sum += formula.total / norm;
            ++formula_count;
          } catch (const NumericalError&) {
            // Non-IC random design; the empirical pass will fail too.
          }

          DesignMatrix dm;
          const bool needs_li =
              !tp && (cfg.nontp_method == "li" || cfg.nontp_method == "li-proj");
          if (needs_li) {
            dm = build_design_matrix(amps, grid);
          }

          const std::uint64_t strat_id = static_cast<std::uint64_t>(
              std::find(known_strategies().begin(), known_strategies().end(),
                        strat) -
              known_strategies().begin());
          for (int rep = 0; rep < reps_per_design; ++rep) {
            const std::uint64_t rep_seed = derive_seed(
                derive_seed(cfg.seed, kTagRepetition,
                            static_cast<std::uint64_t>(proc.index)),
                derive_seed(static_cast<std::uint64_t>(n), strat_id,
                            static_cast<std::uint64_t>(d)),
                static_cast<std::uint64_t>(rep));
            try {
              const MeasurementRecord rec =
                  run_experiment(proc.sample.params, amps, n, grid, rep_seed);
              Eigen::VectorXd estimate;
              if (tp) {
                MlOptions opts;
                opts.seed = derive_seed(rep_seed, kTagMlStarts);
                const EstimateReport rep_tp = ml_estimate_tp(rec, grid, opts);
                estimate = rep_tp.x;
                sqerrs.push_back(
                    (estimate - proc.truth9).squaredNorm() / norm);
              } else {
                if (cfg.nontp_method == "ml") {
                  MlOptions opts;
                  opts.seed = derive_seed(rep_seed, kTagMlStarts);
                  estimate = ml_estimate_nontp(rec, grid, opts).x;
                } else {
                  estimate =
                      li_estimate(rec, dm, cfg.nontp_method == "li-proj").x;
                }
                sqerrs.push_back(
                    (estimate - proc.truth14).squaredNorm() / norm);
              }
            } catch (const NumericalError&) {
              ++failures;
            }
          }
        }

        const Aggregate agg = aggregate_sqerr(sqerrs, failures);
        ResultRow row;
        row.strategy = strat;
        row.group = cfg.group;
        row.process = proc.index;
        row.j = cfg.j;
        row.n = n;
        row.l = cfg.l;
        row.k = grid.bin_count();
        row.mse_empirical = agg.mean;
        row.mse_formula = formula_count > 0 ? formula_sum / formula_count : kNan;
        row.stderr_ = agg.stderr_;
        row.wall_time = 0.0;
        row.seed = cfg.seed;
        row.failures = agg.failures;
        result.rows.push_back(row);

        if (log != nullptr) {
          const double elapsed =
              std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
          *log << strat << " process " << proc.index << " N " << n
               << " mse " << row.mse_empirical << " formula "
               << row.mse_formula << " failures " << failures << " ["
               << elapsed << "s]\n";
        }
      }
    }
  }
  return result;
}

std::string results_csv_string(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "strategy,group,process,J,N,L,K,mse_empirical,mse_formula,stderr,"
        "wall_time,seed\n";
  for (const ResultRow& r : rows) {
    os << r.strategy << ',' << r.group << ',' << r.process << ',' << r.j << ','
       << r.n << ',' << format_double(r.l) << ',' << r.k << ','
       << format_double(r.mse_empirical) << ',' << format_double(r.mse_formula)
       << ',' << format_double(r.stderr_) << ',' << format_double(r.wall_time)
       << ',' << r.seed << '\n';
  }
  return os.str();
}

void emit_results(const std::vector<ResultRow>& rows,
                  const ExperimentConfig& cfg,
                  const std::vector<InputDesign>& designs,
                  const std::string& csv_path, const std::string& json_path) {
  {
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) {
      throw std::runtime_error("cannot open " + csv_path);
    }
    csv << results_csv_string(rows);
  }
  nlohmann::json designs_json = nlohmann::json::array();
  for (const InputDesign& d : designs) {
    designs_json.push_back(design_to_json(d));
  }
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ResultRow& r : rows) {
    rows_json.push_back(row_to_json(r));
  }
  nlohmann::json doc{{"config", config_to_json(cfg)},
                     {"designs", std::move(designs_json)},
                     {"rows", std::move(rows_json)}};
  std::ofstream js(json_path, std::ios::trunc);
  if (!js) {
    throw std::runtime_error("cannot open " + json_path);
  }
  js << doc.dump(2) << '\n';
}

}  // namespace gausstomo
