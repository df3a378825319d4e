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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gausstomo/harness.hpp"
#include "gausstomo/mse_theory.hpp"
#include "gausstomo/process_gen.hpp"
#include "gausstomo/reconstruction.hpp"

namespace gausstomo {

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot read " + path);
  }
  return nlohmann::json::parse(in);
}

void write_output(const nlohmann::json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) {
    throw std::invalid_argument("cannot write " + out_path);
  }
  out << doc.dump(2) << '\n';
}

QFunctionParams load_process(const std::string& path) {
  const nlohmann::json j = load_json(path);
  return params_from_json(j.contains("params") ? j["params"] : j);
}

InputDesign load_design(const std::string& path) {
  const nlohmann::json j = load_json(path);
  return design_from_json(j.contains("design") ? j["design"] : j);
}

struct CliState {
  int exit_code = 0;
};

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Gaussian process tomography workbench"};
  app.require_subcommand(1);

  // generate-process
  auto* gen = app.add_subcommand("generate-process",
                                 "sample a physical CPTP process");
  int gen_group = 3, gen_index = 1;
  std::uint64_t gen_seed = 0;
  double gen_x0p0_lo = -2.0, gen_x0p0_hi = 2.0;
  std::string gen_out;
  gen->add_option("--group", gen_group, "process group (1-3)")->required();
  gen->add_option("--index", gen_index, "row within the group")->required();
  gen->add_option("--seed", gen_seed, "master seed")->required();
  gen->add_option("--x0p0-lo", gen_x0p0_lo, "displacement range low");
  gen->add_option("--x0p0-hi", gen_x0p0_hi, "displacement range high");
  gen->add_option("--out", gen_out, "output JSON path (stdout if omitted)");

  // geometric-set
  auto* geo = app.add_subcommand("geometric-set",
                                 "optimize a geometric input design");
  int geo_j = 6, geo_m = 20, geo_starts = 16;
  double geo_l = 1.0, geo_extent = 5.0;
  std::uint64_t geo_seed = 0;
  std::string geo_out, geo_csv;
  geo->add_option("--J", geo_j, "number of input states")->required();
  geo->add_option("--L", geo_l, "box half-width")->required();
  geo->add_option("--M", geo_m, "bins per axis");
  geo->add_option("--extent", geo_extent, "grid half-width");
  geo->add_option("--starts", geo_starts, "optimizer starts");
  geo->add_option("--seed", geo_seed, "master seed")->required();
  geo->add_option("--out", geo_out, "design JSON path");
  geo->add_option("--csv", geo_csv, "design CSV path");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a binned heterodyne experiment");
  std::string sim_process, sim_design, sim_out;
  long long sim_n = 10000;
  int sim_m = 20;
  double sim_extent = 5.0;
  std::uint64_t sim_seed = 0;
  sim->add_option("--process", sim_process, "process JSON")->required();
  sim->add_option("--design", sim_design, "design JSON")->required();
  sim->add_option("--N", sim_n, "shots per input state")->required();
  sim->add_option("--M", sim_m, "bins per axis");
  sim->add_option("--extent", sim_extent, "grid half-width");
  sim->add_option("--seed", sim_seed, "master seed")->required();
  sim->add_option("--out", sim_out, "record JSON path");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "estimate process parameters");
  std::string rec_record, rec_method = "li", rec_out;
  int rec_m = 20;
  double rec_extent = 5.0;
  std::uint64_t rec_seed = 0;
  rec->add_option("--record", rec_record, "measurement record JSON")->required();
  rec->add_option("--method", rec_method, "li | li-proj | ml | ml-tp")
      ->check(CLI::IsMember({"li", "li-proj", "ml", "ml-tp"}));
  rec->add_option("--M", rec_m, "bins per axis");
  rec->add_option("--extent", rec_extent, "grid half-width");
  rec->add_option("--seed", rec_seed, "multi-start seed");
  rec->add_option("--out", rec_out, "estimate JSON path");

  // mse-formula
  auto* mse = app.add_subcommand("mse-formula", "asymptotic MSE of a design");
  std::string mse_process, mse_design, mse_mode = "nontp", mse_out;
  long long mse_n = 10000;
  int mse_m = 20;
  double mse_extent = 5.0;
  mse->add_option("--process", mse_process, "process JSON")->required();
  mse->add_option("--design", mse_design, "design JSON")->required();
  mse->add_option("--N", mse_n, "shots per input state")->required();
  mse->add_option("--mode", mse_mode, "nontp | tp")
      ->check(CLI::IsMember({"nontp", "tp"}));
  mse->add_option("--M", mse_m, "bins per axis");
  mse->add_option("--extent", mse_extent, "grid half-width");
  mse->add_option("--out", mse_out, "output JSON path");

  // campaign
  auto* camp = app.add_subcommand("campaign", "run a strategy campaign");
  std::string camp_config, camp_out = ".";
  std::uint64_t camp_seed = 0;
  bool camp_quiet = false;
  camp->add_option("--config", camp_config, "config JSON")->required();
  camp->add_option("--seed", camp_seed, "master seed")->required();
  camp->add_option("--out", camp_out, "output directory");
  camp->add_flag("--quiet", camp_quiet, "suppress progress log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e);
      return 0;
    }
    std::cerr << e.what() << '\n';
    return 2;
  }

  try {
    if (gen->parsed()) {
      const GroupSample sample = sample_group(
          gen_group, gen_index, gen_seed, std::make_pair(gen_x0p0_lo, gen_x0p0_hi));
      write_output(nlohmann::json{{"spec", spec_to_json(sample.spec)},
                                  {"params", params_to_json(sample.params)}},
                   gen_out);
    } else if (geo->parsed()) {
      const PhaseSpaceGrid grid = make_grid(geo_m, geo_extent);
      const InputDesign d =
          canonicalize(optimize_geometric(geo_j, geo_l, grid, geo_starts, geo_seed));
      write_output(design_to_json(d), geo_out);
      if (!geo_csv.empty()) {
        std::ofstream csv(geo_csv, std::ios::trunc);
        if (!csv) throw std::invalid_argument("cannot write " + geo_csv);
        design_csv(d, csv);
      }
    } else if (sim->parsed()) {
      const QFunctionParams p = load_process(sim_process);
      const InputDesign d = load_design(sim_design);
      const PhaseSpaceGrid grid = make_grid(sim_m, sim_extent);
      const MeasurementRecord record =
          run_experiment(p, d.amplitudes, sim_n, grid, sim_seed);
      write_output(record_to_json(record), sim_out);
    } else if (rec->parsed()) {
      const MeasurementRecord record = record_from_json(load_json(rec_record));
      const PhaseSpaceGrid grid = make_grid(rec_m, rec_extent);
      EstimateReport report;
      if (rec_method == "li" || rec_method == "li-proj") {
        const DesignMatrix d = build_design_matrix(record.inputs, grid);
        report = li_estimate(record, d, rec_method == "li-proj");
      } else if (rec_method == "ml") {
        MlOptions opts;
        opts.seed = rec_seed;
        report = ml_estimate_nontp(record, grid, opts);
      } else {
        MlOptions opts;
        opts.seed = rec_seed;
        report = ml_estimate_tp(record, grid, opts);
      }
      write_output(report_to_json(report), rec_out);
    } else if (mse->parsed()) {
      const QFunctionParams p = load_process(mse_process);
      const InputDesign d = load_design(mse_design);
      const PhaseSpaceGrid grid = make_grid(mse_m, mse_extent);
      const MseReport report =
          mse_mode == "tp"
              ? mse_formula_tp(tp_vector_from_params(p), d.amplitudes, grid,
                               mse_n)
              : mse_formula_nontp(p, d.amplitudes, grid, mse_n);
      nlohmann::json per = nlohmann::json::array();
      for (Eigen::Index i = 0; i < report.per_parameter.size(); ++i) {
        per.push_back(report.per_parameter[i]);
      }
      write_output(nlohmann::json{{"total", report.total},
                                  {"per_parameter", std::move(per)}},
                   mse_out);
    } else if (camp->parsed()) {
      ExperimentConfig cfg = config_from_json(load_json(camp_config));
      cfg.seed = camp_seed;
      cfg.validate();
      std::filesystem::create_directories(camp_out);
      const CampaignResult res =
          run_campaign(cfg, camp_quiet ? nullptr : &std::cerr);
      emit_results(res.rows, cfg, res.designs,
                   camp_out + "/results.csv", camp_out + "/results.json");
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace gausstomo
