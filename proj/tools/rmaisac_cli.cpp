// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rmaisac/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> setup;
  std::optional<double> gamma_min_db;
  std::optional<double> c_max;
  std::optional<int> rotation_bits;
  std::optional<int> workers;
  std::string out = "results";
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "scenario and swarm seed");
  cmd->add_option("--setup", o.setup, "antenna setup (full_rma, tx_rma_rx_fpa, tx_rotation_only_rx_fpa, "
                                      "tx_ma_rx_fpa, tx_1d_rma_rx_fpa, fpa_fpa)");
  cmd->add_option("--gamma-min-db", o.gamma_min_db, "per-user SINR floor in dB");
  cmd->add_option("--c-max", o.c_max, "tr(CRB) budget for the communication loop");
  cmd->add_option("--rotation-bits", o.rotation_bits, "quantise rotations to this many bits");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--workers", o.workers, "concurrent sweep points");
}

// CLI flag > config file > built-in default.
rmaisac::ScenarioConfig resolve(const Overrides& o) {
  rmaisac::ScenarioConfig c;
  if (!o.config_path.empty()) c = rmaisac::load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.setup) c.setup = rmaisac::parse_setup(*o.setup);
  if (o.gamma_min_db) c.gamma_min_db = *o.gamma_min_db;
  if (o.c_max) c.c_max = *o.c_max;
  if (o.rotation_bits) c.rotation_bits = *o.rotation_bits;
  if (o.workers) c.workers = *o.workers;
  c.validate();
  return c;
}

int execute(const rmaisac::ScenarioConfig& config, rmaisac::Mode mode, const std::optional<rmaisac::SweepSpec>& sweep,
            const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  rmaisac::TraceCsvWriter writer(out / "trace.csv", config.record_wall_time);
  rmaisac::ResultTable table;
  if (sweep) {
    table = rmaisac::run_sweep(config, mode, *sweep, writer.sink());
  } else {
    table.mode = mode;
    table.config = config;
    table.points.push_back(rmaisac::run_single(config, mode, writer.sink()));
  }
  rmaisac::emit_results(table, out);
  std::cout << rmaisac::summary_csv(table);
  for (const auto& p : table.points)
    if (!p.message.empty()) std::cerr << p.sweep_value << ": " << rmaisac::to_string(p.status) << ": " << p.message << "\n";
  return rmaisac::exit_code(table);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field ISAC design with rotatable movable antennas"};
  app.require_subcommand(1);

  Overrides sensing_opts, comm_opts, sweep_opts;
  auto* sensing = app.add_subcommand("run-sensing", "minimise tr(CRB) under SINR floors");
  add_common(sensing, sensing_opts);
  auto* comm = app.add_subcommand("run-comm", "maximise sum-rate under a tr(CRB) budget");
  add_common(comm, comm_opts);
  auto* sweep = app.add_subcommand("sweep", "run one loop over a list of parameter values");
  add_common(sweep, sweep_opts);
  std::string mode = "sensing", param;
  std::vector<std::string> values;
  sweep->add_option("--mode", mode, "sensing or comm")->check(CLI::IsMember({"sensing", "comm"}));
  sweep->add_option("--param", param, "gamma_min_db, c_max, rotation_bits or setup")
      ->required()
      ->check(CLI::IsMember({"gamma_min_db", "c_max", "rotation_bits", "setup"}));
  sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*sensing) return execute(resolve(sensing_opts), rmaisac::Mode::sensing, std::nullopt, sensing_opts.out);
    if (*comm) return execute(resolve(comm_opts), rmaisac::Mode::comm, std::nullopt, comm_opts.out);
    return execute(resolve(sweep_opts), mode == "comm" ? rmaisac::Mode::comm : rmaisac::Mode::sensing,
                   rmaisac::SweepSpec{param, values}, sweep_opts.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
