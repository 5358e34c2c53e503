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

#pragma once

#include "rmaisac/ao_driver.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rmaisac {

/// Antenna setups compared in the experiments. FPA planes sit on a centred
/// half-wavelength grid with zero rotation and never move.
enum class Setup { full_rma, tx_rma_rx_fpa, tx_rotation_only_rx_fpa, tx_ma_rx_fpa, tx_1d_rma_rx_fpa, fpa_fpa };

std::string to_string(Setup setup);
Setup parse_setup(const std::string& name);
const std::vector<Setup>& all_setups();

/// Particle coordinates the swarm may move under `setup`.
std::vector<bool> free_coordinates(Setup setup, int n_tx, int n_rx);

struct ScenarioConfig {
  // array
  int num_users = 4;
  int n_tx = 9;
  int n_rx = 9;
  double carrier_hz = 24e9;
  double min_spacing_wavelengths = 0.5;
  double region_wavelengths = 80.0;
  /// Element area in m^2; absent means lambda^2 / (4 pi).
  std::optional<double> element_area;
  double center_offset = 5.0;  // plane centres at [0, 0, offset +- D/2]
  // link budget
  double power = 40.0;
  std::string power_unit = "dbm";  // dbm | dbw | watt
  double user_noise_dbm = -110.0;
  double target_noise_dbm = -110.0;
  int coherence_length = 1000;
  double eta_re = 1.0;
  double eta_im = 0.0;
  // entities
  double target_distance = 10.0;
  double target_elevation = kPi / 3.0;
  double target_azimuth = kPi / 4.0;
  double user_distance_min = 15.0;
  double user_distance_max = 25.0;
  // optimisation
  int max_outer_iterations = 20;
  double tolerance = 1e-3;
  int swarm_size = 200;
  int pso_iterations = 100;
  double a1 = 1.4;
  double a2 = 1.4;
  double omega_min = 0.4;
  double omega_max = 0.9;
  double mu0 = 1000.0;
  double mu1 = 1000.0;
  double mu2 = 1000.0;
  double mu3 = 1000.0;
  double sdp_tolerance = 1e-8;
  // constraints
  double gamma_min_db = 6.0;
  double c_max = 1e-3;
  // run
  std::uint64_t seed = 1;
  Setup setup = Setup::full_rma;
  std::optional<int> rotation_bits;
  std::string seed_policy = "shared";  // shared | per_point
  int workers = 1;
  bool record_wall_time = false;

  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;

  double wavelength() const;
  double power_watts() const;
  double gamma_min_linear() const;
  GeometryConfig geometry() const;
};

/// Serialises every field. Nested groups: array, link, target, users, ao,
/// pso, constraints, run.
std::string config_to_json(const ScenarioConfig& config);
/// Overlays the keys present in `text` on `base`; unknown keys throw.
ScenarioConfig config_from_json(const std::string& text, const ScenarioConfig& base = {});
ScenarioConfig load_config(const std::filesystem::path& path, const ScenarioConfig& base = {});

struct ScenarioInstance {
  Scenario scenario;
  ArrayState initial;
  std::vector<bool> free_coords;
};

/// Users d ~ U(d_min, d_max), theta = pi/2, phi ~ U(-pi/2, pi/2); then a
/// random initial geometry for the free coordinates, redrawn until spacing
/// and reflection constraints hold. Frozen planes take the FPA layout.
ScenarioInstance generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

AoConfig ao_config(const ScenarioConfig& config, Mode mode, std::uint64_t seed);

enum class RunStatus { ok, infeasible, error };
std::string to_string(RunStatus status);

struct PointResult {
  std::string sweep_value = "single";
  std::uint64_t seed = 0;
  ScenarioConfig config;
  RunStatus status = RunStatus::ok;
  std::string message;
  std::optional<AoResult> result;
  bool feasible = false;
  double wall_ms = 0.0;
};

using TraceSink = std::function<void(const std::string& sweep_value, const AoIterationRecord&)>;

PointResult run_single(const ScenarioConfig& config, Mode mode, const TraceSink& sink = {},
                       const std::string& sweep_value = "single", std::uint64_t seed_override = 0,
                       bool use_override = false);

/// One swept parameter: gamma_min_db, c_max, rotation_bits ("none" clears),
/// or setup.
struct SweepSpec {
  std::string parameter;
  std::vector<std::string> values;
};

ScenarioConfig apply_sweep_value(const ScenarioConfig& config, const std::string& parameter,
                                 const std::string& value);

struct ResultTable {
  Mode mode = Mode::sensing;
  ScenarioConfig config;
  std::optional<SweepSpec> sweep;
  std::vector<PointResult> points;
};

/// Points run concurrently on `config.workers` threads; each owns its seed
/// and RNG streams. A failing point is recorded and the rest continue.
ResultTable run_sweep(const ScenarioConfig& config, Mode mode, const SweepSpec& spec, const TraceSink& sink = {});

/// Thread-safe trace.csv writer that flushes every row.
class TraceCsvWriter {
public:
  TraceCsvWriter(const std::filesystem::path& path, bool record_wall_time);
  TraceSink sink();

private:
  struct State;
  std::shared_ptr<State> state_;
};

std::string summary_csv(const ResultTable& table);
std::string trace_csv(const ResultTable& table);
std::string manifest_json(const ResultTable& table);

/// Writes manifest.json, summary.csv and trace.csv under `dir`.
void emit_results(const ResultTable& table, const std::filesystem::path& dir);

/// 0 when every point succeeded, 1 if any point errored, else 2.
int exit_code(const ResultTable& table);

}  // namespace rmaisac
