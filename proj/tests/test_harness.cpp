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

#include <json.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rmaisac;

namespace {

ScenarioConfig small_config(std::uint64_t seed = 1) {
  ScenarioConfig c;
  c.num_users = 2;
  c.n_tx = c.n_rx = 4;
  c.swarm_size = 12;
  c.pso_iterations = 6;
  c.max_outer_iterations = 4;
  c.seed = seed;
  return c;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Harness, DefaultsMatchReferenceTable) {
  const ScenarioConfig c;
  EXPECT_EQ(c.num_users, 4);
  EXPECT_EQ(c.n_tx, 9);
  EXPECT_EQ(c.n_rx, 9);
  EXPECT_NEAR(c.wavelength(), 299792458.0 / 24e9, 1e-15);
  EXPECT_NEAR(c.power_watts(), 10.0, 1e-12);
  EXPECT_NEAR(c.gamma_min_linear(), std::pow(10.0, 0.6), 1e-12);
  const GeometryConfig g = c.geometry();
  EXPECT_NEAR(g.min_spacing, c.wavelength() / 2.0, 1e-15);
  EXPECT_NEAR(g.region_side, 80.0 * c.wavelength(), 1e-12);
  EXPECT_NEAR(g.element_area, c.wavelength() * c.wavelength() / (4.0 * kPi), 1e-18);
  EXPECT_EQ(c.swarm_size, 200);
  EXPECT_EQ(c.pso_iterations, 100);
  EXPECT_EQ(c.max_outer_iterations, 20);
}

TEST(Harness, PowerUnitsConvert) {
  ScenarioConfig c;
  c.power = 10.0;
  c.power_unit = "dbw";
  EXPECT_NEAR(c.power_watts(), 10.0, 1e-12);
  c.power_unit = "watt";
  c.power = 2.5;
  EXPECT_DOUBLE_EQ(c.power_watts(), 2.5);
  c.power_unit = "furlong";
  EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(Harness, ConfigJsonRoundTrips) {
  ScenarioConfig c = small_config(9);
  c.rotation_bits = 4;
  c.setup = Setup::tx_1d_rma_rx_fpa;
  c.element_area = 1e-5;
  c.gamma_min_db = 12.5;
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  EXPECT_EQ(config_from_json(config_to_json(ScenarioConfig{})), ScenarioConfig{});
}

TEST(Harness, ConfigOverlayKeepsBaseForMissingKeys) {
  const ScenarioConfig base = small_config(3);
  const ScenarioConfig c = config_from_json(R"({"constraints": {"gamma_min_db": 9}})", base);
  EXPECT_DOUBLE_EQ(c.gamma_min_db, 9.0);
  EXPECT_EQ(c.n_tx, base.n_tx);
  EXPECT_EQ(c.seed, base.seed);
}

TEST(Harness, ConfigRejectsUnknownOrMalformedInput) {
  EXPECT_THROW(config_from_json(R"({"bogus": {}})"), ContractViolation);
  EXPECT_THROW(config_from_json(R"({"array": {"n_tx": 4, "colour": 1}})"), ContractViolation);
  EXPECT_THROW(config_from_json(R"({"array": {"n_tx": "four"}})"), ContractViolation);
  EXPECT_THROW(config_from_json("[1, 2]"), ContractViolation);
  EXPECT_THROW(config_from_json("{not json"), ContractViolation);
  EXPECT_THROW(config_from_json(R"({"array": {"n_tx": 0}})"), ContractViolation);
}

TEST(Harness, SetupNamesRoundTrip) {
  EXPECT_EQ(all_setups().size(), 6u);
  for (rmaisac::Setup s : all_setups()) EXPECT_EQ(parse_setup(to_string(s)), s);
  EXPECT_THROW(parse_setup("rma_everywhere"), ContractViolation);
}

TEST(Harness, ScenarioPlacesEntitiesAsConfigured) {
  const ScenarioConfig c = small_config();
  const ScenarioInstance inst = generate_scenario(c, 17);
  const Scenario& s = inst.scenario;
  ASSERT_EQ(static_cast<int>(s.users.size()), c.num_users);
  EXPECT_DOUBLE_EQ(s.target.distance, 10.0);
  EXPECT_DOUBLE_EQ(s.target.elevation, kPi / 3.0);
  EXPECT_DOUBLE_EQ(s.target.azimuth, kPi / 4.0);
  for (const auto& u : s.users) {
    EXPECT_GE(u.distance, 15.0);
    EXPECT_LE(u.distance, 25.0);
    EXPECT_DOUBLE_EQ(u.elevation, kPi / 2.0);
    EXPECT_GE(u.azimuth, -kPi / 2.0);
    EXPECT_LE(u.azimuth, kPi / 2.0);
  }
  const GeometryConfig& g = s.geometry;
  EXPECT_TRUE(spacing_violations(inst.initial, g.min_spacing).empty());
  EXPECT_TRUE(reflection_violations(inst.initial).empty());
  EXPECT_TRUE(within_region(inst.initial, g.region_side));
  const double half = g.region_side / 2.0;
  EXPECT_NEAR(inst.initial.tx_center.z(), c.center_offset + half, 1e-12);
  EXPECT_NEAR(inst.initial.rx_center.z(), c.center_offset - half, 1e-12);
}

TEST(Harness, ScenarioIsDeterministicPerSeed) {
  const ScenarioConfig c = small_config();
  const ScenarioInstance a = generate_scenario(c, 5), b = generate_scenario(c, 5), d = generate_scenario(c, 6);
  EXPECT_EQ(a.scenario.users, b.scenario.users);
  EXPECT_EQ(a.initial, b.initial);
  EXPECT_NE(a.scenario.users, d.scenario.users);
}

TEST(Harness, FrozenPlanesUseTheFixedGrid) {
  ScenarioConfig c = small_config();
  c.setup = Setup::tx_rma_rx_fpa;
  const ScenarioInstance inst = generate_scenario(c, 2);
  const auto grid = grid_layout(c.n_rx, c.geometry().min_spacing);
  EXPECT_EQ(inst.initial.rx_placements, grid);
  EXPECT_EQ(inst.initial.rx_rotation, PlaneRotation{});
  EXPECT_NE(inst.initial.tx_placements, grid_layout(c.n_tx, c.geometry().min_spacing));
}

TEST(Harness, QuantizedSetupsStartOnTheCodebook) {
  ScenarioConfig c = small_config();
  c.rotation_bits = 3;
  const ScenarioInstance inst = generate_scenario(c, 4);
  EXPECT_EQ(inst.initial.tx_rotation, quantize_rotation(inst.initial.tx_rotation, 3));
  EXPECT_EQ(inst.initial.rx_rotation, quantize_rotation(inst.initial.rx_rotation, 3));
}

TEST(Harness, FixedArraysNeverMove) {
  ScenarioConfig c = small_config();
  c.setup = Setup::fpa_fpa;
  const PointResult p = run_single(c, Mode::sensing);
  ASSERT_EQ(p.status, RunStatus::ok) << p.message;
  const ScenarioInstance inst = generate_scenario(c, c.seed);
  EXPECT_EQ(p.result->state, inst.initial);
}

TEST(Harness, RotationOnlySetupKeepsPositions) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    ScenarioConfig c = small_config(seed);
    c.setup = Setup::tx_rotation_only_rx_fpa;
    const PointResult p = run_single(c, Mode::sensing);
    ASSERT_EQ(p.status, RunStatus::ok) << p.message;
    const ScenarioInstance inst = generate_scenario(c, seed);
    EXPECT_EQ(p.result->state.tx_placements, inst.initial.tx_placements);
    EXPECT_EQ(p.result->state.rx_placements, inst.initial.rx_placements);
    EXPECT_EQ(p.result->state.rx_rotation, inst.initial.rx_rotation);
  }
}

TEST(Harness, FreeCoordinateMasksCountAsExpected) {
  auto count = [](const std::vector<bool>& m) { return static_cast<int>(std::count(m.begin(), m.end(), true)); };
  const int nt = 4, nr = 3;
  EXPECT_EQ(count(free_coordinates(Setup::full_rma, nt, nr)), 2 * nt + 2 * nr + 6);
  EXPECT_EQ(count(free_coordinates(Setup::tx_rma_rx_fpa, nt, nr)), 2 * nt + 3);
  EXPECT_EQ(count(free_coordinates(Setup::tx_rotation_only_rx_fpa, nt, nr)), 3);
  EXPECT_EQ(count(free_coordinates(Setup::tx_ma_rx_fpa, nt, nr)), 2 * nt);
  EXPECT_EQ(count(free_coordinates(Setup::tx_1d_rma_rx_fpa, nt, nr)), 2 * nt + 1);
  EXPECT_EQ(count(free_coordinates(Setup::fpa_fpa, nt, nr)), 0);
}

TEST(Harness, SummaryIsByteIdenticalAcrossRuns) {
  const ScenarioConfig c = small_config(2);
  const SweepSpec spec{"gamma_min_db", {"0", "6"}};
  const ResultTable a = run_sweep(c, Mode::sensing, spec);
  const ResultTable b = run_sweep(c, Mode::sensing, spec);
  EXPECT_EQ(summary_csv(a), summary_csv(b));
  EXPECT_EQ(trace_csv(a), trace_csv(b));
  const std::string text = summary_csv(a);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "sweep_value,trace_crb,rcrb_d,rcrb_theta,rcrb_phi,sum_rate,min_sinr,power_used,feasible,outer_iters,"
            "wall_ms,status");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(Harness, SweepRecordsFailingPointsAndContinues) {
  const ScenarioConfig c = small_config(1);
  const ResultTable t = run_sweep(c, Mode::sensing, {"gamma_min_db", {"6", "90", "3"}});
  ASSERT_EQ(t.points.size(), 3u);
  EXPECT_EQ(t.points[0].status, RunStatus::ok);
  EXPECT_EQ(t.points[1].status, RunStatus::infeasible);
  EXPECT_FALSE(t.points[1].message.empty());
  EXPECT_EQ(t.points[2].status, RunStatus::ok);
  EXPECT_EQ(exit_code(t), 2);
  const std::string summary = summary_csv(t);
  EXPECT_NE(summary.find("90,nan"), std::string::npos);
  EXPECT_NE(summary.find(",infeasible\n"), std::string::npos);
}

TEST(Harness, ExitCodePrefersErrors) {
  ResultTable t;
  t.points.resize(2);
  EXPECT_EQ(exit_code(t), 0);
  t.points[0].status = RunStatus::infeasible;
  EXPECT_EQ(exit_code(t), 2);
  t.points[1].status = RunStatus::error;
  EXPECT_EQ(exit_code(t), 1);
}

TEST(Harness, SeedPolicyControlsPointSeeds) {
  ScenarioConfig c = small_config(10);
  c.max_outer_iterations = 1;
  const SweepSpec spec{"c_max", {"1", "2", "3"}};
  const ResultTable shared = run_sweep(c, Mode::sensing, spec);
  for (const auto& p : shared.points) EXPECT_EQ(p.seed, 10u);
  c.seed_policy = "per_point";
  const ResultTable offset = run_sweep(c, Mode::sensing, spec);
  for (std::size_t i = 0; i < offset.points.size(); ++i) EXPECT_EQ(offset.points[i].seed, 10u + i);
}

TEST(Harness, ParallelWorkersMatchSerial) {
  ScenarioConfig c = small_config(3);
  const SweepSpec spec{"setup", {"full_rma", "tx_ma_rx_fpa", "fpa_fpa"}};
  const std::string serial = summary_csv(run_sweep(c, Mode::sensing, spec));
  c.workers = 3;
  EXPECT_EQ(summary_csv(run_sweep(c, Mode::sensing, spec)), serial);
}

TEST(Harness, SweepValuesAreValidated) {
  const ScenarioConfig c = small_config();
  EXPECT_EQ(apply_sweep_value(c, "rotation_bits", "none").rotation_bits, std::nullopt);
  EXPECT_EQ(apply_sweep_value(c, "rotation_bits", "4").rotation_bits, 4);
  EXPECT_EQ(apply_sweep_value(c, "setup", "fpa_fpa").setup, Setup::fpa_fpa);
  EXPECT_DOUBLE_EQ(apply_sweep_value(c, "c_max", "0.002").c_max, 0.002);
  EXPECT_THROW(apply_sweep_value(c, "bandwidth", "1"), ContractViolation);
  EXPECT_THROW(apply_sweep_value(c, "gamma_min_db", "loud"), ContractViolation);
  EXPECT_THROW(apply_sweep_value(c, "c_max", "-1"), ContractViolation);
  EXPECT_THROW(run_sweep(c, Mode::sensing, {"c_max", {}}), ContractViolation);
}

TEST(Harness, EmittedFilesRoundTrip) {
  ScenarioConfig c = small_config(4);
  c.max_outer_iterations = 2;
  const ResultTable t = run_sweep(c, Mode::comm, {"c_max", {"0.01"}});
  const auto dir = std::filesystem::temp_directory_path() / "rmaisac_harness_test";
  std::filesystem::remove_all(dir);
  emit_results(t, dir);
  EXPECT_EQ(read_file(dir / "summary.csv"), summary_csv(t));
  EXPECT_EQ(read_file(dir / "trace.csv"), trace_csv(t));
  const nlohmann::json m = nlohmann::json::parse(read_file(dir / "manifest.json"));
  EXPECT_EQ(m["mode"], "comm");
  EXPECT_EQ(m["sweep"]["parameter"], "c_max");
  EXPECT_EQ(m["points"].size(), 1u);
  EXPECT_EQ(m["points"][0]["seed"], 4u);
  EXPECT_TRUE(m["versions"].contains("eigen"));
  EXPECT_EQ(config_from_json(m["config"].dump()), c);
  std::filesystem::remove_all(dir);
}

TEST(Harness, TraceWriterStreamsEveryIteration) {
  const auto path = std::filesystem::temp_directory_path() / "rmaisac_trace_test.csv";
  ScenarioConfig c = small_config(2);
  std::size_t iterations = 0;
  {
    TraceCsvWriter writer(path, false);
    const PointResult p = run_single(c, Mode::sensing, writer.sink(), "x");
    ASSERT_TRUE(p.result);
    iterations = p.result->trace.size();
  }
  const std::string text = read_file(path);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), iterations + 1);
  EXPECT_EQ(text.rfind("sweep_value,iteration,", 0), 0u);
  std::filesystem::remove(path);
}
