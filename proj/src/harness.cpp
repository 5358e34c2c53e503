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

#include <algorithm>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rmaisac {

using nlohmann::json;

namespace {

const std::vector<std::pair<Setup, std::string>>& setup_names() {
  static const std::vector<std::pair<Setup, std::string>> names = {
      {Setup::full_rma, "full_rma"},
      {Setup::tx_rma_rx_fpa, "tx_rma_rx_fpa"},
      {Setup::tx_rotation_only_rx_fpa, "tx_rotation_only_rx_fpa"},
      {Setup::tx_ma_rx_fpa, "tx_ma_rx_fpa"},
      {Setup::tx_1d_rma_rx_fpa, "tx_1d_rma_rx_fpa"},
      {Setup::fpa_fpa, "fpa_fpa"},
  };
  return names;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string to_string(Setup setup) {
  for (const auto& [s, name] : setup_names())
    if (s == setup) return name;
  return "unknown";
}

Setup parse_setup(const std::string& name) {
  for (const auto& [s, n] : setup_names())
    if (n == name) return s;
  throw ContractViolation("unknown setup '" + name + "'");
}

const std::vector<Setup>& all_setups() {
  static const std::vector<Setup> setups = [] {
    std::vector<Setup> out;
    for (const auto& entry : setup_names()) out.push_back(entry.first);
    return out;
  }();
  return setups;
}

std::vector<bool> free_coordinates(Setup setup, int n_tx, int n_rx) {
  const ParticleLayout lay{n_tx, n_rx};
  std::vector<bool> free(lay.size(), false);
  auto tx_positions = [&] {
    for (int n = 0; n < n_tx; ++n) free[lay.tx_position(n)] = free[lay.tx_position(n) + 1] = true;
  };
  auto tx_rotation = [&](int count) {
    for (int i = 0; i < count; ++i) free[lay.tx_rotation() + i] = true;
  };
  switch (setup) {
    case Setup::full_rma:
      free.assign(lay.size(), true);
      break;
    case Setup::tx_rma_rx_fpa:
      tx_positions();
      tx_rotation(3);
      break;
    case Setup::tx_rotation_only_rx_fpa:
      tx_rotation(3);
      break;
    case Setup::tx_ma_rx_fpa:
      tx_positions();
      break;
    case Setup::tx_1d_rma_rx_fpa:
      tx_positions();
      tx_rotation(1);
      break;
    case Setup::fpa_fpa:
      break;
  }
  return free;
}

void ScenarioConfig::validate() const {
  if (num_users < 0) throw ContractViolation("config: num_users must be >= 0");
  if (n_tx < 1 || n_rx < 1) throw ContractViolation("config: n_tx and n_rx must be >= 1");
  if (!(carrier_hz > 0.0)) throw ContractViolation("config: carrier_hz must be > 0");
  if (!(min_spacing_wavelengths > 0.0) || !(region_wavelengths > 0.0))
    throw ContractViolation("config: spacing and region must be > 0");
  if (element_area && !(*element_area > 0.0)) throw ContractViolation("config: element_area must be > 0");
  if (power_unit != "dbm" && power_unit != "dbw" && power_unit != "watt")
    throw ContractViolation("config: power_unit must be dbm, dbw or watt");
  if (power_unit == "watt" && !(power > 0.0)) throw ContractViolation("config: power must be > 0");
  if (coherence_length < 1) throw ContractViolation("config: coherence_length must be >= 1");
  if (!(target_distance > 0.0)) throw ContractViolation("config: target_distance must be > 0");
  if (!(user_distance_min > 0.0) || user_distance_max < user_distance_min)
    throw ContractViolation("config: user distance range is invalid");
  if (max_outer_iterations < 1) throw ContractViolation("config: max_outer_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw ContractViolation("config: tolerance must be > 0");
  if (swarm_size < 1 || pso_iterations < 0) throw ContractViolation("config: swarm_size >= 1, pso_iterations >= 0");
  if (!(sdp_tolerance > 0.0)) throw ContractViolation("config: sdp_tolerance must be > 0");
  if (!(c_max > 0.0)) throw ContractViolation("config: c_max must be > 0");
  if (rotation_bits && *rotation_bits < 1) throw ContractViolation("config: rotation_bits must be >= 1");
  if (seed_policy != "shared" && seed_policy != "per_point")
    throw ContractViolation("config: seed_policy must be shared or per_point");
  if (workers < 1) throw ContractViolation("config: workers must be >= 1");
  EntityPosition{target_distance, target_elevation, target_azimuth}.validate();
}

double ScenarioConfig::wavelength() const { return kSpeedOfLight / carrier_hz; }

double ScenarioConfig::power_watts() const {
  if (power_unit == "watt") return power;
  if (power_unit == "dbw") return std::pow(10.0, power / 10.0);
  return dbm_to_watts(power);
}

double ScenarioConfig::gamma_min_linear() const { return std::pow(10.0, gamma_min_db / 10.0); }

GeometryConfig ScenarioConfig::geometry() const {
  const double lambda = wavelength();
  GeometryConfig g;
  g.n_tx = n_tx;
  g.n_rx = n_rx;
  g.region_side = region_wavelengths * lambda;
  g.min_spacing = min_spacing_wavelengths * lambda;
  g.tx_center = Vec3(0.0, 0.0, center_offset + g.region_side / 2.0);
  g.rx_center = Vec3(0.0, 0.0, center_offset - g.region_side / 2.0);
  g.element_area = element_area ? *element_area : lambda * lambda / (4.0 * kPi);
  return g;
}

// ---- JSON ----------------------------------------------------------------

namespace {

json to_json_object(const ScenarioConfig& c) {
  json j;
  j["array"] = {{"num_users", c.num_users},
                {"n_tx", c.n_tx},
                {"n_rx", c.n_rx},
                {"carrier_hz", c.carrier_hz},
                {"min_spacing_wavelengths", c.min_spacing_wavelengths},
                {"region_wavelengths", c.region_wavelengths},
                {"element_area", c.element_area ? json(*c.element_area) : json(nullptr)},
                {"center_offset", c.center_offset}};
  j["link"] = {{"power", c.power},
               {"power_unit", c.power_unit},
               {"user_noise_dbm", c.user_noise_dbm},
               {"target_noise_dbm", c.target_noise_dbm},
               {"coherence_length", c.coherence_length},
               {"eta_re", c.eta_re},
               {"eta_im", c.eta_im}};
  j["target"] = {{"distance", c.target_distance}, {"elevation", c.target_elevation}, {"azimuth", c.target_azimuth}};
  j["users"] = {{"distance_min", c.user_distance_min}, {"distance_max", c.user_distance_max}};
  j["ao"] = {{"max_outer_iterations", c.max_outer_iterations},
             {"tolerance", c.tolerance},
             {"sdp_tolerance", c.sdp_tolerance}};
  j["pso"] = {{"swarm_size", c.swarm_size}, {"iterations", c.pso_iterations}, {"a1", c.a1}, {"a2", c.a2},
              {"omega_min", c.omega_min}, {"omega_max", c.omega_max},        {"mu0", c.mu0}, {"mu1", c.mu1},
              {"mu2", c.mu2},           {"mu3", c.mu3}};
  j["constraints"] = {{"gamma_min_db", c.gamma_min_db}, {"c_max", c.c_max}};
  j["run"] = {{"seed", c.seed},
              {"setup", to_string(c.setup)},
              {"rotation_bits", c.rotation_bits ? json(*c.rotation_bits) : json(nullptr)},
              {"seed_policy", c.seed_policy},
              {"workers", c.workers},
              {"record_wall_time", c.record_wall_time}};
  return j;
}

template <typename T>
void read(const json& group, const char* key, T& out) {
  if (group.contains(key)) out = group.at(key).get<T>();
}

template <typename T>
void read_optional(const json& group, const char* key, std::optional<T>& out) {
  if (!group.contains(key)) return;
  if (group.at(key).is_null()) out.reset();
  else out = group.at(key).get<T>();
}

ScenarioConfig from_json_object(const json& j, ScenarioConfig c) {
  static const std::map<std::string, std::vector<std::string>> known = {
      {"array", {"num_users", "n_tx", "n_rx", "carrier_hz", "min_spacing_wavelengths", "region_wavelengths",
                 "element_area", "center_offset"}},
      {"link", {"power", "power_unit", "user_noise_dbm", "target_noise_dbm", "coherence_length", "eta_re", "eta_im"}},
      {"target", {"distance", "elevation", "azimuth"}},
      {"users", {"distance_min", "distance_max"}},
      {"ao", {"max_outer_iterations", "tolerance", "sdp_tolerance"}},
      {"pso", {"swarm_size", "iterations", "a1", "a2", "omega_min", "omega_max", "mu0", "mu1", "mu2", "mu3"}},
      {"constraints", {"gamma_min_db", "c_max"}},
      {"run", {"seed", "setup", "rotation_bits", "seed_policy", "workers", "record_wall_time"}},
  };
  if (!j.is_object()) throw ContractViolation("config: top level must be an object");
  for (const auto& [group, body] : j.items()) {
    const auto it = known.find(group);
    if (it == known.end()) throw ContractViolation("config: unknown group '" + group + "'");
    if (!body.is_object()) throw ContractViolation("config: group '" + group + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      (void)value;
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ContractViolation("config: unknown key '" + group + "." + key + "'");
    }
  }
  const json empty = json::object();
  auto group = [&](const char* name) -> const json& { return j.contains(name) ? j.at(name) : empty; };

  const json& a = group("array");
  read(a, "num_users", c.num_users);
  read(a, "n_tx", c.n_tx);
  read(a, "n_rx", c.n_rx);
  read(a, "carrier_hz", c.carrier_hz);
  read(a, "min_spacing_wavelengths", c.min_spacing_wavelengths);
  read(a, "region_wavelengths", c.region_wavelengths);
  read_optional(a, "element_area", c.element_area);
  read(a, "center_offset", c.center_offset);
  const json& l = group("link");
  read(l, "power", c.power);
  read(l, "power_unit", c.power_unit);
  read(l, "user_noise_dbm", c.user_noise_dbm);
  read(l, "target_noise_dbm", c.target_noise_dbm);
  read(l, "coherence_length", c.coherence_length);
  read(l, "eta_re", c.eta_re);
  read(l, "eta_im", c.eta_im);
  const json& t = group("target");
  read(t, "distance", c.target_distance);
  read(t, "elevation", c.target_elevation);
  read(t, "azimuth", c.target_azimuth);
  const json& u = group("users");
  read(u, "distance_min", c.user_distance_min);
  read(u, "distance_max", c.user_distance_max);
  const json& ao = group("ao");
  read(ao, "max_outer_iterations", c.max_outer_iterations);
  read(ao, "tolerance", c.tolerance);
  read(ao, "sdp_tolerance", c.sdp_tolerance);
  const json& p = group("pso");
  read(p, "swarm_size", c.swarm_size);
  read(p, "iterations", c.pso_iterations);
  read(p, "a1", c.a1);
  read(p, "a2", c.a2);
  read(p, "omega_min", c.omega_min);
  read(p, "omega_max", c.omega_max);
  read(p, "mu0", c.mu0);
  read(p, "mu1", c.mu1);
  read(p, "mu2", c.mu2);
  read(p, "mu3", c.mu3);
  const json& k = group("constraints");
  read(k, "gamma_min_db", c.gamma_min_db);
  read(k, "c_max", c.c_max);
  const json& r = group("run");
  read(r, "seed", c.seed);
  if (r.contains("setup")) c.setup = parse_setup(r.at("setup").get<std::string>());
  read_optional(r, "rotation_bits", c.rotation_bits);
  read(r, "seed_policy", c.seed_policy);
  read(r, "workers", c.workers);
  read(r, "record_wall_time", c.record_wall_time);
  c.validate();
  return c;
}

}  // namespace

std::string config_to_json(const ScenarioConfig& config) { return to_json_object(config).dump(2); }

ScenarioConfig config_from_json(const std::string& text, const ScenarioConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ContractViolation(std::string("config: ") + e.what());
  }
  try {
    return from_json_object(j, base);
  } catch (const json::type_error& e) {
    throw ContractViolation(std::string("config: ") + e.what());
  }
}

ScenarioConfig load_config(const std::filesystem::path& path, const ScenarioConfig& base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), base);
}

// ---- scenarios -------------------------------------------------------------

ScenarioInstance generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  const GeometryConfig g = config.geometry();

  ScenarioInstance out;
  Scenario& sc = out.scenario;
  sc.geometry = g;
  sc.wavelength = config.wavelength();
  std::uniform_real_distribution<double> dist(config.user_distance_min, config.user_distance_max);
  std::uniform_real_distribution<double> azimuth(-kPi / 2.0, kPi / 2.0);
  for (int k = 0; k < config.num_users; ++k) {
    const double d = dist(rng);
    sc.users.push_back({d, kPi / 2.0, azimuth(rng)});
  }
  sc.target = {config.target_distance, config.target_elevation, config.target_azimuth};
  sc.eta = {config.eta_re, config.eta_im};
  sc.coherence_length = config.coherence_length;
  sc.target_noise_power = dbm_to_watts(config.target_noise_dbm);
  sc.user_noise_powers = RVec::Constant(config.num_users, dbm_to_watts(config.user_noise_dbm));
  sc.power_budget = config.power_watts();

  ArrayState fpa;
  fpa.tx_placements = grid_layout(g.n_tx, g.min_spacing);
  fpa.rx_placements = grid_layout(g.n_rx, g.min_spacing);
  fpa.tx_center = g.tx_center;
  fpa.rx_center = g.rx_center;

  out.free_coords = free_coordinates(config.setup, g.n_tx, g.n_rx);
  const ParticleLayout lay{g.n_tx, g.n_rx};
  const RVec base = encode(fpa);
  std::uniform_real_distribution<double> position(-g.region_side / 2.0, g.region_side / 2.0);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  // Late draws keep the free rotations at zero: with a frozen symmetric grid
  // almost every tilt breaks the reflection constraint.
  constexpr int kMaxDraws = 10000;
  constexpr int kRotationDraws = 2000;
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    RVec x(lay.size());
    for (int i = 0; i < lay.size(); ++i) x[i] = lay.is_rotation(i) ? angle(rng) : position(rng);
    for (int i = 0; i < lay.size(); ++i) {
      if (!out.free_coords[i] || (lay.is_rotation(i) && attempt >= kRotationDraws)) x[i] = base[i];
      else if (lay.is_rotation(i) && config.rotation_bits) x[i] = quantize_angle(x[i], *config.rotation_bits);
    }
    const ArrayState s = decode(x, fpa);
    if (spacing_violations(s, g.min_spacing).empty() && reflection_violations(s).empty()) {
      out.initial = s;
      return out;
    }
  }
  throw DegenerateGeometry("generate_scenario: no admissible initial geometry after " +
                           std::to_string(kMaxDraws) + " draws");
}

AoConfig ao_config(const ScenarioConfig& config, Mode mode, std::uint64_t seed) {
  AoConfig ao;
  ao.mode = mode;
  ao.max_outer_iterations = config.max_outer_iterations;
  ao.tolerance = config.tolerance;
  ao.gamma_min = config.num_users > 0 ? config.gamma_min_linear() : 0.0;
  ao.crb_budget = mode == Mode::comm ? config.c_max : std::numeric_limits<double>::infinity();
  ao.free_coords = free_coordinates(config.setup, config.n_tx, config.n_rx);
  ao.sdp.tolerance = config.sdp_tolerance;
  PsoConfig& p = ao.pso;
  p.swarm_size = config.swarm_size;
  p.max_iterations = config.pso_iterations;
  p.a1 = config.a1;
  p.a2 = config.a2;
  p.omega_min = config.omega_min;
  p.omega_max = config.omega_max;
  p.mu0 = config.mu0;
  p.mu1 = config.mu1;
  p.mu2 = config.mu2;
  p.mu3 = config.mu3;
  p.rotation_bits = config.rotation_bits;
  p.seed = seed;
  return ao;
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::ok: return "ok";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::error: return "error";
  }
  return "unknown";
}

PointResult run_single(const ScenarioConfig& config, Mode mode, const TraceSink& sink,
                       const std::string& sweep_value, std::uint64_t seed_override, bool use_override) {
  PointResult out;
  out.sweep_value = sweep_value;
  out.config = config;
  out.seed = use_override ? seed_override : config.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const ScenarioInstance inst = generate_scenario(config, out.seed);
    const AoConfig ao = ao_config(config, mode, out.seed);
    AoSink ao_sink;
    if (sink) ao_sink = [&](const AoIterationRecord& rec) { sink(sweep_value, rec); };
    AoResult r = mode == Mode::sensing ? algorithm1(inst.scenario, inst.initial, ao, ao_sink)
                                       : algorithm2(inst.scenario, inst.initial, ao, ao_sink);
    const GeometryConfig& g = inst.scenario.geometry;
    out.feasible = r.audit.feasible(ao.audit_tolerance, ao.crb_budget) && within_region(r.state, g.region_side) &&
                   spacing_violations(r.state, g.min_spacing).empty() && reflection_violations(r.state).empty();
    out.result = std::move(r);
  } catch (const AoInfeasible& e) {
    out.status = RunStatus::infeasible;
    out.message = e.what();
  } catch (const std::exception& e) {
    out.status = RunStatus::error;
    out.message = e.what();
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& config, const std::string& parameter,
                                 const std::string& value) {
  ScenarioConfig c = config;
  try {
    if (parameter == "gamma_min_db") c.gamma_min_db = std::stod(value);
    else if (parameter == "c_max") c.c_max = std::stod(value);
    else if (parameter == "rotation_bits") {
      if (value == "none") c.rotation_bits.reset();
      else c.rotation_bits = std::stoi(value);
    } else if (parameter == "setup") c.setup = parse_setup(value);
    else throw ContractViolation("sweep: unknown parameter '" + parameter + "'");
  } catch (const std::invalid_argument&) {
    throw ContractViolation("sweep: cannot parse value '" + value + "' for " + parameter);
  }
  c.validate();
  return c;
}

ResultTable run_sweep(const ScenarioConfig& config, Mode mode, const SweepSpec& spec, const TraceSink& sink) {
  config.validate();
  if (spec.values.empty()) throw ContractViolation("sweep: value list is empty");
  std::vector<ScenarioConfig> configs;
  for (const auto& v : spec.values) configs.push_back(apply_sweep_value(config, spec.parameter, v));

  ResultTable table;
  table.mode = mode;
  table.config = config;
  table.sweep = spec;
  table.points.resize(spec.values.size());
  const int n = static_cast<int>(spec.values.size());
#pragma omp parallel for schedule(dynamic) num_threads(config.workers)
  for (int i = 0; i < n; ++i) {
    const std::uint64_t seed = config.seed_policy == "per_point" ? config.seed + static_cast<std::uint64_t>(i)
                                                                 : config.seed;
    table.points[i] = run_single(configs[i], mode, sink, spec.values[i], seed, true);
  }
  return table;
}

// ---- output ----------------------------------------------------------------

namespace {

const char* kTraceHeader =
    "sweep_value,iteration,objective,trace_crb,rcrb_d,rcrb_theta,rcrb_phi,sum_rate,min_sinr,power_used,"
    "spacing_pairs,reflection_elements,sinr_penalty,crb_excess,beam_accepted,geometry_accepted,wall_ms\n";

std::string trace_row(const std::string& sweep_value, const AoIterationRecord& r, bool record_wall_time) {
  std::ostringstream os;
  const double min_sinr = r.sinr.size() ? r.sinr.minCoeff() : std::numeric_limits<double>::quiet_NaN();
  os << sweep_value << ',' << r.iteration << ',' << fmt(r.objective) << ',' << fmt(r.trace_crb) << ','
     << fmt(r.rcrb[0]) << ',' << fmt(r.rcrb[1]) << ',' << fmt(r.rcrb[2]) << ',' << fmt(r.sum_rate) << ','
     << fmt(min_sinr) << ',' << fmt(r.power) << ',' << r.spacing_pairs << ',' << r.reflection_elements << ','
     << fmt(r.sinr_penalty) << ',' << fmt(r.crb_excess) << ',' << (r.beam_accepted ? 1 : 0) << ','
     << (r.geometry_accepted ? 1 : 0) << ',' << fmt(record_wall_time ? r.wall_ms : 0.0) << '\n';
  return os.str();
}

}  // namespace

struct TraceCsvWriter::State {
  std::mutex mutex;
  std::ofstream out;
  bool record_wall_time = false;
};

TraceCsvWriter::TraceCsvWriter(const std::filesystem::path& path, bool record_wall_time)
    : state_(std::make_shared<State>()) {
  state_->out.open(path);
  if (!state_->out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  state_->record_wall_time = record_wall_time;
  state_->out << kTraceHeader << std::flush;
}

TraceSink TraceCsvWriter::sink() {
  auto state = state_;
  return [state](const std::string& sweep_value, const AoIterationRecord& rec) {
    const std::string row = trace_row(sweep_value, rec, state->record_wall_time);
    std::lock_guard lock(state->mutex);
    state->out << row << std::flush;
  };
}

std::string summary_csv(const ResultTable& table) {
  std::ostringstream os;
  os << "sweep_value,trace_crb,rcrb_d,rcrb_theta,rcrb_phi,sum_rate,min_sinr,power_used,feasible,outer_iters,"
        "wall_ms,status\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : table.points) {
    os << p.sweep_value << ',';
    if (p.result && !p.result->trace.empty()) {
      const AoIterationRecord& last = p.result->trace.back();
      const double min_sinr = last.sinr.size() ? last.sinr.minCoeff() : nan;
      os << fmt(last.trace_crb) << ',' << fmt(last.rcrb[0]) << ',' << fmt(last.rcrb[1]) << ',' << fmt(last.rcrb[2])
         << ',' << fmt(last.sum_rate) << ',' << fmt(min_sinr) << ',' << fmt(last.power) << ','
         << (p.feasible ? 1 : 0) << ',' << p.result->trace.size() << ',';
    } else {
      for (int i = 0; i < 7; ++i) os << fmt(nan) << ',';
      os << "0,0,";
    }
    os << fmt(p.config.record_wall_time ? p.wall_ms : 0.0) << ',' << to_string(p.status) << '\n';
  }
  return os.str();
}

std::string trace_csv(const ResultTable& table) {
  std::string out = kTraceHeader;
  for (const auto& p : table.points)
    if (p.result)
      for (const auto& rec : p.result->trace) out += trace_row(p.sweep_value, rec, p.config.record_wall_time);
  return out;
}

std::string manifest_json(const ResultTable& table) {
  json j;
  j["tool"] = "rmaisac";
  j["version"] = RMAISAC_VERSION;
  j["mode"] = to_string(table.mode);
  j["config"] = to_json_object(table.config);
  if (table.sweep) j["sweep"] = {{"parameter", table.sweep->parameter}, {"values", table.sweep->values}};
  else j["sweep"] = nullptr;
  json points = json::array();
  for (const auto& p : table.points) {
    json e = {{"sweep_value", p.sweep_value}, {"seed", p.seed}, {"status", to_string(p.status)}};
    if (!p.message.empty()) e["message"] = p.message;
    points.push_back(e);
  }
  j["points"] = points;
  j["versions"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__}};
  return j.dump(2) + "\n";
}

void emit_results(const ResultTable& table, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  auto write = [&](const char* name, const std::string& text) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
  };
  write("manifest.json", manifest_json(table));
  write("summary.csv", summary_csv(table));
  write("trace.csv", trace_csv(table));
}

int exit_code(const ResultTable& table) {
  bool infeasible = false;
  for (const auto& p : table.points) {
    if (p.status == RunStatus::error) return 1;
    if (p.status == RunStatus::infeasible) infeasible = true;
  }
  return infeasible ? 2 : 0;
}

}  // namespace rmaisac
