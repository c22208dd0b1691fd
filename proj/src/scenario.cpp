#include <airsea/scenario.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace airsea {

using nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

std::string to_string(CurrentKind kind) {
  switch (kind) {
    case CurrentKind::zero: return "zero";
    case CurrentKind::uniform: return "uniform";
    case CurrentKind::analytic_wave: return "analytic-wave";
  }
  return "zero";
}

Vec2 current_at(const CurrentField& field, const Vec2& b) {
  switch (field.kind) {
    case CurrentKind::zero:
      return Vec2::Zero();
    case CurrentKind::uniform: {
      const double n = field.uniform_direction.norm();
      if (n == 0.0) return Vec2::Zero();
      return field.max_speed * field.uniform_direction / n;
    }
    case CurrentKind::analytic_wave: {
      const double v = field.max_speed;
      const double cx = std::cos(0.06 * b.x());
      const double sx = std::sin(0.06 * b.x());
      const double cy = std::cos(0.03 * b.y());
      return Vec2(v * (0.8 - 0.03 * sx * cy), -v * cx * cy);
    }
  }
  return Vec2::Zero();
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw ScenarioError(what); }

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(std::string(name) + " > 0 violated");
}

Vec2 read_point(const json& j, const char* name) {
  if (!j.is_array() || j.size() != 2) fail(std::string(name) + ": expected [x, y]");
  Vec2 p(j[0].get<double>(), j[1].get<double>());
  if (!p.allFinite()) fail(std::string(name) + ": non-finite coordinate");
  return p;
}

std::vector<Vec2> read_points(const json& obj, const char* key) {
  std::vector<Vec2> out;
  if (!obj.contains(key)) return out;
  for (const auto& p : obj.at(key)) out.push_back(read_point(p, key));
  return out;
}

// Gain-like quantity: `<key>` linear or `<key>_db`.
double read_ratio(const json& obj, const std::string& key, double fallback) {
  if (obj.contains(key)) return obj.at(key).get<double>();
  if (obj.contains(key + "_db")) return db_to_linear(obj.at(key + "_db").get<double>());
  return fallback;
}

// Power quantity: `<key>_w` linear, `<key>_dbm` or `<key>_db` (dBW).
double read_power(const json& obj, const std::string& key, double fallback) {
  if (obj.contains(key + "_w")) return obj.at(key + "_w").get<double>();
  if (obj.contains(key + "_dbm")) return db_to_linear(obj.at(key + "_dbm").get<double>()) * 1e-3;
  if (obj.contains(key + "_db")) return db_to_linear(obj.at(key + "_db").get<double>());
  return fallback;
}

template <typename T>
T read(const json& obj, const char* key, T fallback) {
  return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

}  // namespace

Scenario reference_scenario() {
  Scenario s;
  s.system.channel_gain = db_to_linear(-14.8);
  s.system.sensing_gain = db_to_linear(-14.8);
  s.requirements.inst_snr = db_to_linear(3.0);
  s.requirements.total_snr = db_to_linear(12.0);
  return s;
}

void validate(const Scenario& s) {
  const auto& p = s.system;
  if (p.num_antennas < 1) fail("M >= 1 violated");
  if (p.scans_per_slot < 1) fail("N_s >= 1 violated");
  if (p.max_simultaneous_targets < 1) fail("Z >= 1 violated");
  if (p.max_iterations < 1) fail("T_max >= 1 violated");
  require_positive(p.altitude, "H");
  require_positive(p.slot_duration, "delta");
  require_positive(p.pulse_time, "t_p");
  require_positive(p.listen_time, "t_o");
  require_positive(p.channel_gain, "rho0");
  require_positive(p.small_scale_fading, "iota");
  require_positive(p.sensing_gain, "beta");
  require_positive(p.mean_rcs, "eta");
  require_positive(p.noise_comm, "sigma_c^2");
  require_positive(p.noise_sense, "sigma_s^2");
  require_positive(p.noise_hover, "sigma_h^2");
  require_positive(p.antenna_spacing, "d");
  require_positive(p.wavelength, "lambda");
  require_positive(p.blade_profile_power, "U0");
  require_positive(p.induced_power, "U1");
  require_positive(p.tip_speed, "U_tip");
  require_positive(p.mean_induced_speed, "v0");
  require_positive(p.fuselage_drag_ratio, "d0");
  require_positive(p.air_density, "rho");
  require_positive(p.rotor_solidity, "phi");
  require_positive(p.disc_area, "A");
  require_positive(p.usv_drag, "alpha");
  require_positive(p.power_budget, "p_max");
  require_positive(p.sensing_power, "p_s");
  require_positive(p.comm_power, "p_c");
  require_positive(p.uav_max_speed, "v_uav^max");
  require_positive(p.usv_max_speed, "v_usv^max");
  require_positive(p.obstacle_radius, "r1");
  require_positive(p.current_resolution, "d_wat");
  require_positive(p.sca_tolerance, "epsilon");

  const double scan = p.slot_duration / p.scans_per_slot;
  if (std::abs(p.pulse_time + p.listen_time - scan) > 1e-9 * scan) fail("t_p+t_o ≠ δ/N_s");
  if (p.sensing_power + p.comm_power > p.power_budget) fail("p_s+p_c ≤ p_max violated");

  const auto& r = s.requirements;
  if (r.rate_fly < 0 || r.rate_hover < 0 || r.inst_snr < 0 || r.total_snr < 0)
    fail("requirements ≥ 0 violated");
  if (r.inst_snr > r.total_snr) fail("Γ_s ≤ Γ_s^total violated");

  const auto& w = s.world;
  if (w.targets.empty()) fail("K_tar ≥ 1 violated");
  for (const auto& t : w.targets)
    if (!t.allFinite()) fail("target positions finite violated");
  for (const auto& o : w.obstacles) {
    if (!o.allFinite()) fail("obstacle positions finite violated");
    for (const Vec2* e : {&w.uav_start, &w.uav_end, &w.usv_start, &w.usv_end}) {
      if ((*e - o).norm() < p.obstacle_radius) fail("endpoint clearance ≥ r1 violated");
    }
  }
  if (!std::isfinite(s.current.max_speed)) fail("current max speed finite violated");
}

Scenario scenario_from_json(const json& j) {
  Scenario s = reference_scenario();
  auto& p = s.system;
  const json sys = j.value("system", json::object());
  p.num_antennas = read(sys, "num_antennas", p.num_antennas);
  p.altitude = read(sys, "altitude_m", p.altitude);
  p.slot_duration = read(sys, "slot_duration_s", p.slot_duration);
  p.scans_per_slot = read(sys, "scans_per_slot", p.scans_per_slot);
  p.pulse_time = read(sys, "pulse_time_s", p.pulse_time);
  p.listen_time = read(sys, "listen_time_s", p.listen_time);
  p.channel_gain = read_ratio(sys, "channel_gain", p.channel_gain);
  p.small_scale_fading = read(sys, "small_scale_fading", p.small_scale_fading);
  p.sensing_gain = read_ratio(sys, "sensing_gain", p.sensing_gain);
  p.mean_rcs = read(sys, "mean_rcs_m2", p.mean_rcs);
  p.noise_comm = read_power(sys, "noise_comm", p.noise_comm);
  p.noise_sense = read_power(sys, "noise_sense", p.noise_sense);
  p.noise_hover = read_power(sys, "noise_hover", p.noise_hover);
  p.antenna_spacing = read(sys, "antenna_spacing_m", p.antenna_spacing);
  p.wavelength = read(sys, "wavelength_m", p.wavelength);
  p.blade_profile_power = read(sys, "blade_profile_power_w", p.blade_profile_power);
  p.induced_power = read(sys, "induced_power_w", p.induced_power);
  p.tip_speed = read(sys, "tip_speed_mps", p.tip_speed);
  p.mean_induced_speed = read(sys, "mean_induced_speed_mps", p.mean_induced_speed);
  p.fuselage_drag_ratio = read(sys, "fuselage_drag_ratio", p.fuselage_drag_ratio);
  p.air_density = read(sys, "air_density_kg_m3", p.air_density);
  p.rotor_solidity = read(sys, "rotor_solidity", p.rotor_solidity);
  p.disc_area = read(sys, "disc_area_m2", p.disc_area);
  p.usv_drag = read(sys, "usv_drag_kg", p.usv_drag);
  p.power_budget = read(sys, "power_budget_w", p.power_budget);
  p.sensing_power = read(sys, "sensing_power_w", p.sensing_power);
  p.comm_power = read(sys, "comm_power_w", p.comm_power);
  p.uav_max_speed = read(sys, "uav_max_speed_mps", p.uav_max_speed);
  p.usv_max_speed = read(sys, "usv_max_speed_mps", p.usv_max_speed);
  p.obstacle_radius = read(sys, "obstacle_radius_m", p.obstacle_radius);
  p.current_resolution = read(sys, "current_resolution_m", p.current_resolution);
  p.max_simultaneous_targets = read(sys, "max_simultaneous_targets", p.max_simultaneous_targets);
  p.sca_tolerance = read(sys, "sca_tolerance", p.sca_tolerance);
  p.max_iterations = read(sys, "max_iterations", p.max_iterations);

  const json req = j.value("requirements", json::object());
  auto& r = s.requirements;
  r.rate_fly = read(req, "rate_fly_bps_hz", r.rate_fly);
  r.rate_hover = read(req, "rate_hover_bps_hz", r.rate_hover);
  r.inst_snr = read_ratio(req, "inst_snr", r.inst_snr);
  r.total_snr = read_ratio(req, "total_snr", r.total_snr);

  const json world = j.value("world", json::object());
  auto& w = s.world;
  w.targets = read_points(world, "targets");
  w.obstacles = read_points(world, "obstacles");
  if (world.contains("uav_start")) w.uav_start = read_point(world.at("uav_start"), "uav_start");
  if (world.contains("uav_end")) w.uav_end = read_point(world.at("uav_end"), "uav_end");
  if (world.contains("usv_start")) w.usv_start = read_point(world.at("usv_start"), "usv_start");
  if (world.contains("usv_end")) w.usv_end = read_point(world.at("usv_end"), "usv_end");

  const json cur = j.value("current", json::object());
  const std::string kind = read<std::string>(cur, "kind", "zero");
  if (kind == "zero") s.current.kind = CurrentKind::zero;
  else if (kind == "uniform") s.current.kind = CurrentKind::uniform;
  else if (kind == "analytic-wave") s.current.kind = CurrentKind::analytic_wave;
  else fail("current.kind: unknown kind '" + kind + "'");
  s.current.max_speed = read(cur, "max_speed_mps", 0.0);
  if (cur.contains("direction")) s.current.uniform_direction = read_point(cur.at("direction"), "direction");

  validate(s);
  return s;
}

json scenario_to_json(const Scenario& s) {
  const auto& p = s.system;
  auto pt = [](const Vec2& v) { return json::array({v.x(), v.y()}); };
  json targets = json::array(), obstacles = json::array();
  for (const auto& t : s.world.targets) targets.push_back(pt(t));
  for (const auto& o : s.world.obstacles) obstacles.push_back(pt(o));
  json cur = {{"kind", to_string(s.current.kind)}, {"max_speed_mps", s.current.max_speed}};
  if (s.current.kind == CurrentKind::uniform) cur["direction"] = pt(s.current.uniform_direction);
  return {
      {"system",
       {{"num_antennas", p.num_antennas},
        {"altitude_m", p.altitude},
        {"slot_duration_s", p.slot_duration},
        {"scans_per_slot", p.scans_per_slot},
        {"pulse_time_s", p.pulse_time},
        {"listen_time_s", p.listen_time},
        {"channel_gain", p.channel_gain},
        {"small_scale_fading", p.small_scale_fading},
        {"sensing_gain", p.sensing_gain},
        {"mean_rcs_m2", p.mean_rcs},
        {"noise_comm_w", p.noise_comm},
        {"noise_sense_w", p.noise_sense},
        {"noise_hover_w", p.noise_hover},
        {"antenna_spacing_m", p.antenna_spacing},
        {"wavelength_m", p.wavelength},
        {"blade_profile_power_w", p.blade_profile_power},
        {"induced_power_w", p.induced_power},
        {"tip_speed_mps", p.tip_speed},
        {"mean_induced_speed_mps", p.mean_induced_speed},
        {"fuselage_drag_ratio", p.fuselage_drag_ratio},
        {"air_density_kg_m3", p.air_density},
        {"rotor_solidity", p.rotor_solidity},
        {"disc_area_m2", p.disc_area},
        {"usv_drag_kg", p.usv_drag},
        {"power_budget_w", p.power_budget},
        {"sensing_power_w", p.sensing_power},
        {"comm_power_w", p.comm_power},
        {"uav_max_speed_mps", p.uav_max_speed},
        {"usv_max_speed_mps", p.usv_max_speed},
        {"obstacle_radius_m", p.obstacle_radius},
        {"current_resolution_m", p.current_resolution},
        {"max_simultaneous_targets", p.max_simultaneous_targets},
        {"sca_tolerance", p.sca_tolerance},
        {"max_iterations", p.max_iterations}}},
      {"requirements",
       {{"rate_fly_bps_hz", s.requirements.rate_fly},
        {"rate_hover_bps_hz", s.requirements.rate_hover},
        {"inst_snr", s.requirements.inst_snr},
        {"total_snr", s.requirements.total_snr}}},
      {"world",
       {{"targets", targets},
        {"obstacles", obstacles},
        {"uav_start", pt(s.world.uav_start)},
        {"uav_end", pt(s.world.uav_end)},
        {"usv_start", pt(s.world.usv_start)},
        {"usv_end", pt(s.world.usv_end)}}},
      {"current", cur}};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("parse error: ") + e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("malformed scenario: ") + e.what());
  }
}

}  // namespace airsea
