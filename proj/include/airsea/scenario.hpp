#pragma once

// World description and physical parameters for the UAV-USV inspection
// problem. A Scenario is immutable once loaded; every consumer takes it by
// const reference.

#include <airsea/geometry.hpp>

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace airsea {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SystemParams {
  int num_antennas = 4;             // M
  double altitude = 100.0;          // H [m]
  double slot_duration = 1.0;       // delta [s]
  int scans_per_slot = 100;         // N_s
  double pulse_time = 0.005;        // t_p [s]
  double listen_time = 0.005;       // t_o [s]
  double channel_gain = 0.0;        // rho0, linear amplitude factor
  double small_scale_fading = 1.0;  // iota
  double sensing_gain = 0.0;        // beta, linear amplitude factor
  double mean_rcs = 0.1;            // eta [m^2]
  double noise_comm = 1e-14;        // sigma_c^2 [W]
  double noise_sense = 1e-14;       // sigma_s^2 [W]
  double noise_hover = 1e-14;       // sigma_h^2 [W]
  double antenna_spacing = 0.05;    // d [m]
  double wavelength = 0.1;          // lambda [m]
  double blade_profile_power = 80.0;  // U0 [W]
  double induced_power = 88.63;       // U1 [W]
  double tip_speed = 120.0;           // U_tip [m/s]
  double mean_induced_speed = 4.03;   // v0 [m/s]
  double fuselage_drag_ratio = 0.6;   // d0
  double air_density = 1.225;         // rho [kg/m^3]
  double rotor_solidity = 0.05;       // phi
  double disc_area = 0.503;           // A [m^2]
  double usv_drag = 20.0;             // alpha [kg]
  double power_budget = 20.0;         // p_max [W]
  double sensing_power = 5.0;         // p_s [W]
  double comm_power = 5.0;            // p_c [W]
  double uav_max_speed = 20.0;        // [m/s]
  double usv_max_speed = 10.0;        // [m/s]
  double obstacle_radius = 10.0;      // r1 [m]
  double current_resolution = 10.0;   // d_wat [m]
  int max_simultaneous_targets = 8;   // Z
  double sca_tolerance = 1e-3;        // epsilon
  int max_iterations = 50;            // T_max

  /// N_s * t_p / delta, the duty factor that scales every per-slot SNR.
  double duty() const { return scans_per_slot * pulse_time / slot_duration; }
  double hover_power() const { return blade_profile_power + induced_power; }
};

struct Requirements {
  double rate_fly = 13.0;    // Gamma_f [bit/s/Hz]
  double rate_hover = 13.0;  // Gamma_h [bit/s/Hz]
  double inst_snr = 0.0;     // Gamma_s, linear
  double total_snr = 0.0;    // Gamma_s^total, linear
};

struct World {
  std::vector<Vec2> targets;
  std::vector<Vec2> obstacles;
  Vec2 uav_start = Vec2::Zero();
  Vec2 uav_end = Vec2::Zero();
  Vec2 usv_start = Vec2::Zero();
  Vec2 usv_end = Vec2::Zero();
};

enum class CurrentKind { zero, uniform, analytic_wave };

struct CurrentField {
  CurrentKind kind = CurrentKind::zero;
  double max_speed = 0.0;                     // v_max^w; sign flips the flow
  Vec2 uniform_direction = Vec2(1.0, 0.0);    // used by the uniform kind
};

/// Water velocity at surface point b.
Vec2 current_at(const CurrentField& field, const Vec2& b);

struct Scenario {
  SystemParams system;
  Requirements requirements;
  World world;
  CurrentField current;
};

/// Throws ScenarioError naming the violated condition.
void validate(const Scenario& s);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

/// Reference parameter set with an empty world; callers add geometry.
Scenario reference_scenario();

double db_to_linear(double db);
double linear_to_db(double x);

std::string to_string(CurrentKind kind);

}  // namespace airsea
