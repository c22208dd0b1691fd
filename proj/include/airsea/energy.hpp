#pragma once

// Rotary-wing propulsion, USV hydrodynamic drag and transmit energy, plus the
// slot-resolved containers that carry a planned mission.

#include <airsea/geometry.hpp>
#include <airsea/scenario.hpp>

#include <json.hpp>

#include <vector>

namespace airsea {

enum class Mode { fly, hover };

struct Trajectory {
  double slot_duration = 1.0;
  std::vector<Vec3> uav;   // N+1 entries, slot 0 is the departure state
  std::vector<Vec2> usv;
  std::vector<Mode> mode;  // mode of the slot ending at index n
  std::vector<int> stage;  // 1-based stage e; index 0 carries 0

  std::size_t slots() const { return uav.empty() ? 0 : uav.size() - 1; }
};

struct SlotBeams {
  CVec w;                  // comm beam, empty when silent
  std::vector<CVec> v;     // sensing beams, one per target (empty vectors when idle)
  std::vector<bool> active;
  double comm_power() const { return w.size() ? w.squaredNorm() : 0.0; }
  double sense_power() const;
};

struct BeamformingSchedule {
  std::vector<SlotBeams> slots;  // N+1 entries aligned with Trajectory
};

struct StageEnergy {
  int stage = 0;
  double flying = 0.0;
  double hovering = 0.0;
};

struct PowerBreakdown {
  double uav_propulsion = 0.0;
  double uav_transmit = 0.0;
  double usv_propulsion = 0.0;
  std::vector<StageEnergy> per_stage;

  double total() const { return uav_propulsion + uav_transmit + usv_propulsion; }
};

double uav_power_flying(double v, const SystemParams& sys);
double xi_from_speed(double v, const SystemParams& sys);
/// First-order model of xi^2 + |v|^2 / v0^2 at (xi0, v0), the right side of
/// the induced-power constraint 1/xi^2 <= xi^2 + |v|^2 / v0^2.
struct InducedTangent {
  double value = 0.0;  // at the expansion point
  double xi0 = 0.0;
  Vec2 v0 = Vec2::Zero();
  double d_xi = 0.0;
  Vec2 d_v = Vec2::Zero();
  double operator()(double xi, const Vec2& v) const { return value + d_xi * (xi - xi0) + d_v.dot(v - v0); }
};
InducedTangent induced_tangent(double xi0, const Vec2& v0, const SystemParams& sys);

double usv_power(const Vec2& velocity, const Vec2& current, const SystemParams& sys);
double usv_slot_energy(const Vec2& b_prev, const Vec2& b_cur, const CurrentField& field,
                       const SystemParams& sys);

/// Average-speed description of one stage e (flying leg then hover).
struct StageSegment {
  double fly_time = 0.0;
  double hover_time = 0.0;
  double uav_speed = 0.0;
  Vec2 usv_fly_velocity = Vec2::Zero();
  Vec2 usv_hover_velocity = Vec2::Zero();
  Vec2 fly_current = Vec2::Zero();
  Vec2 hover_current = Vec2::Zero();
};

/// Aggregate chi_Delta over stages using per-stage average speeds.
double stage_energy_estimate(const std::vector<StageSegment>& stages, const SystemParams& sys);

PowerBreakdown account_trajectory(const Trajectory& traj, const BeamformingSchedule& beams,
                                  const CurrentField& field, const SystemParams& sys);

nlohmann::json to_json(const PowerBreakdown& p);

}  // namespace airsea
