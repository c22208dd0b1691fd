#include <airsea/energy.hpp>

#include <cmath>
#include <map>
#include <stdexcept>

namespace airsea {

double SlotBeams::sense_power() const {
  double p = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (active[k] && v[k].size()) p += v[k].squaredNorm();
  return p;
}

double xi_from_speed(double v, const SystemParams& sys) {
  const double r = v * v / (sys.mean_induced_speed * sys.mean_induced_speed);
  // sqrt(1 + r^2/4) - r/2 cancels badly for large r; use the conjugate form.
  const double xi2 = 1.0 / (std::sqrt(1.0 + 0.25 * r * r) + 0.5 * r);
  return std::sqrt(xi2);
}

double uav_power_flying(double v, const SystemParams& sys) {
  const double blade = sys.blade_profile_power * (1.0 + 3.0 * v * v / (sys.tip_speed * sys.tip_speed));
  const double parasite = 0.5 * sys.fuselage_drag_ratio * sys.air_density * sys.rotor_solidity *
                          sys.disc_area * v * v * v;
  return blade + parasite + sys.induced_power * xi_from_speed(v, sys);
}

InducedTangent induced_tangent(double xi0, const Vec2& v0, const SystemParams& sys) {
  const double v0sq = sys.mean_induced_speed * sys.mean_induced_speed;
  InducedTangent t;
  t.xi0 = xi0;
  t.v0 = v0;
  t.value = xi0 * xi0 + v0.squaredNorm() / v0sq;
  t.d_xi = 2.0 * xi0;
  t.d_v = 2.0 * v0 / v0sq;
  return t;
}

double usv_power(const Vec2& velocity, const Vec2& current, const SystemParams& sys) {
  return sys.usv_drag * (velocity - current).squaredNorm();
}

double usv_slot_energy(const Vec2& b_prev, const Vec2& b_cur, const CurrentField& field,
                       const SystemParams& sys) {
  const double dt = sys.slot_duration;
  return usv_power((b_cur - b_prev) / dt, current_at(field, b_cur), sys) * dt;
}

double stage_energy_estimate(const std::vector<StageSegment>& stages, const SystemParams& sys) {
  double total = 0.0;
  for (const auto& s : stages) {
    if (s.fly_time < 0.0 || s.hover_time < 0.0)
      throw std::invalid_argument("stage_energy_estimate: negative duration");
    total += s.fly_time *
             (uav_power_flying(s.uav_speed, sys) + usv_power(s.usv_fly_velocity, s.fly_current, sys));
    total += s.hover_time *
             (sys.hover_power() + usv_power(s.usv_hover_velocity, s.hover_current, sys));
  }
  return total;
}

PowerBreakdown account_trajectory(const Trajectory& traj, const BeamformingSchedule& beams,
                                  const CurrentField& field, const SystemParams& sys) {
  const std::size_t n_pts = traj.uav.size();
  if (traj.usv.size() != n_pts || traj.mode.size() != n_pts || traj.stage.size() != n_pts ||
      beams.slots.size() != n_pts)
    throw std::invalid_argument("account_trajectory: schedule/trajectory length mismatch");

  PowerBreakdown out;
  std::map<int, StageEnergy> stages;
  const double dt = traj.slot_duration;
  for (std::size_t n = 1; n < n_pts; ++n) {
    const double speed = (traj.uav[n] - traj.uav[n - 1]).norm() / dt;
    const double uav = uav_power_flying(speed, sys) * dt;
    const double tx = (beams.slots[n].comm_power() + beams.slots[n].sense_power()) * dt;
    const double usv = usv_power((traj.usv[n] - traj.usv[n - 1]) / dt,
                                 current_at(field, traj.usv[n]), sys) * dt;
    out.uav_propulsion += uav;
    out.uav_transmit += tx;
    out.usv_propulsion += usv;
    auto& st = stages[traj.stage[n]];
    st.stage = traj.stage[n];
    (traj.mode[n] == Mode::fly ? st.flying : st.hovering) += uav + tx + usv;
  }
  for (const auto& [_, st] : stages) out.per_stage.push_back(st);
  return out;
}

nlohmann::json to_json(const PowerBreakdown& p) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : p.per_stage)
    stages.push_back({{"stage", s.stage}, {"flying_J", s.flying}, {"hovering_J", s.hovering}});
  return {{"uav_propulsion_J", p.uav_propulsion},
          {"uav_transmit_J", p.uav_transmit},
          {"usv_propulsion_J", p.usv_propulsion},
          {"total_J", p.total()},
          {"per_stage", stages}};
}

}  // namespace airsea
