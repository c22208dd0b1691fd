#pragma once

// Per-stage trajectory and beamforming: the flying-mode SCA, the per-slot
// hover beamforming SDP, the hover USV path and their alternation.

#include <airsea/conic/sca.hpp>
#include <airsea/energy.hpp>
#include <airsea/scenario.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace airsea {

/// Which targets each hover slot senses and the per-slot SNR each must reach.
struct SensingSchedule {
  std::vector<std::vector<int>> targets;  // per slot, indices into world.targets
  std::vector<double> gamma;              // per slot
  int slots() const { return int(targets.size()); }
};

struct StageProblem {
  int stage = 0;  // 1-based; the closing leg is E+1
  Mode mode = Mode::fly;
  int slots = 0;
  Vec3 uav_from = Vec3::Zero(), uav_to = Vec3::Zero();
  Vec2 usv_from = Vec2::Zero(), usv_to = Vec2::Zero();
  std::vector<int> targets;      // hovering: indices into world.targets
  std::vector<Vec2> warm_usv;    // optional, slots + 1 entries
  bool uav_only = false;         // flying: ignore the USV (leader planning)
  std::vector<Vec3> uav_path;    // flying: fixed UAV positions, slots + 1 entries (follower)
  SensingSchedule schedule;      // hovering: fixed schedule, starts from warm_usv when set
};

struct StageSolution {
  std::vector<Vec3> uav;          // slots + 1 entries, [0] is the stage start
  std::vector<Vec2> usv;
  std::vector<SlotBeams> beams;   // slots + 1 entries, [0] left empty
  SensingSchedule schedule;       // hovering only
  std::vector<double> history;    // exact objective per SCA / AO iteration
  int iterations = 0;
  bool penalty_used = false;
  int randomized_slots = 0;
  double rank1_gap = 0.0;         // worst relative power increase from rank-1 extraction
  double uav_energy = 0.0;        // propulsion, J
  double transmit_energy = 0.0;
  double usv_energy = 0.0;
  double total() const { return uav_energy + transmit_energy + usv_energy; }
};

struct StageError : std::runtime_error {
  StageError(int stage, const std::string& what)
      : std::runtime_error("stage " + std::to_string(stage) + ": " + what), stage(stage) {}
  int stage;
};

StageSolution optimize_flying(const StageProblem& p, const Scenario& s, const conic::ScaOptions& opts = {});

struct HoverBeams {
  std::vector<SlotBeams> slots;   // one per hover slot (positions usv[1..N])
  double relaxed_power = 0.0;     // sum of SDP optima, W
  double power = 0.0;             // sum of extracted beam powers, W
  int randomized = 0;
  double rank1_gap = 0.0;
};

/// Every slot senses all targets at total_snr / slots.
SensingSchedule joint_schedule(const std::vector<int>& targets, int slots, const Scenario& s);

/// Per-slot minimum-power beams for the hover point q and USV positions b
/// (one per slot). Throws StageError when a slot SDP is infeasible.
HoverBeams optimize_hover_beams(const Vec3& q, const std::vector<Vec2>& b, const SensingSchedule& schedule,
                                const Scenario& s, int stage = 0, std::uint64_t seed = 0);

/// Largest per-slot SNR for target t when the sensing beam is kept orthogonal
/// to the USV channel at distance D and the link gets the MRT minimum power.
double nulled_sensing_snr(const Vec3& q, double distance, const Vec2& target, const Scenario& s);

struct HoverSetup {
  std::vector<Vec2> usv;  // slots + 1 entries starting at the arrival point
  SensingSchedule schedule;
  bool joint = false;     // all targets in every slot
};

/// Initial USV path and sensing schedule for one hover: joint sensing over
/// `slots` when its slot SDP is feasible, otherwise one target per slot with
/// the USV moved to the distance that needs the fewest slots.
HoverSetup plan_hover(const Vec3& q, const Vec2& arrive, const std::vector<int>& targets, int slots,
                      const Scenario& s, int stage = 0);

/// Hover rate margin F(D) = |h^H w|^2 - rho sum |h^H v_k|^2 - rho sigma^2 / g and dF/dD,
/// with D the UAV-USV distance; rho = 2^Gamma_h - 1.
struct RateMargin {
  double value = 0.0;
  double slope = 0.0;
};
RateMargin hover_rate_margin(const Vec3& q, double distance, const SlotBeams& beams, const SystemParams& sys,
                             double rate);

struct HoverUsvResult {
  std::vector<Vec2> usv;        // slots + 1 entries with fixed ends
  std::vector<double> history;  // exact USV energy per SCA iteration
  bool penalty_used = false;
};

/// USV path during a hover with the beams held fixed. `init` has slots + 1
/// entries; its first entry is fixed and the last one is free.
HoverUsvResult optimize_hover_usv(const Vec3& q, const std::vector<SlotBeams>& beams,
                                  const std::vector<Vec2>& init, const Scenario& s,
                                  const conic::ScaOptions& opts = {}, int stage = 0);

struct AoOptions {
  double tol = 1e-3;
  int max_iterations = 50;
  std::uint64_t seed = 0;
  conic::ScaOptions sca;
};

/// Hover stage: `slots` is the planned hover length, usv_to is ignored and the
/// returned path may be longer when the schedule needs it.
StageSolution alternate_optimize_hover(const StageProblem& p, const Scenario& s, const AoOptions& opts = {});

/// USV straight line from a to b pushed clear of obstacles, resampled to
/// slots + 1 points of equal arc length.
std::vector<Vec2> detour_path(const Vec2& a, const Vec2& b, int slots, const Scenario& s);

}  // namespace airsea
