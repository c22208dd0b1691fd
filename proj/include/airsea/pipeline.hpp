#pragma once

// End-to-end mission planning: hover-point selection, per-stage optimization
// chained over the whole mission, the two baselines, the constraint audit and
// file output.

#include <airsea/hover.hpp>
#include <airsea/stage.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace airsea {

enum class Strategy { proposed, sequential, leader_follower };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

struct PipelineOptions {
  double tol = 1e-3;
  int max_iterations = 50;
  OrderMethod order = OrderMethod::milp;  // Held-Karp is used above 10 hover points
  int max_retries = 6;                    // extra-slot attempts per flying leg
  int max_stretch = 8;                    // leader-follower timeline stretches
  double stretch_step = 1.1;              // factor applied per stretch
  double first_stretch = 1.0;             // lower bound on the leader-follower stretch
};

struct AuditEntry {
  std::string family;
  double max_violation = 0.0;
  int checked = 0;
  bool pass = true;
};

struct Audit {
  std::vector<AuditEntry> entries;
  bool pass() const;
  const AuditEntry& at(const std::string& family) const;
};

inline constexpr double kAuditTolerance = 1e-6;

/// Exact re-evaluation of every constraint family on a chained mission.
/// Rate, SNR, speed and power violations are relative, distances in metres.
Audit audit_mission(const Scenario& s, const Trajectory& traj, const BeamformingSchedule& beams);

/// Cumulative echo SNR of every target over the hover slots.
std::vector<double> cumulative_sensing_snr(const Scenario& s, const Trajectory& traj,
                                           const BeamformingSchedule& beams);

struct StageLog {
  int stage = 0;
  Mode mode = Mode::fly;
  int planned_slots = 0;
  int slots = 0;
  int attempts = 1;
  int iterations = 0;
  bool penalty_used = false;
  bool joint_sensing = false;
  int randomized_slots = 0;
  double rank1_gap = 0.0;
  double energy = 0.0;
  std::vector<double> history;
};

struct PhaseTiming {
  std::string phase;
  double seconds = 0.0;
};

struct MissionResult {
  Strategy strategy = Strategy::proposed;
  std::uint64_t seed = 0;
  ClusterAssignment clusters;
  VisitOrder order;
  HoverPlan plan;
  Trajectory trajectory;
  BeamformingSchedule beams;
  PowerBreakdown energy;
  Audit audit;
  std::vector<StageLog> stages;
  std::vector<PhaseTiming> timings;
  double stretch = 1.0;  // leader-follower flying-time factor

  int hover_points() const { return plan.E; }
  double duration() const { return trajectory.slots() * trajectory.slot_duration; }
};

struct MissionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

MissionResult run_proposed(const Scenario& s, std::uint64_t seed, const PipelineOptions& opts = {});
MissionResult run_sequential(const Scenario& s, std::uint64_t seed, const PipelineOptions& opts = {});
MissionResult run_leader_follower(const Scenario& s, std::uint64_t seed, const PipelineOptions& opts = {});
MissionResult run_mission(const Scenario& s, Strategy strategy, std::uint64_t seed,
                          const PipelineOptions& opts = {});

/// Writes trajectory.csv, beams.json, metrics.json, audit.json, timings.json
/// and scenario.json. Everything except timings.json is deterministic.
void emit_outputs(const MissionResult& r, const Scenario& s, const std::filesystem::path& dir);

nlohmann::json metrics_json(const MissionResult& r, const Scenario& s);
nlohmann::json audit_json(const Audit& a);

struct ValidationReport {
  Audit audit;
  double comm_distance = 0.0;      // D_c at p_c and the flying rate
  double energy_reported = 0.0;
  double energy_recomputed = 0.0;
  std::vector<std::string> errors;  // structural problems in the files
  bool pass() const;
};

/// Re-reads an output directory and audits it without the in-memory result.
ValidationReport validate_outputs(const std::filesystem::path& dir);

enum class SweepAxis { K, sigma, gamma_s, gamma_c, Z, current };

std::string to_string(SweepAxis a);
SweepAxis parse_axis(const std::string& name);

/// K targets drawn from an isotropic Gaussian around the field centre, kept
/// inside [0, field]^2 and at least r1 from obstacles, then rescaled so the
/// sample dispersion equals sigma exactly.
std::vector<Vec2> gaussian_layout(int K, double sigma, double field, const Scenario& s, std::uint64_t seed);

/// Sample dispersion sqrt(sum |t_k - mean|^2 / (K - 1)).
double dispersion(const std::vector<Vec2>& targets);

struct SweepOptions {
  SweepAxis axis = SweepAxis::sigma;
  std::vector<double> values;
  int seeds = 5;
  std::uint64_t first_seed = 1;
  std::vector<Strategy> strategies{Strategy::proposed};
  int K = 15;
  double sigma = 50.0;
  double field = 300.0;
  int threads = 0;  // 0 picks the hardware concurrency
  PipelineOptions pipeline;
};

struct SweepRow {
  double value = 0.0;
  Strategy strategy = Strategy::proposed;
  int runs = 0;
  int failures = 0;
  double energy_mean = 0.0, energy_sd = 0.0;
  double duration_mean = 0.0, duration_sd = 0.0;
  double hover_points_mean = 0.0;
  std::vector<double> energies;  // per seed, NaN for failed runs
};

/// Scenario for one sweep point: the template with the axis value applied
/// and a fresh Gaussian layout for the seed.
Scenario sweep_scenario(const Scenario& base, const SweepOptions& opts, double value, std::uint64_t seed);

std::vector<SweepRow> sweep(const Scenario& base, const SweepOptions& opts);
nlohmann::json to_json(const std::vector<SweepRow>& rows, const SweepOptions& opts);

}  // namespace airsea
