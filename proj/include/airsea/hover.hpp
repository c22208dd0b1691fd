#pragma once

// Hover-point selection: capacity-limited clustering of targets, the joint
// UAV/USV visiting order, and refinement of hover points and stage durations.

#include <airsea/conic/sca.hpp>
#include <airsea/energy.hpp>
#include <airsea/scenario.hpp>

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace airsea {

struct ClusterAssignment {
  int E = 0;
  std::vector<std::vector<int>> clusters;  // target indices per cluster
  std::vector<Vec2> centroids;
  std::vector<int> cluster_of;             // per target
};

/// Horizontal coverage radius of a hover point serving `size` targets.
using CoverageRadius = std::function<double(int size)>;

int initial_cluster_count(int K, int Z);

ClusterAssignment vbsc_cluster(const std::vector<Vec2>& targets, const CoverageRadius& radius, int Z,
                               std::uint64_t seed);
ClusterAssignment vbsc_cluster(const std::vector<Vec2>& targets, double radius, int Z, std::uint64_t seed);

/// Horizontal radius within which one hover point meets the instantaneous
/// sensing SNR for each of `size` targets sharing the sensing power evenly.
double sensing_radius(int size, const Scenario& s);

/// Hybrid UAV + USV energy for moving between two nodes at the given speeds.
double bi_tspn_cost(const Vec2& uav_from, const Vec2& uav_to, const Vec2& usv_from, const Vec2& usv_to,
                    const CurrentField& field, double v_uav, double v_usv, const SystemParams& sys);
double bi_tspn_cost(const Vec2& ci, const Vec2& cj, const CurrentField& field, double v_uav, double v_usv,
                    const SystemParams& sys);

/// UAV speed minimising energy per metre, p_f(v) / v.
double max_range_speed(const SystemParams& sys);

/// Node 0 is the start, 1..E the centroids, E+1 the end.
struct CostMatrix {
  Eigen::MatrixXd cost;
  int centroids() const { return int(cost.rows()) - 2; }
};

/// Set `uav_only` to price the UAV leg alone (leader-follower planning).
CostMatrix build_cost_matrix(const ClusterAssignment& a, const Scenario& s, bool uav_only = false);

struct VisitOrder {
  std::vector<int> path;  // node indices from 0 to E+1
  double cost = 0.0;
  std::vector<double> mtz;  // u_i per centroid (position in the path)
  int nodes_explored = 0;
};

enum class OrderMethod { exact_dp, milp };

struct OrderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

VisitOrder solve_visit_order(const CostMatrix& costs, OrderMethod method);

struct HoverPlan {
  int E = 0;
  std::vector<Vec3> hover;          // q_e
  std::vector<Vec2> usv_arrive;     // b_e^f
  std::vector<Vec2> usv_depart;     // b_e^h
  std::vector<double> fly_time;     // E+1 legs, the last one to the end points
  std::vector<double> hover_time;   // E
  std::vector<double> uav_speed;    // E+1
  std::vector<double> usv_fly_speed;    // E+1
  std::vector<double> usv_hover_speed;  // E
  std::vector<std::vector<int>> targets;  // r_{k,e} as index lists
  std::vector<int> fly_slots;       // discretized durations
  std::vector<int> hover_slots;
  std::vector<double> history;      // exact chi_Delta per SCA iteration
  double estimate = 0.0;
  bool penalty_used = false;

  /// Slot index closing flying leg e (m_e) and hover e (n_e), 1-based stages.
  int m(int e) const;
  int n(int e) const;
  int total_slots() const;
};

struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RefineOptions {
  bool fix_hover = false;  // keep hover points at the cluster centroids
  bool uav_only = false;   // ignore the USV (leader planning)
  conic::ScaOptions sca;
};

HoverPlan refine_hover_plan(const ClusterAssignment& a, const VisitOrder& order, const Scenario& s,
                            const RefineOptions& opts = {});

/// Exact re-check of the plan invariants; returns an empty string when all hold.
std::string check_hover_plan(const HoverPlan& plan, const Scenario& s, bool uav_only = false);

nlohmann::json to_json(const HoverPlan& plan);

}  // namespace airsea
