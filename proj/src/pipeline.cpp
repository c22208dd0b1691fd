#include <airsea/channel.hpp>
#include <airsea/pipeline.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace airsea {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::proposed: return "proposed";
    case Strategy::sequential: return "sequential";
    case Strategy::leader_follower: return "leader-follower";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  for (Strategy s : {Strategy::proposed, Strategy::sequential, Strategy::leader_follower})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Smallest slot count whose per-slot step stays strictly below the speed limit.
int strict_slots(double length, double speed, double dt) {
  if (length <= 1e-6) return 0;
  return int(std::floor(length / (speed * dt) * (1.0 + 1e-6))) + 1;
}

class Chain {
 public:
  Chain(const Scenario& s, MissionResult& r) : r_(r) {
    const auto& w = s.world;
    r.trajectory.slot_duration = s.system.slot_duration;
    r.trajectory.uav.push_back(lift(w.uav_start, s.system.altitude));
    r.trajectory.usv.push_back(w.usv_start);
    r.trajectory.mode.push_back(Mode::fly);
    r.trajectory.stage.push_back(0);
    r.beams.slots.emplace_back();
  }

  Vec3 uav() const { return r_.trajectory.uav.back(); }
  Vec2 usv() const { return r_.trajectory.usv.back(); }

  void append(const StageSolution& sol, int stage, Mode mode) {
    auto& t = r_.trajectory;
    for (std::size_t n = 1; n < sol.uav.size(); ++n) {
      t.uav.push_back(sol.uav[n]);
      t.usv.push_back(sol.usv[n]);
      t.mode.push_back(mode);
      t.stage.push_back(stage);
      r_.beams.slots.push_back(sol.beams[n]);
    }
  }

 private:
  MissionResult& r_;
};

StageLog log_of(const StageSolution& sol, int stage, Mode mode, int planned) {
  StageLog l;
  l.stage = stage;
  l.mode = mode;
  l.planned_slots = planned;
  l.slots = int(sol.uav.size()) - 1;
  l.iterations = sol.iterations;
  l.penalty_used = sol.penalty_used;
  l.randomized_slots = sol.randomized_slots;
  l.rank1_gap = sol.rank1_gap;
  l.energy = sol.total();
  l.history = sol.history;
  return l;
}

bool joint(const SensingSchedule& sch) {
  for (const auto& set : sch.targets)
    if (set.size() > 1) return true;
  return false;
}

// Slot count minimising the straight-line energy estimate of a leg from its
// actual start: UAV cruise at constant speed, USV at constant velocity
// against the current sampled along the way.
int retime(const StageProblem& p, const Scenario& s, double usv_length, int min_slots) {
  const auto& sys = s.system;
  const double dt = sys.slot_duration;
  const double lq = (p.uav_to - p.uav_from).head<2>().norm();
  const Vec2 dir = (p.usv_to - p.usv_from).norm() > 0 ? Vec2((p.usv_to - p.usv_from).normalized()) : Vec2::Zero();
  std::vector<Vec2> water;
  for (int i = 0; i < 8; ++i) water.push_back(current_at(s.current, p.usv_from + (i + 0.5) / 8 * (p.usv_to - p.usv_from)));
  auto estimate = [&](int T) {
    const double tau = T * dt;
    double usv = 0.0;
    for (const Vec2& w : water) usv += (usv_length / tau * dir - w).squaredNorm() / water.size();
    return tau * (uav_power_flying(lq / tau, sys) + sys.usv_drag * usv);
  };
  int best = std::max(min_slots, 1);
  for (int T = best + 1; T <= 4 * best + 60; ++T)
    if (estimate(T) < estimate(best)) best = T;
  return best;
}

// Flying leg with extra slots whenever the stage problem turns out infeasible.
StageSolution fly_with_retries(StageProblem p, const Scenario& s, const conic::ScaOptions& sca, int retries,
                               StageLog& log) {
  const double dt = s.system.slot_duration;
  const int planned = p.slots;
  const int uav_need = strict_slots((p.uav_to - p.uav_from).head<2>().norm(), s.system.uav_max_speed, dt);
  p.slots = std::max(p.slots, uav_need);
  if (!p.uav_only) {
    const auto path = detour_path(p.usv_from, p.usv_to, 1, s);
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
    const int need = std::max(uav_need, strict_slots(len, s.system.usv_max_speed, dt));
    p.slots = need == 0 ? 0 : retime(p, s, len, need);
  }
  for (int attempt = 0;; ++attempt) {
    try {
      StageSolution sol = optimize_flying(p, s, sca);
      log = log_of(sol, p.stage, Mode::fly, planned);
      log.attempts = attempt + 1;
      return sol;
    } catch (const StageError&) {
      if (attempt >= retries || p.slots == 0) throw;
      p.slots += std::max(1, p.slots / 4);
    }
  }
}

conic::ScaOptions sca_options(const Scenario& s, const PipelineOptions& o) {
  conic::ScaOptions sca;
  sca.tol = o.tol;
  sca.max_iterations = std::min(o.max_iterations, s.system.max_iterations);
  return sca;
}

AoOptions ao_options(const Scenario& s, const PipelineOptions& o, std::uint64_t seed) {
  AoOptions ao;
  ao.tol = o.tol;
  ao.max_iterations = std::min(o.max_iterations, s.system.max_iterations);
  ao.seed = seed;
  ao.sca = sca_options(s, o);
  return ao;
}

OrderMethod order_method(int E, const PipelineOptions& o) {
  return E > 10 ? OrderMethod::exact_dp : o.order;
}

// Stage-by-stage optimization shared by the proposed scheme and the
// sequential baseline.
void optimize_stages(const Scenario& s, const PipelineOptions& o, MissionResult& r) {
  const auto t0 = Clock::now();
  const auto& plan = r.plan;
  const auto sca = sca_options(s, o);
  Chain chain(s, r);
  for (int e = 1; e <= plan.E + 1; ++e) {
    const bool last = e == plan.E + 1;
    StageProblem f;
    f.stage = e;
    f.mode = Mode::fly;
    f.slots = plan.fly_slots[e - 1];
    f.uav_from = chain.uav();
    f.usv_from = chain.usv();
    f.uav_to = last ? lift(s.world.uav_end, s.system.altitude) : plan.hover[e - 1];
    f.usv_to = last ? s.world.usv_end : plan.usv_arrive[e - 1];
    StageLog log;
    const StageSolution fly = fly_with_retries(f, s, sca, o.max_retries, log);
    chain.append(fly, e, Mode::fly);
    r.stages.push_back(log);
    if (last) break;

    StageProblem h;
    h.stage = e;
    h.mode = Mode::hover;
    h.slots = plan.hover_slots[e - 1];
    h.uav_from = h.uav_to = chain.uav();
    h.usv_from = h.usv_to = chain.usv();
    h.targets = plan.targets[e - 1];
    const StageSolution hov = alternate_optimize_hover(h, s, ao_options(s, o, r.seed * 1000003u + e));
    chain.append(hov, e, Mode::hover);
    r.stages.push_back(log_of(hov, e, Mode::hover, h.slots));
    r.stages.back().joint_sensing = joint(hov.schedule);
  }
  r.timings.push_back({"stages", seconds_since(t0)});
}

void finish(const Scenario& s, MissionResult& r) {
  const auto t0 = Clock::now();
  r.energy = account_trajectory(r.trajectory, r.beams, s.current, s.system);
  r.audit = audit_mission(s, r.trajectory, r.beams);
  r.timings.push_back({"audit", seconds_since(t0)});
  if (!r.audit.pass()) {
    std::string bad;
    for (const auto& e : r.audit.entries)
      if (!e.pass) bad += " " + e.family + "=" + std::to_string(e.max_violation);
    throw MissionError(to_string(r.strategy) + " mission fails the audit:" + bad);
  }
}

ClusterAssignment proposed_clusters(const Scenario& s, std::uint64_t seed) {
  return vbsc_cluster(s.world.targets, [&](int n) { return sensing_radius(n, s); },
                      s.system.max_simultaneous_targets, seed);
}

void plan_route(const Scenario& s, const PipelineOptions& o, MissionResult& r, const RefineOptions& ro) {
  auto t0 = Clock::now();
  r.order = solve_visit_order(build_cost_matrix(r.clusters, s, ro.uav_only), order_method(r.clusters.E, o));
  r.timings.push_back({"ordering", seconds_since(t0)});
  t0 = Clock::now();
  r.plan = refine_hover_plan(r.clusters, r.order, s, ro);
  r.timings.push_back({"refinement", seconds_since(t0)});
}

}  // namespace

MissionResult run_proposed(const Scenario& s, std::uint64_t seed, const PipelineOptions& o) {
  validate(s);
  MissionResult r;
  r.strategy = Strategy::proposed;
  r.seed = seed;
  const auto t0 = Clock::now();
  r.clusters = proposed_clusters(s, seed);
  r.timings.push_back({"clustering", seconds_since(t0)});
  RefineOptions ro;
  ro.sca = sca_options(s, o);
  plan_route(s, o, r, ro);
  optimize_stages(s, o, r);
  finish(s, r);
  return r;
}

MissionResult run_sequential(const Scenario& s, std::uint64_t seed, const PipelineOptions& o) {
  validate(s);
  MissionResult r;
  r.strategy = Strategy::sequential;
  r.seed = seed;
  const auto t0 = Clock::now();
  const int K = int(s.world.targets.size());
  r.clusters.E = K;
  for (int k = 0; k < K; ++k) {
    r.clusters.clusters.push_back({k});
    r.clusters.centroids.push_back(s.world.targets[k]);
    r.clusters.cluster_of.push_back(k);
  }
  r.timings.push_back({"clustering", seconds_since(t0)});
  RefineOptions ro;
  ro.fix_hover = true;
  ro.sca = sca_options(s, o);
  plan_route(s, o, r, ro);
  optimize_stages(s, o, r);
  finish(s, r);
  return r;
}

namespace {

// Point where the follower USV is sent before a leader hover: on the UAV's
// approach side at the distance the link closes at p_c. Depends only on the
// leader path, so the leader timeline never sees the USV.
Vec2 rendezvous(const Vec3& hover, const Vec3& before, const Scenario& s) {
  const auto& sys = s.system;
  const double dc = comm_distance_threshold(s.requirements.rate_hover, sys.comm_power, sys);
  const double radius = 0.9 * std::sqrt(std::max(0.0, dc * dc - sys.altitude * sys.altitude));
  Vec2 dir = ground(before) - ground(hover);
  dir = dir.norm() > 1e-9 ? Vec2(dir.normalized()) : Vec2(-1.0, 0.0);
  const double clear = 1.2 * sys.obstacle_radius;
  for (int i = 0; i < 24; ++i) {
    const double a = (i % 2 ? 1 : -1) * ((i + 1) / 2) * M_PI / 12.0;
    const Vec2 d(std::cos(a) * dir.x() - std::sin(a) * dir.y(), std::sin(a) * dir.x() + std::cos(a) * dir.y());
    const Vec2 p = ground(hover) + radius * d;
    bool ok = true;
    for (const Vec2& o : s.world.obstacles) ok = ok && (p - o).norm() >= clear;
    if (ok) return p;
  }
  return ground(hover);
}

double usv_route_length(const Vec2& a, const Vec2& b, const Scenario& s) {
  const auto path = detour_path(a, b, 1, s);
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
  return len;
}

// Leader hover geometry: rendezvous points and sensing schedules. Built from
// the UAV plan alone, as is everything else on the leader side.
struct LeaderHover {
  Vec2 rendezvous = Vec2::Zero();
  HoverSetup setup;
};

std::vector<LeaderHover> leader_hovers(const Scenario& s, const HoverPlan& plan) {
  std::vector<LeaderHover> out;
  Vec3 before = lift(s.world.uav_start, s.system.altitude);
  for (int e = 1; e <= plan.E; ++e) {
    LeaderHover h;
    h.rendezvous = rendezvous(plan.hover[e - 1], before, s);
    h.setup = plan_hover(plan.hover[e - 1], h.rendezvous, plan.targets[e - 1], plan.hover_slots[e - 1], s, e);
    before = plan.hover[e - 1];
    out.push_back(std::move(h));
  }
  return out;
}

// Slots the follower needs on each leg between the nominal USV positions.
std::vector<int> follower_needs(const Scenario& s, const HoverPlan& plan, const std::vector<LeaderHover>& hovers) {
  std::vector<int> need;
  Vec2 from = s.world.usv_start;
  for (int e = 1; e <= plan.E + 1; ++e) {
    const Vec2 to = e <= plan.E ? hovers[e - 1].rendezvous : s.world.usv_end;
    need.push_back(strict_slots(usv_route_length(from, to, s), s.system.usv_max_speed, s.system.slot_duration));
    if (e <= plan.E) from = hovers[e - 1].setup.usv.back();
  }
  return need;
}

// UAV flying legs of the leader with the planned durations scaled by
// `stretch`; the closing leg is also slowed to what the follower needs.
std::vector<StageSolution> leader_legs(const Scenario& s, const HoverPlan& plan, double stretch, int closing_need,
                                       const conic::ScaOptions& sca) {
  std::vector<StageSolution> out;
  Vec3 q = lift(s.world.uav_start, s.system.altitude);
  const double dt = s.system.slot_duration;
  for (int e = 1; e <= plan.E + 1; ++e) {
    const bool last = e == plan.E + 1;
    StageProblem f;
    f.stage = e;
    f.uav_only = true;
    f.uav_from = q;
    f.uav_to = last ? lift(s.world.uav_end, s.system.altitude) : plan.hover[e - 1];
    const int need = strict_slots((f.uav_to - f.uav_from).head<2>().norm(), s.system.uav_max_speed, dt);
    f.slots = std::max(need, int(std::ceil(plan.fly_slots[e - 1] * stretch - 1e-9)));
    if (last) f.slots = std::max(f.slots, closing_need);
    out.push_back(optimize_flying(f, s, sca));
    q = f.uav_to;
  }
  return out;
}

}  // namespace

MissionResult run_leader_follower(const Scenario& s, std::uint64_t seed, const PipelineOptions& o) {
  validate(s);
  MissionResult r;
  r.strategy = Strategy::leader_follower;
  r.seed = seed;
  auto t0 = Clock::now();
  r.clusters = proposed_clusters(s, seed);
  r.timings.push_back({"clustering", seconds_since(t0)});
  RefineOptions ro;
  ro.uav_only = true;
  ro.sca = sca_options(s, o);
  plan_route(s, o, r, ro);

  t0 = Clock::now();
  const auto sca = sca_options(s, o);
  const auto hovers = leader_hovers(s, r.plan);
  const auto need = follower_needs(s, r.plan, hovers);
  double base = o.first_stretch;
  for (int e = 1; e <= r.plan.E; ++e)
    if (need[e - 1] > 0) base = std::max(base, double(need[e - 1]) / std::max(1, r.plan.fly_slots[e - 1]));

  // Closing leg: slowed to the still-water energy optimum of the follower's
  // nominal route, which keeps the leader independent of the current.
  int closing = need.back();
  if (closing > 0) {
    Scenario still = s;
    still.current = CurrentField{};
    StageProblem f;
    f.uav_from = r.plan.E > 0 ? r.plan.hover.back() : lift(s.world.uav_start, s.system.altitude);
    f.uav_to = lift(s.world.uav_end, s.system.altitude);
    f.usv_from = r.plan.E > 0 ? hovers.back().setup.usv.back() : s.world.usv_start;
    f.usv_to = s.world.usv_end;
    closing = retime(f, still, usv_route_length(f.usv_from, f.usv_to, s), closing);
  }

  std::string last_error;
  for (int round = 0; round <= o.max_stretch; ++round) {
    const double stretch = base * std::pow(o.stretch_step, round);
    MissionResult attempt = r;
    attempt.stretch = stretch;
    try {
      const auto legs = leader_legs(s, r.plan, stretch, closing, sca);
      Chain chain(s, attempt);
      for (int e = 1; e <= r.plan.E + 1; ++e) {
        const StageSolution& leg = legs[e - 1];
        const bool last = e == r.plan.E + 1;
        StageProblem f;
        f.stage = e;
        f.slots = int(leg.uav.size()) - 1;
        f.uav_from = leg.uav.front();
        f.uav_to = leg.uav.back();
        f.uav_path = leg.uav;
        f.usv_from = chain.usv();
        f.usv_to = last ? s.world.usv_end : hovers[e - 1].rendezvous;
        if (f.slots == 0 && (f.usv_to - f.usv_from).norm() > 1e-6)
          throw StageError(e, "follower needs time the leader does not spend");
        const StageSolution fly = optimize_flying(f, s, sca);
        chain.append(fly, e, Mode::fly);
        attempt.stages.push_back(log_of(fly, e, Mode::fly, r.plan.fly_slots[e - 1]));
        if (last) break;

        const HoverSetup& setup = hovers[e - 1].setup;
        StageProblem h;
        h.stage = e;
        h.mode = Mode::hover;
        h.slots = setup.schedule.slots();
        h.uav_from = h.uav_to = f.uav_to;
        h.usv_from = h.usv_to = chain.usv();
        h.targets = r.plan.targets[e - 1];
        h.schedule = setup.schedule;
        h.warm_usv = setup.usv;
        const StageSolution hov = alternate_optimize_hover(h, s, ao_options(s, o, seed * 1000003u + e));
        chain.append(hov, e, Mode::hover);
        attempt.stages.push_back(log_of(hov, e, Mode::hover, r.plan.hover_slots[e - 1]));
        attempt.stages.back().joint_sensing = joint(hov.schedule);
      }
      attempt.timings.push_back({"stages", seconds_since(t0)});
      finish(s, attempt);
      return attempt;
    } catch (const StageError& e) {
      last_error = e.what();
    }
  }
  throw MissionError("leader-follower: follower infeasible after " + std::to_string(o.max_stretch) +
                     " timeline stretches (" + last_error + ")");
}

MissionResult run_mission(const Scenario& s, Strategy strategy, std::uint64_t seed, const PipelineOptions& o) {
  switch (strategy) {
    case Strategy::proposed: return run_proposed(s, seed, o);
    case Strategy::sequential: return run_sequential(s, seed, o);
    case Strategy::leader_follower: return run_leader_follower(s, seed, o);
  }
  throw std::invalid_argument("unknown strategy");
}

}  // namespace airsea
