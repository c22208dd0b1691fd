#include <airsea/channel.hpp>
#include <airsea/pipeline.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace airsea {

bool Audit::pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const AuditEntry& e) { return e.pass; });
}

const AuditEntry& Audit::at(const std::string& family) const {
  for (const auto& e : entries)
    if (e.family == family) return e;
  throw std::out_of_range("no audit family '" + family + "'");
}

std::vector<double> cumulative_sensing_snr(const Scenario& s, const Trajectory& traj,
                                           const BeamformingSchedule& beams) {
  const auto& targets = s.world.targets;
  std::vector<double> total(targets.size(), 0.0);
  for (std::size_t n = 1; n < traj.uav.size(); ++n) {
    if (traj.mode[n] != Mode::hover) continue;
    const SlotBeams& b = beams.slots[n];
    for (std::size_t k = 0; k < targets.size() && k < b.active.size(); ++k)
      if (b.active[k])
        total[k] += sensing_snr(traj.uav[n], targets, k, b.v, combiner(traj.uav[n], targets[k], s.system),
                                b.active, s.system);
  }
  return total;
}

namespace {

struct Tally {
  AuditEntry e;
  explicit Tally(std::string family) { e.family = std::move(family); }
  void add(double violation) {
    e.max_violation = std::max(e.max_violation, std::isnan(violation) ? INFINITY : violation);
    ++e.checked;
  }
  AuditEntry done() {
    e.pass = e.max_violation <= kAuditTolerance;
    return e;
  }
};

double shortfall(double value, double required) {
  if (required <= 0.0) return value >= required ? 0.0 : -value;
  return std::max(0.0, 1.0 - value / required);
}

double excess(double value, double limit) { return std::max(0.0, value / limit - 1.0); }

}  // namespace

Audit audit_mission(const Scenario& s, const Trajectory& traj, const BeamformingSchedule& beams) {
  const auto& sys = s.system;
  const auto& req = s.requirements;
  const std::size_t N = traj.slots();
  if (traj.usv.size() != N + 1 || traj.mode.size() != N + 1 || traj.stage.size() != N + 1 ||
      beams.slots.size() != N + 1)
    throw std::invalid_argument("audit_mission: schedule/trajectory length mismatch");
  const double dt = traj.slot_duration;

  Tally fly_rate("flying_rate"), hover_rate_t("hover_rate"), snr("cumulative_sensing_snr"),
      power("power_budget"), uav_speed("uav_speed"), usv_speed("usv_speed"), obstacle("obstacle_clearance"),
      altitude("altitude"), sync("endpoint_sync"), capacity("hover_capacity"), mode("mode_consistency");

  const auto& w = s.world;
  sync.add((ground(traj.uav.front()) - w.uav_start).norm());
  sync.add((traj.usv.front() - w.usv_start).norm());
  sync.add((ground(traj.uav.back()) - w.uav_end).norm());
  sync.add((traj.usv.back() - w.usv_end).norm());

  for (std::size_t n = 0; n <= N; ++n) {
    altitude.add(std::abs(traj.uav[n].z() - sys.altitude) / sys.altitude);
    for (const Vec2& o : w.obstacles) obstacle.add(std::max(0.0, 1.0 - (traj.usv[n] - o).norm() / sys.obstacle_radius));
    if (n == 0) continue;

    const SlotBeams& b = beams.slots[n];
    const Vec3& q = traj.uav[n];
    uav_speed.add(excess((traj.uav[n] - traj.uav[n - 1]).norm() / dt, sys.uav_max_speed));
    usv_speed.add(excess((traj.usv[n] - traj.usv[n - 1]).norm() / dt, sys.usv_max_speed));
    power.add(excess(b.comm_power() + b.sense_power(), sys.power_budget));
    const CVec w0 = b.w.size() ? b.w : CVec::Zero(sys.num_antennas);
    int active = 0;
    for (std::size_t k = 0; k < b.active.size(); ++k) active += b.active[k] ? 1 : 0;
    if (traj.mode[n] == Mode::fly) {
      fly_rate.add(shortfall(flying_rate(q, traj.usv[n], w0, sys), req.rate_fly));
      mode.add(b.sense_power() + active);
    } else {
      hover_rate_t.add(shortfall(hover_rate(q, traj.usv[n], w0, b.v, b.active, sys), req.rate_hover));
      capacity.add(std::max(0, active - sys.max_simultaneous_targets));
      mode.add((traj.uav[n] - traj.uav[n - 1]).norm());
    }
  }
  const auto cum = cumulative_sensing_snr(s, traj, beams);
  for (double c : cum) snr.add(shortfall(c, req.total_snr));

  Audit a;
  for (Tally* t : {&fly_rate, &hover_rate_t, &snr, &power, &uav_speed, &usv_speed, &obstacle, &altitude, &sync,
                   &capacity, &mode})
    a.entries.push_back(t->done());
  return a;
}

nlohmann::json audit_json(const Audit& a) {
  nlohmann::json families = nlohmann::json::array();
  for (const auto& e : a.entries)
    families.push_back(
        {{"family", e.family}, {"max_violation", e.max_violation}, {"checked", e.checked}, {"pass", e.pass}});
  return {{"tolerance", kAuditTolerance}, {"pass", a.pass()}, {"families", families}};
}

namespace {

nlohmann::json complex_vec(const CVec& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

CVec parse_complex_vec(const nlohmann::json& j) {
  CVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = {j[i].at(0).get<double>(), j[i].at(1).get<double>()};
  return v;
}

nlohmann::json beams_json(const BeamformingSchedule& beams) {
  nlohmann::json slots = nlohmann::json::array();
  for (std::size_t n = 0; n < beams.slots.size(); ++n) {
    const SlotBeams& b = beams.slots[n];
    nlohmann::json sensing = nlohmann::json::array();
    for (std::size_t k = 0; k < b.active.size(); ++k)
      if (b.active[k]) sensing.push_back({{"target", k}, {"v", complex_vec(b.v[k])}});
    slots.push_back({{"slot", n}, {"w", complex_vec(b.w)}, {"sensing", sensing}});
  }
  return {{"slots", slots}};
}

const char* mode_name(Mode m) { return m == Mode::fly ? "fly" : "hover"; }

std::string trajectory_csv(const Trajectory& t, const BeamformingSchedule& beams, const Scenario& s) {
  const auto& sys = s.system;
  const double dt = t.slot_duration;
  std::string out =
      "stage,slot,time_s,mode,uav_x,uav_y,uav_z,usv_x,usv_y,p_comm_W,p_sense_W,uav_prop_W,usv_prop_W\n";
  char line[512];
  for (std::size_t n = 0; n < t.uav.size(); ++n) {
    double uav = 0.0, usv = 0.0;
    if (n > 0) {
      uav = uav_power_flying((t.uav[n] - t.uav[n - 1]).norm() / dt, sys);
      usv = usv_power((t.usv[n] - t.usv[n - 1]) / dt, current_at(s.current, t.usv[n]), sys);
    }
    std::snprintf(line, sizeof line, "%d,%zu,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  t.stage[n], n, n * dt, mode_name(t.mode[n]), t.uav[n].x(), t.uav[n].y(), t.uav[n].z(),
                  t.usv[n].x(), t.usv[n].y(), beams.slots[n].comm_power(), beams.slots[n].sense_power(), uav,
                  usv);
    out += line;
  }
  return out;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
  if (!f) throw std::runtime_error("write failed: " + p.string());
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

nlohmann::json metrics_json(const MissionResult& r, const Scenario& s) {
  int fly = 0, hover = 0;
  for (std::size_t n = 1; n < r.trajectory.mode.size(); ++n) (r.trajectory.mode[n] == Mode::fly ? fly : hover)++;
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& l : r.stages)
    stages.push_back({{"stage", l.stage},
                      {"mode", mode_name(l.mode)},
                      {"planned_slots", l.planned_slots},
                      {"slots", l.slots},
                      {"attempts", l.attempts},
                      {"iterations", l.iterations},
                      {"penalty_used", l.penalty_used},
                      {"joint_sensing", l.joint_sensing},
                      {"randomized_slots", l.randomized_slots},
                      {"rank1_gap", l.rank1_gap},
                      {"energy_J", l.energy},
                      {"history", l.history}});
  const double dt = r.trajectory.slot_duration;
  return {{"strategy", to_string(r.strategy)},
          {"seed", r.seed},
          {"hover_points", r.hover_points()},
          {"visit_order", r.order.path},
          {"slots", r.trajectory.slots()},
          {"duration_s", r.duration()},
          {"flying_s", fly * dt},
          {"hovering_s", hover * dt},
          {"stretch", r.stretch},
          {"comm_distance_m", comm_distance_threshold(s.requirements.rate_fly, s.system.comm_power, s.system)},
          {"plan_estimate_J", r.plan.estimate},
          {"energy", to_json(r.energy)},
          {"stages", stages}};
}

void emit_outputs(const MissionResult& r, const Scenario& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "trajectory.csv", trajectory_csv(r.trajectory, r.beams, s));
  write_file(dir / "beams.json", beams_json(r.beams).dump() + "\n");
  write_file(dir / "metrics.json", metrics_json(r, s).dump(2) + "\n");
  write_file(dir / "audit.json", audit_json(r.audit).dump(2) + "\n");
  write_file(dir / "scenario.json", scenario_to_json(s).dump(2) + "\n");
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& t : r.timings) timings[t.phase] = t.seconds;
  write_file(dir / "timings.json", timings.dump(2) + "\n");
}

bool ValidationReport::pass() const {
  return errors.empty() && audit.pass() &&
         std::abs(energy_recomputed - energy_reported) <= 1e-9 * std::max(1.0, std::abs(energy_reported));
}

ValidationReport validate_outputs(const std::filesystem::path& dir) {
  ValidationReport rep;
  const Scenario s = load_scenario(dir / "scenario.json");
  rep.comm_distance = comm_distance_threshold(s.requirements.rate_fly, s.system.comm_power, s.system);

  Trajectory t;
  t.slot_duration = s.system.slot_duration;
  std::istringstream csv(read_file(dir / "trajectory.csv"));
  std::string line;
  std::getline(csv, line);
  if (line.rfind("stage,slot,time_s,mode,uav_x", 0) != 0) rep.errors.push_back("trajectory.csv: unexpected header");
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 13) {
      rep.errors.push_back("trajectory.csv: row with " + std::to_string(f.size()) + " columns");
      continue;
    }
    if (std::stoul(f[1]) != t.uav.size()) rep.errors.push_back("trajectory.csv: slot index out of sequence");
    t.stage.push_back(std::stoi(f[0]));
    t.mode.push_back(f[3] == "hover" ? Mode::hover : Mode::fly);
    t.uav.emplace_back(std::stod(f[4]), std::stod(f[5]), std::stod(f[6]));
    t.usv.emplace_back(std::stod(f[7]), std::stod(f[8]));
  }

  BeamformingSchedule beams;
  const auto bj = nlohmann::json::parse(read_file(dir / "beams.json"));
  for (const auto& sj : bj.at("slots")) {
    SlotBeams b;
    b.w = parse_complex_vec(sj.at("w"));
    b.v.assign(s.world.targets.size(), CVec());
    b.active.assign(s.world.targets.size(), false);
    for (const auto& v : sj.at("sensing")) {
      const std::size_t k = v.at("target").get<std::size_t>();
      if (k >= s.world.targets.size()) {
        rep.errors.push_back("beams.json: target index out of range");
        continue;
      }
      b.v[k] = parse_complex_vec(v.at("v"));
      b.active[k] = true;
    }
    beams.slots.push_back(std::move(b));
  }
  if (beams.slots.size() != t.uav.size()) {
    rep.errors.push_back("beams.json: " + std::to_string(beams.slots.size()) + " slots for " +
                         std::to_string(t.uav.size()) + " trajectory rows");
    return rep;
  }
  if (t.uav.empty()) {
    rep.errors.push_back("trajectory.csv: no rows");
    return rep;
  }
  rep.audit = audit_mission(s, t, beams);
  rep.energy_recomputed = account_trajectory(t, beams, s.current, s.system).total();
  const auto metrics = nlohmann::json::parse(read_file(dir / "metrics.json"));
  rep.energy_reported = metrics.at("energy").at("total_J").get<double>();
  if (metrics.at("slots").get<std::size_t>() + 1 != t.uav.size())
    rep.errors.push_back("metrics.json: slot count disagrees with trajectory.csv");
  return rep;
}

}  // namespace airsea
