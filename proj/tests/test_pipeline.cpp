#include <doctest.h>

#include <airsea/channel.hpp>
#include <airsea/pipeline.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace airsea;
namespace fs = std::filesystem;

namespace {

Scenario small_world() {
  Scenario s = reference_scenario();
  s.world.uav_start = s.world.usv_start = Vec2(0, 0);
  s.world.uav_end = s.world.usv_end = Vec2(200, 0);
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("airsea_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Straight mission with one stationary hover, built by hand.
void toy_mission(const Scenario& s, Trajectory& t, BeamformingSchedule& b) {
  t.slot_duration = 1.0;
  const double H = s.system.altitude;
  for (int n = 0; n <= 4; ++n) {
    t.uav.push_back(Vec3(10.0 * n, 0, H));
    t.usv.push_back(Vec2(5.0 * n, 0));
    t.mode.push_back(Mode::fly);
    t.stage.push_back(n == 0 ? 0 : 1);
  }
  for (int n = 0; n <= 4; ++n) {
    SlotBeams bm;
    if (n > 0) {
      const double p = comm_power_for_rate((t.uav[n] - lift(t.usv[n], 0)).norm(), s.requirements.rate_fly, s.system);
      bm.w = mrt_beamformer(t.uav[n], lift(t.usv[n], 0), p, s.system);
    }
    b.slots.push_back(bm);
  }
}

}  // namespace

TEST_CASE("strategy and axis names round-trip") {
  for (Strategy s : {Strategy::proposed, Strategy::sequential, Strategy::leader_follower})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK_THROWS(parse_strategy("greedy"));
  for (SweepAxis a : {SweepAxis::K, SweepAxis::sigma, SweepAxis::gamma_s, SweepAxis::gamma_c, SweepAxis::Z,
                      SweepAxis::current})
    CHECK(parse_axis(to_string(a)) == a);
  CHECK_THROWS(parse_axis("altitude"));
}

TEST_CASE("gaussian layouts hit the requested dispersion exactly") {
  Scenario s = reference_scenario();
  s.world.obstacles = {Vec2(150, 70), Vec2(80, 210)};
  for (double sigma : {20.0, 30.0, 50.0, 80.0})
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto t = gaussian_layout(15, sigma, 300.0, s, seed);
      REQUIRE(t.size() == 15);
      // Independent dispersion: mean of squared deviations with K - 1.
      double mx = 0, my = 0;
      for (const Vec2& p : t) mx += p.x() / 15, my += p.y() / 15;
      double ss = 0;
      for (const Vec2& p : t) ss += (p.x() - mx) * (p.x() - mx) + (p.y() - my) * (p.y() - my);
      CHECK(std::sqrt(ss / 14) == doctest::Approx(sigma).epsilon(1e-12));
      for (const Vec2& p : t) {
        CHECK(p.x() >= 0.0);
        CHECK(p.y() <= 300.0);
        for (const Vec2& o : s.world.obstacles) CHECK((p - o).norm() >= s.system.obstacle_radius);
      }
      CHECK(gaussian_layout(15, sigma, 300.0, s, seed) == t);
    }
  CHECK(gaussian_layout(15, 30.0, 300.0, s, 1) != gaussian_layout(15, 30.0, 300.0, s, 2));
}

TEST_CASE("sweep scenarios keep the layout fixed across non-geometric axis values") {
  const Scenario base = small_world();
  SweepOptions so;
  so.axis = SweepAxis::Z;
  const Scenario a = sweep_scenario(base, so, 2, 5), b = sweep_scenario(base, so, 8, 5);
  CHECK(a.world.targets == b.world.targets);
  CHECK(a.system.max_simultaneous_targets == 2);
  CHECK(b.system.max_simultaneous_targets == 8);
  so.axis = SweepAxis::gamma_s;
  CHECK(sweep_scenario(base, so, 5.0, 5).requirements.inst_snr == doctest::Approx(std::pow(10.0, 0.5)));
  so.axis = SweepAxis::current;
  const Scenario c = sweep_scenario(base, so, -3.0, 5);
  CHECK(c.current.kind == CurrentKind::analytic_wave);
  CHECK(c.current.max_speed == -3.0);
}

TEST_CASE("sweep layout whose hover SDP stalls near the gap target still plans") {
  Scenario base = load_scenario(std::string(AIRSEA_SCENARIO_DIR) + "/table1.json");
  base.requirements.inst_snr = db_to_linear(1.0);
  SweepOptions so;
  so.axis = SweepAxis::Z;
  const Scenario s = sweep_scenario(base, so, 2, 3);
  const MissionResult r = run_proposed(s, 3);
  CHECK(r.hover_points() == 8);
  CHECK(r.audit.pass());
}

TEST_CASE("audit reports each family with its worst violation") {
  Scenario s = small_world();
  s.world.uav_end = s.world.usv_end = Vec2(40, 0);
  s.world.usv_end = Vec2(20, 0);
  Trajectory t;
  BeamformingSchedule b;
  toy_mission(s, t, b);
  Audit a = audit_mission(s, t, b);
  CHECK(a.pass());
  CHECK(a.entries.size() == 11);
  CHECK(a.at("flying_rate").checked == 4);
  CHECK(a.at("endpoint_sync").max_violation == 0.0);

  // USV 20% over its top speed in the last slot.
  Trajectory fast = t;
  fast.usv[4] = fast.usv[3] + Vec2(1.2 * s.system.usv_max_speed, 0);
  s.world.usv_end = fast.usv[4];
  a = audit_mission(s, fast, b);
  CHECK(a.at("usv_speed").max_violation == doctest::Approx(0.2));
  CHECK_FALSE(a.at("usv_speed").pass);
  s.world.usv_end = Vec2(20, 0);

  // End point 3 m short and an obstacle 4 m from a USV position.
  s.world.uav_end = Vec2(43, 0);
  s.world.obstacles = {Vec2(10, 6)};
  a = audit_mission(s, t, b);
  CHECK(a.at("endpoint_sync").max_violation == doctest::Approx(3.0));
  CHECK(a.at("obstacle_clearance").max_violation == doctest::Approx(1.0 - 6.0 / 10.0));
  CHECK_FALSE(a.pass());

  // Sensing during a flying slot breaks mode consistency.
  s = small_world();
  s.world.uav_end = Vec2(40, 0);
  s.world.usv_end = Vec2(20, 0);
  s.world.targets = {Vec2(40, 0)};
  BeamformingSchedule sensed = b;
  for (auto& bm : sensed.slots) {
    bm.v = {CVec::Zero(s.system.num_antennas)};
    bm.active = {false};
  }
  sensed.slots[2].active = {true};
  a = audit_mission(s, t, sensed);
  CHECK_FALSE(a.at("mode_consistency").pass);
  CHECK_FALSE(a.at("cumulative_sensing_snr").pass);
}

TEST_CASE("single target at the midpoint gives one hover point and a clean audit") {
  Scenario s = small_world();
  s.world.targets = {Vec2(100, 0)};
  const MissionResult r = run_proposed(s, 1);
  CHECK(r.hover_points() == 1);
  REQUIRE(r.stages.size() == 3);
  CHECK(r.stages[0].mode == Mode::fly);
  CHECK(r.stages[1].mode == Mode::hover);
  CHECK(r.stages[2].mode == Mode::fly);
  CHECK(r.audit.pass());
  const auto& t = r.trajectory;
  CHECK((ground(t.uav.back()) - s.world.uav_end).norm() <= 1e-6);
  CHECK((t.usv.back() - s.world.usv_end).norm() <= 1e-6);
  CHECK(t.uav.size() == r.beams.slots.size());
  // Stages are contiguous: stage ids never decrease and the mode matches the log.
  for (std::size_t n = 2; n < t.stage.size(); ++n) CHECK(t.stage[n] >= t.stage[n - 1]);
  double total = 0.0;
  for (const auto& l : r.stages) total += l.energy;
  CHECK(total == doctest::Approx(r.energy.total()).epsilon(1e-9));
  const auto snr = cumulative_sensing_snr(s, t, r.beams);
  CHECK(snr[0] >= s.requirements.total_snr * (1 - 1e-6));
}

TEST_CASE("sequential access hovers once per target with the same structure as the proposed scheme for K=1") {
  Scenario s = small_world();
  s.world.targets = {Vec2(100, 0)};
  const MissionResult seq = run_sequential(s, 1);
  CHECK(seq.hover_points() == 1);
  CHECK(seq.stages.size() == 3);
  CHECK(seq.audit.pass());
  CHECK((ground(seq.plan.hover[0]) - s.world.targets[0]).norm() < 1e-9);

  s.world.targets = {Vec2(60, 10), Vec2(100, -10), Vec2(140, 5)};
  const MissionResult three = run_sequential(s, 1);
  CHECK(three.hover_points() == 3);
  for (int e = 0; e < 3; ++e) {
    const auto& c = three.plan.targets[e];
    REQUIRE(c.size() == 1);
    CHECK((ground(three.plan.hover[e]) - s.world.targets[c[0]]).norm() < 1e-9);
  }
  CHECK(three.audit.pass());
}

TEST_CASE("leader-follower UAV path ignores the current") {
  Scenario s = small_world();
  s.world.targets = {Vec2(80, 20), Vec2(120, -20)};
  s.current.kind = CurrentKind::analytic_wave;
  s.current.max_speed = 3.0;
  const MissionResult up = run_leader_follower(s, 3);
  s.current.max_speed = -3.0;
  const MissionResult down = run_leader_follower(s, 3);
  CHECK(up.trajectory.uav == down.trajectory.uav);
  CHECK(up.trajectory.usv != down.trajectory.usv);
  CHECK(up.energy.usv_propulsion != down.energy.usv_propulsion);
  CHECK(up.audit.pass());
  CHECK(down.audit.pass());
  CHECK(up.stretch >= 1.0);
}

TEST_CASE("follower leg keeps the given UAV positions") {
  const Scenario s = small_world();
  StageProblem p;
  p.stage = 2;
  p.slots = 12;
  for (int n = 0; n <= p.slots; ++n) p.uav_path.push_back(Vec3(10.0 * n, 30.0, s.system.altitude));
  p.uav_from = p.uav_path.front();
  p.uav_to = p.uav_path.back();
  p.usv_from = Vec2(0, 0);
  p.usv_to = Vec2(100, 0);
  const StageSolution r = optimize_flying(p, s);
  CHECK(r.uav == p.uav_path);
  CHECK((r.usv.back() - p.usv_to).norm() < 1e-9);
  for (int n = 1; n <= p.slots; ++n) {
    CHECK(flying_rate(r.uav[n], r.usv[n], r.beams[n].w, s.system) >=
          s.requirements.rate_fly * (1 - 1e-9));
    CHECK((r.usv[n] - r.usv[n - 1]).norm() <= s.system.usv_max_speed * (1 + 1e-7));
  }
  p.uav_path.pop_back();
  CHECK_THROWS_AS(optimize_flying(p, s), StageError);
}

TEST_CASE("outputs round-trip through validate and are deterministic") {
  Scenario s = small_world();
  s.world.targets = {Vec2(90, 15), Vec2(110, -15)};
  s.world.obstacles = {Vec2(60, -40)};
  const MissionResult r = run_proposed(s, 4);
  TempDir a("out_a"), b("out_b");
  emit_outputs(r, s, a.path);
  emit_outputs(run_proposed(s, 4), s, b.path);
  CHECK(slurp(a.path / "metrics.json") == slurp(b.path / "metrics.json"));
  CHECK(slurp(a.path / "trajectory.csv") == slurp(b.path / "trajectory.csv"));
  CHECK(slurp(a.path / "beams.json") == slurp(b.path / "beams.json"));

  std::istringstream csv(slurp(a.path / "trajectory.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == int(r.trajectory.slots()) + 1);

  const auto audit = nlohmann::json::parse(slurp(a.path / "audit.json"));
  CHECK(audit.at("families").size() == r.audit.entries.size());
  for (const char* f : {"flying_rate", "hover_rate", "cumulative_sensing_snr", "power_budget", "uav_speed",
                        "usv_speed", "obstacle_clearance", "endpoint_sync"}) {
    bool found = false;
    for (const auto& e : audit.at("families")) found = found || e.at("family") == f;
    CHECK_MESSAGE(found, f);
  }

  const ValidationReport ok = validate_outputs(a.path);
  CHECK(ok.pass());
  CHECK(ok.energy_recomputed == doctest::Approx(r.energy.total()).epsilon(1e-12));
  CHECK(ok.comm_distance == doctest::Approx(comm_distance_threshold(13.0, 5.0, s.system)));

  // Drag one mid-mission USV position onto the obstacle.
  std::istringstream in(slurp(a.path / "trajectory.csv"));
  std::string out;
  int row = 0;
  const int victim = int(r.trajectory.slots()) / 2;
  while (std::getline(in, line)) {
    if (row++ == victim + 1) {
      std::vector<std::string> f;
      std::stringstream ls(line);
      for (std::string c; std::getline(ls, c, ',');) f.push_back(c);
      f[7] = "60";
      f[8] = "-40";
      line.clear();
      for (std::size_t i = 0; i < f.size(); ++i) line += (i ? "," : "") + f[i];
    }
    out += line + "\n";
  }
  std::ofstream(a.path / "trajectory.csv") << out;
  const ValidationReport bad = validate_outputs(a.path);
  CHECK_FALSE(bad.pass());
  CHECK_FALSE(bad.audit.at("obstacle_clearance").pass);
}
