#include <doctest.h>

#include <airsea/channel.hpp>
#include <airsea/hover.hpp>
#include <airsea/stage.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace airsea;

namespace {

Scenario still_water() {
  Scenario s = reference_scenario();
  s.current = CurrentField{};
  return s;
}

StageProblem flying(Vec2 uav_a, Vec2 uav_b, Vec2 usv_a, Vec2 usv_b, int slots, const Scenario& s) {
  StageProblem p;
  p.stage = 1;
  p.slots = slots;
  p.uav_from = lift(uav_a, s.system.altitude);
  p.uav_to = lift(uav_b, s.system.altitude);
  p.usv_from = usv_a;
  p.usv_to = usv_b;
  return p;
}

// Exact re-check of a flying solution: rate, power, speeds and obstacles.
void audit_flying(const StageSolution& r, const StageProblem& p, const Scenario& s) {
  const auto& sys = s.system;
  REQUIRE(int(r.uav.size()) == p.slots + 1);
  REQUIRE(int(r.usv.size()) == p.slots + 1);
  CHECK((r.uav.front() - p.uav_from).norm() < 1e-9);
  CHECK((r.uav.back() - p.uav_to).norm() < 1e-6);
  CHECK((r.usv.front() - p.usv_from).norm() < 1e-9);
  CHECK((r.usv.back() - p.usv_to).norm() < 1e-6);
  for (int n = 1; n <= p.slots; ++n) {
    CHECK(r.uav[n].z() == doctest::Approx(sys.altitude));
    CHECK((r.uav[n] - r.uav[n - 1]).norm() <= sys.uav_max_speed * sys.slot_duration * (1 + 1e-6));
    CHECK((r.usv[n] - r.usv[n - 1]).norm() <= sys.usv_max_speed * sys.slot_duration * (1 + 1e-6));
    CHECK(r.beams[n].comm_power() <= sys.power_budget * (1 + 1e-9));
    CHECK(flying_rate(r.uav[n], r.usv[n], r.beams[n].w, sys) >= s.requirements.rate_fly * (1 - 1e-6));
    for (const Vec2& o : s.world.obstacles) CHECK((r.usv[n] - o).norm() >= sys.obstacle_radius * (1 - 1e-6));
  }
}

// Lower convex envelope of the rotary-wing power curve, minimized over speeds
// of at least v (a longer path flown faster may be cheaper).
double envelope_floor(double v, const SystemParams& sys) {
  const int grid = 2000;
  std::vector<double> xs, ys;
  for (int i = 0; i <= grid; ++i) {
    xs.push_back(sys.uav_max_speed * i / grid);
    ys.push_back(uav_power_flying(xs.back(), sys));
  }
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i)
    for (int j = i; j <= grid; ++j) {
      if (xs[j] < v) continue;
      // Any mean speed in [max(v, xs[i]), xs[j]] mixes the two end speeds.
      const double at = std::max(v, xs[i]);
      const double w = xs[j] > xs[i] ? (at - xs[i]) / (xs[j] - xs[i]) : 0.0;
      best = std::min(best, (1 - w) * ys[i] + w * ys[j]);
    }
  return best;
}

}  // namespace

TEST_CASE("zero-length flying stage holds position at the minimum link power") {
  const Scenario s = still_water();
  const StageProblem p = flying({0, 0}, {0, 0}, {30, 0}, {30, 0}, 1, s);
  const StageSolution r = optimize_flying(p, s);
  audit_flying(r, p, s);
  const double d = std::hypot(30.0, s.system.altitude);
  for (int n = 1; n <= p.slots; ++n) {
    CHECK((r.uav[n] - p.uav_from).norm() < 1e-4);
    CHECK((r.usv[n] - p.usv_from).norm() < 1e-4);
    CHECK(r.beams[n].comm_power() == doctest::Approx(comm_power_for_rate(d, s.requirements.rate_fly, s.system))
                                         .epsilon(1e-4));
  }
  CHECK(r.usv_energy < 1e-3);
}

TEST_CASE("zero-slot flying stage needs coincident endpoints") {
  const Scenario s = still_water();
  const StageSolution r = optimize_flying(flying({5, 5}, {5, 5}, {5, 5}, {5, 5}, 0, s), s);
  CHECK(r.uav.size() == 1);
  CHECK(r.total() == 0.0);
  CHECK_THROWS_AS(optimize_flying(flying({0, 0}, {10, 0}, {0, 0}, {10, 0}, 0, s), s), StageError);
}

TEST_CASE("unreachable flying boundary is reported with the stage") {
  const Scenario s = still_water();
  StageProblem p = flying({0, 0}, {500, 0}, {0, 0}, {500, 0}, 5, s);
  p.stage = 3;
  try {
    optimize_flying(p, s);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage == 3);
  }
}

TEST_CASE("straight corridor in still water stays on the segment") {
  const Scenario s = still_water();
  const StageProblem p = flying({0, 0}, {200, 0}, {0, 0}, {200, 0}, 24, s);
  const StageSolution r = optimize_flying(p, s);
  audit_flying(r, p, s);
  CHECK_FALSE(r.penalty_used);
  double worst = 0.0;
  for (const Vec3& q : r.uav) worst = std::max(worst, std::abs(q.y()));
  CHECK(worst <= 0.5);
}

TEST_CASE("flying energy respects the straight-line constant-speed bound") {
  const Scenario s = still_water();
  const auto& sys = s.system;
  for (int slots : {20, 30, 45}) {
    const StageProblem p = flying({0, 0}, {180, 60}, {10, -10}, {190, 50}, slots, s);
    const StageSolution r = optimize_flying(p, s);
    audit_flying(r, p, s);
    const double T = slots * sys.slot_duration;
    const double L_uav = (p.uav_to - p.uav_from).norm();
    const double L_usv = (p.usv_to - p.usv_from).norm();
    const double bound = T * envelope_floor(L_uav / T, sys) + sys.usv_drag * L_usv * L_usv / T;
    CHECK(r.uav_energy + r.usv_energy >= bound * (1 - 1e-9));
    // The optimizer should come close to the bound in open water.
    CHECK(r.uav_energy + r.usv_energy <= bound * 1.05);
  }
}

TEST_CASE("obstacle on the USV line is cleared at a price") {
  Scenario s = still_water();
  const StageProblem p = flying({0, 0}, {200, 0}, {0, 0}, {200, 0}, 25, s);
  const StageSolution open = optimize_flying(p, s);
  s.world.obstacles = {Vec2(100, 2)};
  const StageSolution blocked = optimize_flying(p, s);
  audit_flying(blocked, p, s);
  CHECK(blocked.total() > open.total());
  double closest = 1e9;
  for (const Vec2& b : blocked.usv) closest = std::min(closest, (b - s.world.obstacles[0]).norm());
  CHECK(closest >= s.system.obstacle_radius * (1 - 1e-6));
}

TEST_CASE("flying stage under the analytic current passes the exact audit") {
  Scenario s = reference_scenario();
  s.current.kind = CurrentKind::analytic_wave;
  s.current.max_speed = 2.0;
  s.world.obstacles = {Vec2(60, 45)};
  const StageProblem p = flying({0, 0}, {150, 120}, {0, 10}, {140, 100}, 22, s);
  const StageSolution r = optimize_flying(p, s);
  audit_flying(r, p, s);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1] * (1 + 1e-9));
  CHECK(r.history.back() == doctest::Approx(r.total()).epsilon(1e-9));
}

TEST_CASE("leader planning ignores the USV") {
  const Scenario s = still_water();
  StageProblem p = flying({0, 0}, {100, 0}, {0, 0}, {0, 0}, 10, s);
  p.uav_only = true;
  const StageSolution r = optimize_flying(p, s);
  CHECK(r.usv_energy == 0.0);
  CHECK(r.transmit_energy == 0.0);
  CHECK((r.uav.back() - p.uav_to).norm() < 1e-6);
}

namespace {

const Vec3 kHover(0.0, 0.0, 100.0);

SlotBeams link_only(const CVec& w, std::size_t targets) {
  SlotBeams b;
  b.w = w;
  b.v.assign(targets, CVec());
  b.active.assign(targets, false);
  return b;
}

double cumulative_snr(const StageSolution& r, std::size_t k, const Scenario& s) {
  const Vec3& q = r.uav.front();
  const CVec u = combiner(q, s.world.targets[k], s.system);
  double total = 0.0;
  for (std::size_t n = 1; n < r.beams.size(); ++n)
    if (r.beams[n].active[k]) total += sensing_snr(q, s.world.targets, k, r.beams[n].v, u, r.beams[n].active, s.system);
  return total;
}

}  // namespace

TEST_CASE("single-target hover beam matches the closed-form MRT minimum") {
  Scenario s = still_water();
  s.requirements.rate_hover = 0.0;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-140.0, 140.0), g(0.5, 20.0);
  for (int trial = 0; trial < 10; ++trial) {
    s.world.targets = {Vec2(u(rng), u(rng))};
    const double gamma = g(rng);
    const double d = (kHover - lift(s.world.targets[0], 0.0)).norm();
    const double oracle = gamma / mrt_sensing_snr(d, 1.0, s.system);
    if (oracle > s.system.power_budget) continue;
    const HoverBeams hb = optimize_hover_beams(kHover, {Vec2(900, 0)}, {{{0}}, {gamma}}, s);
    CHECK(hb.power == doctest::Approx(oracle).epsilon(1e-3));
    const CVec& v = hb.slots[0].v[0];
    const CVec a = steering(kHover, lift(s.world.targets[0], 0.0), s.system);
    CHECK(std::abs(a.dot(v)) / (a.norm() * v.norm()) == doctest::Approx(1.0).epsilon(1e-6));
    const CVec comb = combiner(kHover, s.world.targets[0], s.system);
    CHECK(sensing_snr(kHover, s.world.targets, 0, hb.slots[0].v, comb, hb.slots[0].active, s.system) >=
          gamma * (1 - 1e-6));
  }
}

TEST_CASE("no requirements give silent beams") {
  Scenario s = still_water();
  s.requirements.rate_hover = 0.0;
  s.world.targets = {Vec2(30, 0), Vec2(-20, 40)};
  const HoverBeams hb = optimize_hover_beams(kHover, {Vec2(0, 0), Vec2(5, 0)}, joint_schedule({0, 1}, 2, Scenario{}), s);
  CHECK(hb.power == 0.0);
  for (const auto& b : hb.slots) {
    CHECK(b.w.norm() == 0.0);
    CHECK(b.v[0].norm() == 0.0);
    CHECK(b.v[1].norm() == 0.0);
  }
}

TEST_CASE("orthogonal sensing channels decouple") {
  Scenario s = still_water();
  s.requirements.rate_hover = 0.0;
  // Directly below (cos phi = 1) and at cos phi = 1/2: orthogonal steering for a half-wave array.
  s.world.targets = {Vec2(0, 0), Vec2(std::sqrt(200.0 * 200.0 - 100.0 * 100.0), 0)};
  const CVec a0 = steering(kHover, lift(s.world.targets[0], 0.0), s.system);
  const CVec a1 = steering(kHover, lift(s.world.targets[1], 0.0), s.system);
  REQUIRE(std::abs(a0.dot(a1)) < 1e-9);
  const double gamma = 2.0;
  double single = 0.0;
  for (const Vec2& t : s.world.targets) single += gamma / mrt_sensing_snr((kHover - lift(t, 0.0)).norm(), 1.0, s.system);
  const HoverBeams hb = optimize_hover_beams(kHover, {Vec2(900, 0)}, {{{0, 1}}, {gamma}}, s);
  CHECK(hb.power == doctest::Approx(single).epsilon(1e-3));
}

TEST_CASE("hover rate margin slope matches a central difference") {
  const Scenario s = still_water();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  auto random_beam = [&] {
    CVec x(s.system.num_antennas);
    for (auto& c : x) c = {n(rng), n(rng)};
    return x;
  };
  for (int trial = 0; trial < 20; ++trial) {
    SlotBeams b;
    b.w = random_beam();
    b.v = {0.01 * random_beam(), 0.01 * random_beam(), random_beam()};
    b.active = {true, true, false};
    const double D = 100.0 + 80.0 * std::abs(n(rng));
    const double h = 1e-4 * D;
    const RateMargin m = hover_rate_margin(kHover, D, b, s.system, 13.0);
    const double fd = (hover_rate_margin(kHover, D + h, b, s.system, 13.0).value -
                       hover_rate_margin(kHover, D - h, b, s.system, 13.0).value) /
                      (2 * h);
    CHECK(m.slope == doctest::Approx(fd).epsilon(1e-5));
    // The value agrees with the exact SINR at a point at that distance.
    const Vec2 at(std::sqrt(D * D - 1e4), 0.0);
    const double rho = std::exp2(13.0) - 1.0;
    const double sinr = hover_sinr(kHover, at, b.w, b.v, b.active, s.system);
    CHECK((m.value >= 0.0) == (sinr >= rho));
  }
}

TEST_CASE("USV drifts with the current when the link has no requirement") {
  Scenario s = still_water();
  s.requirements.rate_hover = 0.0;
  s.current.kind = CurrentKind::uniform;
  s.current.max_speed = 2.0;
  const int N = 10;
  const std::vector<SlotBeams> beams(N, link_only(CVec::Zero(4), 0));
  const std::vector<Vec2> init(N + 1, Vec2(0, 0));
  const HoverUsvResult r = optimize_hover_usv(kHover, beams, init, s);
  double e = 0.0;
  for (int n = 1; n <= N; ++n) e += usv_slot_energy(r.usv[n - 1], r.usv[n], s.current, s.system);
  CHECK(e <= 1e-6 * r.history.front());
  CHECK(r.usv.back().x() == doctest::Approx(2.0 * N).epsilon(1e-4));
}

TEST_CASE("inactive rate constraint leaves the USV path unchanged") {
  Scenario s = still_water();
  s.current.kind = CurrentKind::analytic_wave;
  s.current.max_speed = 1.0;
  const int N = 8;
  const CVec w = mrt_beamformer(kHover, Vec3(0, 0, 0), s.system.power_budget, s.system);
  const std::vector<SlotBeams> beams(N, link_only(w, 0));
  const std::vector<Vec2> init(N + 1, Vec2(0, 0));
  const HoverUsvResult with = optimize_hover_usv(kHover, beams, init, s);
  Scenario free = s;
  free.requirements.rate_hover = 0.0;
  const HoverUsvResult without = optimize_hover_usv(kHover, beams, init, free);
  for (int n = 0; n <= N; ++n) CHECK((with.usv[n] - without.usv[n]).norm() < 1e-3);
}

TEST_CASE("tight rate keeps the drifting USV near the hover point") {
  Scenario s = still_water();
  s.current.kind = CurrentKind::uniform;
  s.current.max_speed = 3.0;
  const int N = 20;
  const double limit = 112.0;
  const double p = comm_power_for_rate(limit, s.requirements.rate_hover, s.system);
  const CVec w = mrt_beamformer(kHover, Vec3(0, 0, 0), p, s.system);
  const std::vector<SlotBeams> beams(N, link_only(w, 0));
  const std::vector<Vec2> init(N + 1, Vec2(0, 0));
  const HoverUsvResult tight = optimize_hover_usv(kHover, beams, init, s);
  Scenario free = s;
  free.requirements.rate_hover = 0.0;
  const HoverUsvResult loose = optimize_hover_usv(kHover, beams, init, free);
  const double rho = std::exp2(s.requirements.rate_hover) - 1.0;
  double far_tight = 0.0, far_loose = 0.0;
  for (int n = 1; n <= N; ++n) {
    CHECK(hover_sinr(kHover, tight.usv[n], w, {}, {}, s.system) >= rho * (1 - 1e-6));
    far_tight = std::max(far_tight, (tight.usv[n] - ground(kHover)).norm());
    far_loose = std::max(far_loose, (loose.usv[n] - ground(kHover)).norm());
  }
  CHECK(far_loose > std::sqrt(limit * limit - 1e4) + 5.0);
  CHECK(far_tight < far_loose);
  CHECK(tight.history.back() > loose.history.back());
  for (std::size_t i = 1; i < tight.history.size(); ++i) CHECK(tight.history[i] <= tight.history[i - 1] * (1 + 1e-9));
}

TEST_CASE("joint sensing is kept when the channels separate") {
  Scenario s = still_water();
  s.world.targets = {Vec2(std::sqrt(200.0 * 200.0 - 100.0 * 100.0), 0)};
  const HoverSetup h = plan_hover(kHover, Vec2(0, 0), {0}, 10, s);
  CHECK(h.joint);
  CHECK(h.schedule.slots() == 10);
  for (int n = 0; n < 10; ++n) CHECK(h.schedule.gamma[n] == doctest::Approx(s.requirements.total_snr / 10));
}

TEST_CASE("nulled sensing SNR is achievable by the slot SDP") {
  Scenario s = still_water();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-120.0, 120.0), dist(101.0, 140.0);
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    s.world.targets = {Vec2(u(rng), u(rng))};
    const double D = dist(rng);
    const double g = nulled_sensing_snr(kHover, D, s.world.targets[0], s);
    if (g <= 1e-3) continue;
    const Vec2 b(std::sqrt(D * D - 1e4), 0.0);
    const HoverBeams hb = optimize_hover_beams(kHover, {b}, {{{0}}, {g * (1 - 1e-6)}}, s);
    CHECK(hb.power <= s.system.power_budget * (1 + 1e-9));
    ++checked;
  }
  CHECK(checked > 5);
}

TEST_CASE("hover stage meets every requirement at exact evaluation") {
  Scenario s = reference_scenario();
  s.current.kind = CurrentKind::analytic_wave;
  s.current.max_speed = 1.0;
  s.world.targets = {Vec2(40, 15), Vec2(-30, 30), Vec2(10, -45)};
  StageProblem p;
  p.stage = 2;
  p.mode = Mode::hover;
  p.slots = 8;
  p.uav_from = p.uav_to = kHover;
  p.usv_from = Vec2(35, -20);
  p.targets = {0, 1, 2};
  AoOptions opts;
  opts.seed = 9;
  const StageSolution r = alternate_optimize_hover(p, s, opts);
  const auto& sys = s.system;
  const int N = int(r.usv.size()) - 1;
  REQUIRE(N >= 1);
  CHECK(r.schedule.slots() == N);
  CHECK((r.usv.front() - p.usv_from).norm() < 1e-12);
  const double rho = std::exp2(s.requirements.rate_hover) - 1.0;
  for (int n = 1; n <= N; ++n) {
    CHECK(r.uav[n] == kHover);
    const SlotBeams& b = r.beams[n];
    CHECK(b.comm_power() + b.sense_power() <= sys.power_budget * (1 + 1e-9));
    CHECK(hover_sinr(kHover, r.usv[n], b.w, b.v, b.active, sys) >= rho * (1 - 1e-6));
    CHECK((r.usv[n] - r.usv[n - 1]).norm() <= sys.usv_max_speed * sys.slot_duration * (1 + 1e-6));
  }
  for (std::size_t k = 0; k < 3; ++k) CHECK(cumulative_snr(r, k, s) >= s.requirements.total_snr * (1 - 1e-6));
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1] * (1 + 1e-6));
  CHECK((r.rank1_gap <= 0.05 || r.randomized_slots > 0));
  CHECK_FALSE(r.penalty_used);
  CHECK(r.uav_energy == doctest::Approx(N * sys.slot_duration * sys.hover_power()));
}
