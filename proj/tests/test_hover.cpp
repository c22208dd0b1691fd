#include <doctest.h>

#include <airsea/channel.hpp>
#include <airsea/hover.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

using namespace airsea;

namespace {

Scenario line_scenario(double length) {
  Scenario s = reference_scenario();
  s.world.uav_start = s.world.usv_start = Vec2(0, 0);
  s.world.uav_end = s.world.usv_end = Vec2(length, 0);
  return s;
}

std::vector<Vec2> gaussian_targets(int K, Vec2 centre, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  std::vector<Vec2> t;
  for (int k = 0; k < K; ++k) t.push_back(centre + Vec2(n(rng), n(rng)));
  return t;
}

Eigen::MatrixXd random_costs(int E, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(1.0, 100.0);
  Eigen::MatrixXd c(E + 2, E + 2);
  for (int i = 0; i < E + 2; ++i)
    for (int j = 0; j < E + 2; ++j) c(i, j) = i == j ? 0.0 : u(rng);
  return c;
}

double brute_force_path(const Eigen::MatrixXd& c) {
  const int E = int(c.rows()) - 2;
  std::vector<int> perm(E);
  std::iota(perm.begin(), perm.end(), 1);
  double best = std::numeric_limits<double>::infinity();
  do {
    double v = c(0, perm.empty() ? E + 1 : perm[0]);
    for (int i = 0; i + 1 < E; ++i) v += c(perm[i], perm[i + 1]);
    if (E > 0) v += c(perm.back(), E + 1);
    best = std::min(best, v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void check_path(const VisitOrder& o, int E) {
  REQUIRE(int(o.path.size()) == E + 2);
  CHECK(o.path.front() == 0);
  CHECK(o.path.back() == E + 1);
  std::vector<int> mid(o.path.begin() + 1, o.path.end() - 1);
  std::sort(mid.begin(), mid.end());
  for (int i = 0; i < E; ++i) CHECK(mid[i] == i + 1);
}

double path_cost(const Eigen::MatrixXd& c, const std::vector<int>& p) {
  double v = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) v += c(p[i], p[i + 1]);
  return v;
}

void audit_clusters(const ClusterAssignment& a, const std::vector<Vec2>& t, const CoverageRadius& r, int Z) {
  REQUIRE(int(a.clusters.size()) == a.E);
  REQUIRE(a.cluster_of.size() == t.size());
  std::vector<int> count(t.size(), 0);
  for (int i = 0; i < a.E; ++i) {
    CHECK(!a.clusters[i].empty());
    CHECK(int(a.clusters[i].size()) <= Z);
    for (int k : a.clusters[i]) {
      ++count[k];
      CHECK(a.cluster_of[k] == i);
      CHECK((t[k] - a.centroids[i]).norm() <= r(int(a.clusters[i].size())) + 1e-9);
    }
  }
  for (int c : count) CHECK(c == 1);
}

}  // namespace

TEST_CASE("initial cluster count") {
  CHECK(initial_cluster_count(15, 8) == 2);
  CHECK(initial_cluster_count(8, 8) == 1);
  CHECK(initial_cluster_count(56, 8) == 7);
  CHECK_THROWS(initial_cluster_count(0, 8));
}

TEST_CASE("clustering degenerate layouts") {
  const std::vector<Vec2> same(3, Vec2(40, -20));
  const ClusterAssignment a = vbsc_cluster(same, 30.0, 3, 1);
  CHECK(a.E == 1);
  CHECK((a.centroids[0] - Vec2(40, -20)).norm() < 1e-12);

  std::vector<Vec2> disc;
  for (int k = 0; k < 9; ++k)
    disc.push_back(Vec2(100, 100) + 5.0 * Vec2(std::cos(0.7 * k), std::sin(0.7 * k)));
  const ClusterAssignment b = vbsc_cluster(disc, 30.0, 8, 3);
  CHECK(b.E == 2);
  audit_clusters(b, disc, [](int) { return 30.0; }, 8);

  const std::vector<Vec2> nine_same(9, Vec2(0, 0));
  const ClusterAssignment c = vbsc_cluster(nine_same, 1.0, 8, 0);
  CHECK(c.E == 2);
  audit_clusters(c, nine_same, [](int) { return 1.0; }, 8);
}

TEST_CASE("clustering invariants on random layouts") {
  const Scenario s = reference_scenario();
  const CoverageRadius radius = [&](int n) { return sensing_radius(n, s); };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = gaussian_targets(15, Vec2(150, 150), 60.0, seed);
    const ClusterAssignment a = vbsc_cluster(t, radius, 8, seed);
    CHECK(a.E >= 2);
    audit_clusters(a, t, radius, 8);
    const ClusterAssignment again = vbsc_cluster(t, radius, 8, seed);
    CHECK(again.cluster_of == a.cluster_of);
  }
  // A scalar radius below every spacing forces one cluster per target.
  const auto t = gaussian_targets(6, Vec2(0, 0), 100.0, 9);
  CHECK(vbsc_cluster(t, 1e-3, 8, 0).E == 6);
}

TEST_CASE("sensing radius follows the power split") {
  const Scenario s = reference_scenario();
  const double h = s.system.altitude;
  for (int n : {1, 2, 4, 8}) {
    const double r = sensing_radius(n, s);
    const double d = std::hypot(r, h);
    CHECK(mrt_sensing_snr(d, s.system.sensing_power / n, s.system) ==
          doctest::Approx(s.requirements.inst_snr).epsilon(1e-9));
  }
  CHECK(sensing_radius(8, s) < sensing_radius(1, s));
}

TEST_CASE("hybrid leg cost") {
  const SystemParams& sys = reference_scenario().system;
  CurrentField still;
  CHECK(bi_tspn_cost(Vec2(3, 4), Vec2(3, 4), still, 12.0, 5.0, sys) == 0.0);

  for (double d : {7.0, 55.0, 333.3}) {
    const double vu = 12.0, vs = 5.0;
    const double expect = d / vu * uav_power_flying(vu, sys) + d / vs * sys.usv_drag * vs * vs;
    CHECK(bi_tspn_cost(Vec2(0, 0), Vec2(d, 0), still, vu, vs, sys) == doctest::Approx(expect).epsilon(1e-12));
  }

  CurrentField flow;
  flow.kind = CurrentKind::uniform;
  flow.max_speed = 1.5;
  const Vec2 a(0, 0), b(200, 0);
  const double with = bi_tspn_cost(a, b, flow, 12.0, 5.0, sys);
  const double against = bi_tspn_cost(b, a, flow, 12.0, 5.0, sys);
  CHECK(against > with);
  // Constant flow closed form: alpha d/v |v - w|^2.
  CHECK(with - bi_tspn_cost(a, b, CurrentField{}, 12.0, 5.0, sys) ==
        doctest::Approx(sys.usv_drag * 40.0 * (3.5 * 3.5 - 25.0)).epsilon(1e-12));

  CHECK_THROWS_AS(bi_tspn_cost(a, b, flow, 0.0, 5.0, sys), std::invalid_argument);
}

TEST_CASE("hybrid leg cost converges as the water grid refines") {
  SystemParams sys = reference_scenario().system;
  CurrentField wave;
  wave.kind = CurrentKind::analytic_wave;
  wave.max_speed = 2.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-250, 250);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 a(u(rng), u(rng));
    Vec2 b(u(rng), u(rng));
    if ((b - a).norm() > 500) b = a + 500 * (b - a).normalized();
    sys.current_resolution = 2.0;
    const double coarse = bi_tspn_cost(a, b, wave, 15.0, 4.0, sys);
    sys.current_resolution = 1.0;
    const double fine = bi_tspn_cost(a, b, wave, 15.0, 4.0, sys);
    CHECK(std::abs(coarse - fine) < 0.01 * fine);
  }
}

TEST_CASE("max-range speed") {
  const SystemParams& sys = reference_scenario().system;
  const double v = max_range_speed(sys);
  double best = std::numeric_limits<double>::infinity(), arg = 0;
  for (double w = 0.5; w <= sys.uav_max_speed; w += 1e-3) {
    const double e = uav_power_flying(w, sys) / w;
    if (e < best) best = e, arg = w;
  }
  CHECK(v == doctest::Approx(arg).epsilon(1e-3));
}

TEST_CASE("cost matrix") {
  Scenario s = line_scenario(300);
  s.world.usv_end = Vec2(300, 20);
  s.current.kind = CurrentKind::uniform;
  s.current.max_speed = 1.0;
  ClusterAssignment a;
  a.E = 2;
  a.centroids = {Vec2(100, 0), Vec2(200, 0)};
  a.clusters = {{0}, {1}};
  const CostMatrix m = build_cost_matrix(a, s);
  REQUIRE(m.centroids() == 2);
  CHECK((m.cost.array() >= 0).all());
  CHECK(m.cost.diagonal().norm() == 0.0);
  CHECK(m.cost(1, 2) < m.cost(2, 1));
  const double vu = max_range_speed(s.system);
  const double vs = s.system.usv_max_speed;
  CHECK(m.cost(2, 3) == doctest::Approx(bi_tspn_cost(Vec2(200, 0), Vec2(300, 0), Vec2(200, 0), Vec2(300, 20),
                                                     s.current, vu, vs, s.system)));
  const CostMatrix uav = build_cost_matrix(a, s, true);
  CHECK(uav.cost(1, 2) == doctest::Approx(uav.cost(2, 1)));
}

TEST_CASE("visit order small cases") {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
  c << 0, 1, 5, 9, 0, 1, 9, 9, 0;
  for (auto method : {OrderMethod::exact_dp, OrderMethod::milp}) {
    const VisitOrder o = solve_visit_order(CostMatrix{c}, method);
    CHECK(o.path == std::vector<int>{0, 1, 2});
    CHECK(o.cost == doctest::Approx(2.0));
  }
  const Eigen::MatrixXd c0 = random_costs(0, 1);
  CHECK(solve_visit_order(CostMatrix{c0}, OrderMethod::milp).path == std::vector<int>{0, 1});
  CHECK_THROWS_AS(solve_visit_order(CostMatrix{random_costs(19, 1)}, OrderMethod::exact_dp), OrderError);
}

TEST_CASE("MTZ branch and bound matches Held-Karp and brute force at E=8") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Eigen::MatrixXd c = random_costs(8, 100 + seed);
    const VisitOrder dp = solve_visit_order(CostMatrix{c}, OrderMethod::exact_dp);
    const VisitOrder milp = solve_visit_order(CostMatrix{c}, OrderMethod::milp);
    const double brute = brute_force_path(c);
    check_path(dp, 8);
    check_path(milp, 8);
    CHECK(dp.cost == doctest::Approx(brute).epsilon(1e-12));
    CHECK(milp.cost == doctest::Approx(brute).epsilon(1e-9));
    CHECK(path_cost(c, milp.path) == doctest::Approx(milp.cost).epsilon(1e-9));
    for (std::size_t p = 1; p + 1 < milp.path.size(); ++p) CHECK(milp.mtz[milp.path[p] - 1] == double(p));
  }
}

TEST_CASE("MTZ branch and bound matches Held-Karp over 100 seeds") {
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int E = 1 + int(seed % 10);
    const Eigen::MatrixXd c = random_costs(E, seed);
    const double dp = solve_visit_order(CostMatrix{c}, OrderMethod::exact_dp).cost;
    const VisitOrder milp = solve_visit_order(CostMatrix{c}, OrderMethod::milp);
    check_path(milp, E);
    if (std::abs(dp - milp.cost) > 1e-9 * dp) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("hover refinement of a single cluster against a grid search") {
  Scenario s = line_scenario(400);
  s.world.targets = {Vec2(190, 15), Vec2(205, -10), Vec2(215, 20)};
  s.system.max_simultaneous_targets = 8;
  ClusterAssignment a = vbsc_cluster(s.world.targets, [&](int n) { return sensing_radius(n, s); }, 8, 0);
  REQUIRE(a.E == 1);
  const VisitOrder order = solve_visit_order(build_cost_matrix(a, s, true), OrderMethod::exact_dp);

  RefineOptions opts;
  opts.uav_only = true;
  opts.sca.tol = 1e-6;
  const HoverPlan plan = refine_hover_plan(a, order, s, opts);
  CHECK(check_hover_plan(plan, s, true).empty());

  // Oracle: each leg at the max-range speed, hover exactly as long as the
  // weakest target needs, grid over the hover point.
  const auto& sys = s.system;
  const double vr = max_range_speed(sys);
  const double per_m = uav_power_flying(vr, sys) / vr;
  const double p = sys.sensing_power / 3.0;
  const double ds = sensing_distance_threshold(s.requirements.inst_snr, p, sys);
  auto need = [&](const Vec2& q) {
    double t = 0;
    for (const Vec2& tk : s.world.targets) {
      const double d = std::hypot((q - tk).norm(), sys.altitude);
      if (d > ds) return std::numeric_limits<double>::infinity();
      t = std::max(t, sys.slot_duration * s.requirements.total_snr / mrt_sensing_snr(d, p, sys));
    }
    return t;
  };
  double best = std::numeric_limits<double>::infinity();
  Vec2 arg;
  for (double x = 150; x <= 250; x += 0.25)
    for (double y = -30; y <= 40; y += 0.25) {
      const Vec2 q(x, y);
      const double e = per_m * (q.norm() + (Vec2(400, 0) - q).norm()) + sys.hover_power() * need(q);
      if (e < best) best = e, arg = q;
    }
  CHECK(plan.history.back() == doctest::Approx(best).epsilon(2e-3));
  CHECK(plan.history.back() >= best * (1 - 1e-3));
  CHECK((plan.hover[0].head<2>() - arg).norm() < 2.0);
  CHECK(plan.hover[0].z() == sys.altitude);
  CHECK(plan.hover_time[0] == doctest::Approx(need(plan.hover[0].head<2>())).epsilon(1e-3));
  CHECK(plan.hover_slots[0] == int(std::ceil(plan.hover_time[0] / sys.slot_duration - 1e-9)));
}

TEST_CASE("coincident targets at a shared start and end give a hover-only plan") {
  Scenario s = line_scenario(0);
  s.world.targets = std::vector<Vec2>(4, Vec2(0, 0));
  ClusterAssignment a = vbsc_cluster(s.world.targets, [&](int n) { return sensing_radius(n, s); }, 8, 0);
  REQUIRE(a.E == 1);
  const VisitOrder order = solve_visit_order(build_cost_matrix(a, s), OrderMethod::exact_dp);
  const HoverPlan plan = refine_hover_plan(a, order, s);
  CHECK(plan.fly_time[0] < 1e-3);
  CHECK(plan.fly_time[1] < 1e-3);
  CHECK(plan.fly_slots == std::vector<int>{0, 0});
  CHECK(plan.hover_slots[0] >= 1);
  CHECK(plan.total_slots() == plan.hover_slots[0]);
  CHECK(check_hover_plan(plan, s).empty());
}

TEST_CASE("hover refinement on the reference scenario") {
  const Scenario s = load_scenario(std::string(AIRSEA_SCENARIO_DIR) + "/table1.json");
  const ClusterAssignment a = vbsc_cluster(s.world.targets, [&](int n) { return sensing_radius(n, s); },
                                           s.system.max_simultaneous_targets, 7);
  const VisitOrder order = solve_visit_order(build_cost_matrix(a, s), OrderMethod::milp);
  const auto t0 = std::chrono::steady_clock::now();
  const HoverPlan plan = refine_hover_plan(a, order, s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("E=" << plan.E << " slots=" << plan.total_slots() << " estimate=" << plan.estimate
               << " iters=" << plan.history.size() - 1 << " time=" << secs);
  CHECK(check_hover_plan(plan, s).empty());
  CHECK(!plan.penalty_used);
  for (std::size_t i = 1; i < plan.history.size(); ++i) CHECK(plan.history[i] <= plan.history[i - 1]);
  CHECK(plan.history.back() < plan.history.front());

  // Fixed hover points keep the centroids and cannot beat the free refinement.
  RefineOptions fixed;
  fixed.fix_hover = true;
  const HoverPlan base = refine_hover_plan(a, order, s, fixed);
  CHECK(check_hover_plan(base, s).empty());
  CHECK(base.history.back() >= plan.history.back() * (1 - 1e-3));

  // Slot boundaries are consistent with the per-leg counts.
  int slot = 0;
  for (int e = 1; e <= plan.E; ++e) {
    slot += plan.fly_slots[e - 1];
    CHECK(plan.m(e) == slot);
    slot += plan.hover_slots[e - 1];
    CHECK(plan.n(e) == slot);
  }
  CHECK(plan.total_slots() == slot + plan.fly_slots.back());
  const auto j = to_json(plan);
  CHECK(j["hover_points"].size() == std::size_t(plan.E));
}
