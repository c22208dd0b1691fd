// One pass/fail line per acceptance criterion. Oracles are written out here
// from the model definitions rather than taken from the library.

#include <airsea/channel.hpp>
#include <airsea/pipeline.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <unistd.h>

using namespace airsea;
namespace fs = std::filesystem;

namespace tol {
constexpr double threshold_rel = 1e-9;
constexpr double threshold_runtime_s = 1.0;
constexpr double xi_identity = 1e-12;
constexpr double tangency = 1e-10;
constexpr double order_rel = 1e-9;
constexpr double order_runtime_s = 30.0;
constexpr double mrt_power_rel = 1e-3;
constexpr double p6_exact = 1e-6;
constexpr double monotone_rel = 1e-3;
constexpr int max_iterations = 50;
constexpr double mission_runtime_s = 300.0;
constexpr double flat_band = 0.05;
constexpr double audit = 1e-6;
}  // namespace tol

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;
void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Scenario base_scenario() { return load_scenario(fs::path(AIRSEA_SCENARIO_DIR) / "table1.json"); }

// Closed forms of the link and echo budgets under MRT.
double oracle_comm_distance(double rate, double p, const SystemParams& s) {
  const double g = s.scans_per_slot * s.pulse_time / s.slot_duration;
  const double amp = s.channel_gain * s.small_scale_fading;
  return std::pow(g * s.num_antennas * p * amp * amp / (s.noise_comm * (std::pow(2.0, rate) - 1.0)), 0.25);
}
double oracle_sensing_distance(double snr, double p, const SystemParams& s) {
  const double g = s.scans_per_slot * s.pulse_time / s.slot_duration;
  return std::pow(g * s.mean_rcs * s.sensing_gain * s.sensing_gain * p * s.num_antennas /
                      (16.0 * M_PI * s.noise_sense * snr),
                  0.25);
}
double oracle_sensing_power(double snr, double d, const SystemParams& s) {
  const double g = s.scans_per_slot * s.pulse_time / s.slot_duration;
  return snr * 16.0 * M_PI * s.noise_sense * std::pow(d, 4) /
         (g * s.mean_rcs * s.sensing_gain * s.sensing_gain * s.num_antennas);
}

void criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int draws = 0;
  while (draws < 100) {
    SystemParams s = reference_scenario().system;
    s.num_antennas = 2 + int(u(rng) * 7);
    s.altitude = 50.0 + 100.0 * u(rng);
    s.channel_gain = db_to_linear(-20.0 + 10.0 * u(rng));
    s.sensing_gain = db_to_linear(-20.0 + 10.0 * u(rng));
    s.noise_comm = db_to_linear(-150.0 + 20.0 * u(rng));
    s.noise_sense = db_to_linear(-150.0 + 20.0 * u(rng));
    s.scans_per_slot = 20 + int(u(rng) * 180);
    const double p_c = 1.0 + 19.0 * u(rng), p_s = 1.0 + 19.0 * u(rng);
    const double rate = 1.0 + 14.0 * u(rng), snr = db_to_linear(-5.0 + 15.0 * u(rng));
    const double dc = comm_distance_threshold(rate, p_c, s), ds = sensing_distance_threshold(snr, p_s, s);
    if (dc <= s.altitude || ds <= s.altitude) continue;
    ++draws;
    worst = std::max({worst, rel(dc, oracle_comm_distance(rate, p_c, s)), rel(ds, oracle_sensing_distance(snr, p_s, s))});
    const Vec3 q(10.0 * u(rng), 10.0 * u(rng), s.altitude);
    const double a = 2 * M_PI * u(rng);
    const Vec2 b = ground(q) + std::sqrt(dc * dc - s.altitude * s.altitude) * Vec2(std::cos(a), std::sin(a));
    worst = std::max(worst, rel(flying_rate(q, b, mrt_beamformer(q, lift(b, 0.0), p_c, s), s), rate));
    const Vec2 t = ground(q) + std::sqrt(ds * ds - s.altitude * s.altitude) * Vec2(std::sin(a), std::cos(a));
    const std::vector<CVec> v{mrt_beamformer(q, lift(t, 0.0), p_s, s)};
    worst = std::max(worst, rel(sensing_snr(q, {t}, 0, v, combiner(q, t, s), {true}, s), snr));
  }
  const double secs = since(t0);
  report(1, "threshold consistency", worst <= tol::threshold_rel && secs < tol::threshold_runtime_s,
         fmt("100 draws, worst relative error %.2e (tol %.0e), %.3f s (limit %.0f s)", worst, tol::threshold_rel,
             secs, tol::threshold_runtime_s));
}

void criterion2() {
  const SystemParams s = reference_scenario().system;
  const double v0sq = s.mean_induced_speed * s.mean_induced_speed;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double identity = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double v = 40.0 * u(rng);
    const double xi = xi_from_speed(v, s);
    identity = std::max(identity, std::abs(1.0 / (xi * xi) - xi * xi - v * v / v0sq));
  }
  // Complex-step derivatives of xi^2 + |v|^2 / v0^2 as the tangency oracle.
  using C = std::complex<double>;
  auto g = [&](C xi, C vx, C vy) { return xi * xi + (vx * vx + vy * vy) / v0sq; };
  const double h = 1e-30;
  double tangency = 0.0;
  bool minorant = true;
  for (int i = 0; i < 100; ++i) {
    const double xi0 = 0.05 + 1.5 * u(rng);
    const Vec2 v0(40.0 * u(rng) - 20.0, 40.0 * u(rng) - 20.0);
    const InducedTangent t = induced_tangent(xi0, v0, s);
    const double f0 = g(xi0, v0.x(), v0.y()).real();
    const double dxi = g(C(xi0, h), v0.x(), v0.y()).imag() / h;
    const double dvx = g(xi0, C(v0.x(), h), v0.y()).imag() / h;
    const double dvy = g(xi0, v0.x(), C(v0.y(), h)).imag() / h;
    const double scale = std::max(1.0, std::abs(f0));
    tangency = std::max({tangency, std::abs(t(xi0, v0) - f0) / scale, std::abs(t.d_xi - dxi) / scale,
                         std::abs(t.d_v.x() - dvx) / scale, std::abs(t.d_v.y() - dvy) / scale});
    for (int j = 0; j < 10; ++j) {
      const double xi = 0.05 + 1.5 * u(rng);
      const Vec2 v(40.0 * u(rng) - 20.0, 40.0 * u(rng) - 20.0);
      minorant = minorant && t(xi, v) <= g(xi, v.x(), v.y()).real() * (1 + 1e-14) + 1e-14;
    }
  }
  report(2, "xi identity / tangency", identity < tol::xi_identity && tangency < tol::tangency && minorant,
         fmt("identity residual %.2e (tol %.0e), tangency residual %.2e (tol %.0e), global minorant %s", identity,
             tol::xi_identity, tangency, tol::tangency, minorant ? "yes" : "NO"));
}

double path_cost(const Eigen::MatrixXd& c, const std::vector<int>& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += c(path[i - 1], path[i]);
  return total;
}

void criterion3() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(1.0, 100.0);
  double worst = 0.0;
  int brute = 0;
  bool valid = true;
  for (int i = 0; i < 100; ++i) {
    const int E = 3 + i % 8;
    CostMatrix cm;
    cm.cost = Eigen::MatrixXd::Zero(E + 2, E + 2);
    for (int a = 0; a < E + 2; ++a)
      for (int b = 0; b < E + 2; ++b)
        if (a != b) cm.cost(a, b) = u(rng);
    const VisitOrder milp = solve_visit_order(cm, OrderMethod::milp);
    const VisitOrder dp = solve_visit_order(cm, OrderMethod::exact_dp);
    for (const VisitOrder* o : {&milp, &dp}) {
      std::vector<int> sorted = o->path;
      std::sort(sorted.begin(), sorted.end());
      std::vector<int> all(E + 2);
      std::iota(all.begin(), all.end(), 0);
      valid = valid && o->path.front() == 0 && o->path.back() == E + 1 && sorted == all;
    }
    const double m = path_cost(cm.cost, milp.path), d = path_cost(cm.cost, dp.path);
    worst = std::max(worst, rel(m, d));
    if (E <= 7) {
      std::vector<int> perm(E);
      std::iota(perm.begin(), perm.end(), 1);
      double best = INFINITY;
      do {
        std::vector<int> p{0};
        p.insert(p.end(), perm.begin(), perm.end());
        p.push_back(E + 1);
        best = std::min(best, path_cost(cm.cost, p));
      } while (std::next_permutation(perm.begin(), perm.end()));
      worst = std::max({worst, rel(m, best), rel(d, best)});
      ++brute;
    }
  }
  const double secs = since(t0);
  report(3, "visit-order exactness", valid && worst <= tol::order_rel && secs < tol::order_runtime_s,
         fmt("100 matrices E=3..10 (%d brute-forced), worst relative gap %.2e (tol %.0e), %.1f s (limit %.0f s)",
             brute, worst, tol::order_rel, secs, tol::order_runtime_s));
}

void criterion4() {
  Scenario s = base_scenario();
  const auto& sys = s.system;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 300.0);
  double worst_cover = 0.0;
  int worst_size = 0;
  bool partition = true;
  for (int i = 0; i < 100; ++i) {
    std::vector<Vec2> targets;
    for (int k = 0; k < 15; ++k) targets.emplace_back(u(rng), u(rng));
    const ClusterAssignment a =
        vbsc_cluster(targets, [&](int n) { return sensing_radius(n, s); }, 8, 1000 + i);
    std::vector<int> seen(targets.size(), 0);
    for (int e = 0; e < a.E; ++e) {
      const int n = int(a.clusters[e].size());
      worst_size = std::max(worst_size, n);
      const double ds = oracle_sensing_distance(s.requirements.inst_snr, sys.sensing_power / n, sys);
      const double radius = std::sqrt(std::max(0.0, ds * ds - sys.altitude * sys.altitude));
      for (int k : a.clusters[e]) {
        ++seen[k];
        worst_cover = std::max(worst_cover, (targets[k] - a.centroids[e]).norm() / radius - 1.0);
      }
    }
    partition = partition && std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
  }
  std::vector<Vec2> disc;
  for (int k = 0; k < 9; ++k) disc.push_back(Vec2(150, 150) + 5.0 * Vec2(std::cos(k * 0.7), std::sin(k * 0.7)));
  const ClusterAssignment d = vbsc_cluster(disc, [&](int n) { return sensing_radius(n, s); }, 8, 7);
  const bool pass = partition && worst_size <= 8 && worst_cover <= 1e-9 && d.E == 2;
  report(4, "VBSC feasibility", pass,
         fmt("100 layouts K=15 Z=8: largest cluster %d, worst coverage excess %.2e, partition %s; disc of 9 -> E=%d",
             worst_size, std::max(0.0, worst_cover), partition ? "ok" : "BROKEN", d.E));
}

void criterion5() {
  Scenario s = base_scenario();
  s.requirements.rate_hover = 0.0;
  const auto& sys = s.system;
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec3 q(150.0, 150.0, sys.altitude);
  double worst_power = 0.0, worst_exact = 0.0;
  auto exact_violation = [&](const Scenario& sc, const Vec2& b, const SlotBeams& bm, double gamma) {
    const auto& t = sc.world.targets;
    double v = std::max(0.0, bm.comm_power() + bm.sense_power() - sc.system.power_budget) / sc.system.power_budget;
    const CVec w = bm.w.size() ? bm.w : CVec::Zero(sc.system.num_antennas);
    const double need = std::pow(2.0, sc.requirements.rate_hover) - 1.0;
    const double sinr = hover_sinr(q, b, w, bm.v, bm.active, sc.system);
    if (need > 0) v = std::max(v, std::max(0.0, 1.0 - sinr / need));
    for (std::size_t k = 0; k < t.size(); ++k)
      if (bm.active[k])
        v = std::max(v, std::max(0.0, 1.0 - sensing_snr(q, t, k, bm.v, combiner(q, t[k], sc.system), bm.active,
                                                        sc.system) / gamma));
    return v;
  };
  for (int i = 0; i < 50; ++i) {
    const double ds = oracle_sensing_distance(s.requirements.inst_snr, sys.sensing_power, sys);
    const double r = std::sqrt(ds * ds - sys.altitude * sys.altitude) * u(rng);
    const double a = 2 * M_PI * u(rng);
    s.world.targets = {ground(q) + r * Vec2(std::cos(a), std::sin(a))};
    const Vec2 b = ground(q) + 120.0 * u(rng) * Vec2(std::cos(3 * a), std::sin(3 * a));
    const double gamma = s.requirements.inst_snr * (0.5 + u(rng));
    SensingSchedule sch;
    sch.targets = {{0}};
    sch.gamma = {gamma};
    const HoverBeams hb = optimize_hover_beams(q, {b}, sch, s, 0, i);
    const double d = (q - lift(s.world.targets[0], 0.0)).norm();
    worst_power = std::max(worst_power, rel(hb.power, oracle_sensing_power(gamma, d, sys)));
    worst_exact = std::max(worst_exact, exact_violation(s, b, hb.slots[0], gamma));
  }
  // With the link requirement on: several targets, USV kept within range.
  Scenario c = base_scenario();
  int solved = 0;
  for (int i = 0; i < 50; ++i) {
    c.world.targets.clear();
    for (int k = 0; k < 3; ++k) {
      const double a = 2 * M_PI * u(rng);
      c.world.targets.push_back(ground(q) + 60.0 * u(rng) * Vec2(std::cos(a), std::sin(a)));
    }
    const double a = 2 * M_PI * u(rng);
    const Vec2 b = ground(q) + 100.0 * u(rng) * Vec2(std::cos(a), std::sin(a));
    const int k = i % 3;
    const double gamma = c.requirements.inst_snr * (0.2 + u(rng));
    SensingSchedule sch;
    sch.targets = {{k}};
    sch.gamma = {gamma};
    try {
      const HoverBeams hb = optimize_hover_beams(q, {b}, sch, c, 0, i);
      worst_exact = std::max(worst_exact, exact_violation(c, b, hb.slots[0], gamma));
      ++solved;
    } catch (const StageError&) {
    }
  }
  report(5, "SDP beamforming oracle",
         worst_power <= tol::mrt_power_rel && worst_exact <= tol::p6_exact && solved >= 25,
         fmt("50 single-target cases: worst power gap %.2e (tol %.0e); worst exact violation %.2e over %d cases "
             "(tol %.0e)",
             worst_power, tol::mrt_power_rel, worst_exact, 50 + solved, tol::p6_exact));
}

struct Missions {
  std::vector<MissionResult> results;
  std::vector<Scenario> scenarios;
  std::vector<std::string> errors;
  double slowest = 0.0;
};

Missions run_paired(int seeds) {
  const Scenario base = base_scenario();
  SweepOptions so;
  Missions m;
  for (int k = 1; k <= seeds; ++k) {
    const Scenario s = sweep_scenario(base, so, so.sigma, k);
    for (Strategy st : {Strategy::proposed, Strategy::leader_follower, Strategy::sequential}) {
      const auto t0 = Clock::now();
      try {
        m.results.push_back(run_mission(s, st, k));
        m.scenarios.push_back(s);
      } catch (const std::exception& e) {
        m.errors.push_back(to_string(st) + " seed " + std::to_string(k) + ": " + e.what());
      }
      m.slowest = std::max(m.slowest, since(t0));
    }
  }
  return m;
}

bool monotone(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] > h[i - 1] + tol::monotone_rel * std::max(1.0, std::abs(h[i - 1]))) return false;
  return true;
}

void criterion6(const Missions& m) {
  int missions = 0, histories = 0, bad = 0, over = 0;
  for (const auto& r : m.results) {
    if (r.strategy != Strategy::proposed) continue;
    ++missions;
    std::vector<const std::vector<double>*> hs{&r.plan.history};
    for (const auto& l : r.stages) hs.push_back(&l.history);
    for (const auto* h : hs) {
      ++histories;
      if (!monotone(*h)) ++bad;
      if (int(h->size()) - 1 > tol::max_iterations) ++over;
    }
  }
  report(6, "SCA/AO monotonicity", missions == 20 && bad == 0 && over == 0,
         fmt("%d proposed missions, %d histories (refinement, flying, hover AO): %d non-monotone beyond %.0e, %d over %d "
             "iterations",
             missions, histories, bad, tol::monotone_rel, over, tol::max_iterations));
}

void criterion7(const Missions& m) {
  double sum[3] = {0, 0, 0};
  int count[3] = {0, 0, 0};
  std::map<std::uint64_t, std::array<double, 3>> by_seed;
  for (const auto& r : m.results) {
    const int i = r.strategy == Strategy::proposed ? 0 : r.strategy == Strategy::leader_follower ? 1 : 2;
    sum[i] += r.energy.total();
    ++count[i];
    by_seed[r.seed][i] = r.energy.total();
  }
  int ordered = 0;
  for (const auto& [_, e] : by_seed)
    if (e[0] <= e[1] && e[1] <= e[2]) ++ordered;
  const double p = sum[0] / std::max(1, count[0]) / 1e3, lf = sum[1] / std::max(1, count[1]) / 1e3,
               sq = sum[2] / std::max(1, count[2]) / 1e3;
  const bool all = count[0] == 20 && count[1] == 20 && count[2] == 20;
  report(7, "strategy ordering", all && p < lf && lf < sq && m.slowest < tol::mission_runtime_s,
         fmt("20 paired seeds: mean proposed %.1f kJ < leader-follower %.1f kJ < sequential %.1f kJ; per-seed order "
             "held %d/20; slowest mission %.1f s (limit %.0f s)%s",
             p, lf, sq, ordered, m.slowest, tol::mission_runtime_s, all ? "" : "; some missions failed"));
}

void criterion8() {
  const Scenario base = base_scenario();
  SweepOptions so;
  so.seeds = 5;
  so.threads = 1;
  auto run = [&](SweepAxis axis, std::vector<double> values, const Scenario& b) {
    so.axis = axis;
    so.values = values;
    return sweep(b, so);
  };
  auto failed = [](const std::vector<SweepRow>& rows) {
    int f = 0;
    for (const auto& r : rows) f += r.failures;
    return f;
  };
  auto mark = [](bool ok) { return ok ? "ok" : "NO"; };
  std::string detail;
  bool pass = true;

  const auto sig = run(SweepAxis::sigma, {30.0, 50.0}, base);
  bool ok = sig[1].energy_mean > sig[0].energy_mean && failed(sig) == 0;
  pass = pass && ok;
  detail += fmt("sigma 30/50 m: %.1f/%.1f kJ [%s]", sig[0].energy_mean / 1e3, sig[1].energy_mean / 1e3, mark(ok));

  const auto gs = run(SweepAxis::gamma_s, {1.0, 5.0}, base);
  ok = gs[1].hover_points_mean >= gs[0].hover_points_mean && failed(gs) == 0;
  pass = pass && ok;
  detail += fmt("; gamma_s 1/5 dB: %.1f/%.1f hover points [%s]", gs[0].hover_points_mean, gs[1].hover_points_mean,
                mark(ok));

  const std::vector<double> zs{2.0, 4.0, 8.0};
  for (double db : {1.0, 5.0}) {
    Scenario b = base;
    b.requirements.inst_snr = db_to_linear(db);
    const auto rows = run(SweepAxis::Z, zs, b);
    ok = failed(rows) == 0;
    detail += fmt("; Z 2/4/8 at %g dB:", db);
    for (const auto& r : rows) detail += fmt(" %.1f", r.energy_mean / 1e3);
    detail += " kJ";
    if (db == 1.0) {
      for (std::size_t i = 1; i < rows.size(); ++i) ok = ok && rows[i].energy_mean <= rows[i - 1].energy_mean;
    } else {
      double lo = INFINITY, hi = 0.0, avg = 0.0;
      for (const auto& r : rows) lo = std::min(lo, r.energy_mean), hi = std::max(hi, r.energy_mean), avg += r.energy_mean;
      avg /= rows.size();
      ok = ok && hi <= avg * (1 + tol::flat_band) && lo >= avg * (1 - tol::flat_band);
      detail += fmt(" (spread %+.1f%%/%+.1f%%)", 100 * (lo / avg - 1), 100 * (hi / avg - 1));
    }
    if (failed(rows)) detail += fmt(" %d failed runs", failed(rows));
    detail += fmt(" [%s]", mark(ok));
    pass = pass && ok;
  }
  report(8, "trend reproduction", pass, detail);
}

struct Asymmetry {
  std::vector<MissionResult> results;
  std::vector<Scenario> scenarios;
};

Asymmetry criterion9() {
  Scenario s = base_scenario();
  s.current.kind = CurrentKind::analytic_wave;
  // Upstream is the sign whose flow opposes the start-to-end direction on average.
  auto along = [&](double v) {
    Scenario t = s;
    t.current.max_speed = v;
    const Vec2 a = s.world.usv_start, b = s.world.usv_end;
    double proj = 0.0;
    for (int i = 0; i <= 100; ++i) proj += current_at(t.current, a + (b - a) * (i / 100.0)).dot((b - a).normalized());
    return proj;
  };
  const double up = along(3.0) < 0.0 ? 3.0 : -3.0;
  Asymmetry out;
  std::string detail;
  bool pass = true;
  std::map<std::string, std::vector<Vec3>> uav;
  std::map<std::string, double> energy;
  for (double v : {up, -up})
    for (Strategy st : {Strategy::proposed, Strategy::leader_follower}) {
      Scenario t = s;
      t.current.max_speed = v;
      const std::string key = to_string(st) + (v == up ? " up" : " down");
      try {
        MissionResult r = run_mission(t, st, 1);
        uav[key] = r.trajectory.uav;
        energy[key] = r.energy.total();
        out.results.push_back(std::move(r));
        out.scenarios.push_back(t);
      } catch (const std::exception& e) {
        pass = false;
        detail += key + " failed: " + e.what() + "; ";
      }
    }
  if (pass) {
    const bool lf_same = uav["leader-follower up"] == uav["leader-follower down"];
    const bool p_diff = uav["proposed up"] != uav["proposed down"];
    pass = energy["proposed up"] > energy["proposed down"] && lf_same && p_diff;
    detail += fmt("proposed upstream %.1f kJ > downstream %.1f kJ; leader-follower UAV path %s; proposed UAV path %s",
                  energy["proposed up"] / 1e3, energy["proposed down"] / 1e3,
                  lf_same ? "bit-identical" : "DIFFERS", p_diff ? "differs" : "IDENTICAL");
  }
  report(9, "current asymmetry", pass, detail);
  return out;
}

void criterion10(const Missions& m, const Asymmetry& a) {
  const fs::path root = fs::temp_directory_path() / ("airsea_acceptance_" + std::to_string(::getpid()));
  int checked = 0, bad = 0;
  double worst = 0.0;
  std::string first_bad;
  auto check = [&](const MissionResult& r, const Scenario& s) {
    const fs::path dir = root / std::to_string(checked++);
    emit_outputs(r, s, dir);
    const ValidationReport rep = validate_outputs(dir);
    for (const auto& e : rep.audit.entries) worst = std::max(worst, e.max_violation);
    if (!rep.pass()) {
      ++bad;
      if (first_bad.empty()) first_bad = to_string(r.strategy) + " seed " + std::to_string(r.seed);
    }
  };
  for (std::size_t i = 0; i < m.results.size(); ++i) check(m.results[i], m.scenarios[i]);
  for (std::size_t i = 0; i < a.results.size(); ++i) check(a.results[i], a.scenarios[i]);
  fs::remove_all(root);
  report(10, "full-mission audit", bad == 0 && m.errors.empty() && checked > 0,
         fmt("%d emitted missions re-audited from files, %d invalid%s, %zu planning failures, worst violation %.2e "
             "(tol %.0e)",
             checked, bad, first_bad.empty() ? "" : (" (first: " + first_bad + ")").c_str(), m.errors.size(), worst,
             tol::audit));
  for (const auto& e : m.errors) std::printf("     planning failure: %s\n", e.c_str());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  const Missions paired = run_paired(20);
  criterion6(paired);
  criterion7(paired);
  criterion8();
  const Asymmetry asym = criterion9();
  criterion10(paired, asym);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
