#include <airsea/pipeline.hpp>

#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace airsea {

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::K: return "K";
    case SweepAxis::sigma: return "sigma";
    case SweepAxis::gamma_s: return "gamma_s";
    case SweepAxis::gamma_c: return "gamma_c";
    case SweepAxis::Z: return "Z";
    case SweepAxis::current: return "current";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::K, SweepAxis::sigma, SweepAxis::gamma_s, SweepAxis::gamma_c, SweepAxis::Z,
                      SweepAxis::current})
    if (to_string(a) == name) return a;
  throw std::invalid_argument("unknown sweep axis '" + name + "' (K, sigma, gamma_s, gamma_c, Z, current)");
}

double dispersion(const std::vector<Vec2>& targets) {
  if (targets.size() < 2) return 0.0;
  Vec2 mean = Vec2::Zero();
  for (const Vec2& t : targets) mean += t;
  mean /= double(targets.size());
  double ss = 0.0;
  for (const Vec2& t : targets) ss += (t - mean).squaredNorm();
  return std::sqrt(ss / double(targets.size() - 1));
}

std::vector<Vec2> gaussian_layout(int K, double sigma, double field, const Scenario& s, std::uint64_t seed) {
  if (K < 1 || sigma < 0.0 || field <= 0.0) throw std::invalid_argument("gaussian_layout: bad K, sigma or field");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vec2 centre(field / 2, field / 2);
  auto admissible = [&](const Vec2& p) {
    if (p.x() < 0.0 || p.y() < 0.0 || p.x() > field || p.y() > field) return false;
    for (const Vec2& o : s.world.obstacles)
      if ((p - o).norm() < s.system.obstacle_radius) return false;
    return true;
  };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Vec2> pts;
    for (int guard = 0; int(pts.size()) < K && guard < 100000; ++guard) {
      const Vec2 p = centre + sigma * Vec2(normal(rng), normal(rng));
      if (admissible(p)) pts.push_back(p);
    }
    if (int(pts.size()) < K) break;
    if (K == 1 || sigma == 0.0) {
      if (sigma == 0.0) pts.assign(K, centre);
      return pts;
    }
    const double now = dispersion(pts);
    if (now <= 0.0) continue;
    Vec2 mean = Vec2::Zero();
    for (const Vec2& p : pts) mean += p;
    mean /= double(K);
    bool ok = true;
    for (Vec2& p : pts) {
      p = mean + (p - mean) * (sigma / now);
      ok = ok && admissible(p);
    }
    if (ok) return pts;
  }
  throw std::runtime_error("gaussian_layout: no admissible layout for sigma " + std::to_string(sigma));
}

Scenario sweep_scenario(const Scenario& base, const SweepOptions& opts, double value, std::uint64_t seed) {
  Scenario s = base;
  int K = opts.K;
  double sigma = opts.sigma;
  switch (opts.axis) {
    case SweepAxis::K: K = int(std::lround(value)); break;
    case SweepAxis::sigma: sigma = value; break;
    case SweepAxis::gamma_s: s.requirements.inst_snr = db_to_linear(value); break;
    case SweepAxis::gamma_c: s.requirements.rate_fly = s.requirements.rate_hover = value; break;
    case SweepAxis::Z: s.system.max_simultaneous_targets = int(std::lround(value)); break;
    case SweepAxis::current:
      if (s.current.kind == CurrentKind::zero) s.current.kind = CurrentKind::analytic_wave;
      s.current.max_speed = value;
      break;
  }
  s.world.targets = gaussian_layout(K, sigma, opts.field, s, seed);
  validate(s);
  return s;
}

namespace {

void mean_sd(const std::vector<double>& x, double& mean, double& sd) {
  mean = sd = 0.0;
  if (x.empty()) return;
  for (double v : x) mean += v;
  mean /= double(x.size());
  if (x.size() < 2) return;
  for (double v : x) sd += (v - mean) * (v - mean);
  sd = std::sqrt(sd / double(x.size() - 1));
}

}  // namespace

std::vector<SweepRow> sweep(const Scenario& base, const SweepOptions& opts) {
  struct Task {
    std::size_t value, strategy;
    int seed;
    double energy = std::numeric_limits<double>::quiet_NaN(), duration = 0.0;
    int hover_points = 0;
  };
  std::vector<Task> tasks;
  for (std::size_t v = 0; v < opts.values.size(); ++v)
    for (std::size_t st = 0; st < opts.strategies.size(); ++st)
      for (int k = 0; k < opts.seeds; ++k) tasks.push_back({v, st, k});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      Task& t = tasks[i];
      const std::uint64_t seed = opts.first_seed + std::uint64_t(t.seed);
      try {
        const Scenario s = sweep_scenario(base, opts, opts.values[t.value], seed);
        const MissionResult r = run_mission(s, opts.strategies[t.strategy], seed, opts.pipeline);
        t.energy = r.energy.total();
        t.duration = r.duration();
        t.hover_points = r.hover_points();
      } catch (const std::exception&) {
      }
    }
  };
  const int threads = std::max(1, opts.threads > 0 ? opts.threads : int(std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<SweepRow> rows;
  for (std::size_t v = 0; v < opts.values.size(); ++v)
    for (std::size_t st = 0; st < opts.strategies.size(); ++st) {
      SweepRow row;
      row.value = opts.values[v];
      row.strategy = opts.strategies[st];
      std::vector<double> e, d;
      double hp = 0.0;
      for (const Task& t : tasks) {
        if (t.value != v || t.strategy != st) continue;
        ++row.runs;
        row.energies.push_back(t.energy);
        if (std::isnan(t.energy)) {
          ++row.failures;
          continue;
        }
        e.push_back(t.energy);
        d.push_back(t.duration);
        hp += t.hover_points;
      }
      mean_sd(e, row.energy_mean, row.energy_sd);
      mean_sd(d, row.duration_mean, row.duration_sd);
      row.hover_points_mean = e.empty() ? 0.0 : hp / double(e.size());
      rows.push_back(std::move(row));
    }
  return rows;
}

nlohmann::json to_json(const std::vector<SweepRow>& rows, const SweepOptions& opts) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json energies = nlohmann::json::array();
    for (double e : r.energies) energies.push_back(std::isnan(e) ? nlohmann::json(nullptr) : nlohmann::json(e));
    out.push_back({{"value", r.value},
                   {"strategy", to_string(r.strategy)},
                   {"runs", r.runs},
                   {"failures", r.failures},
                   {"energy_mean_J", r.energy_mean},
                   {"energy_sd_J", r.energy_sd},
                   {"duration_mean_s", r.duration_mean},
                   {"duration_sd_s", r.duration_sd},
                   {"hover_points_mean", r.hover_points_mean},
                   {"energy_per_seed_J", energies}});
  }
  return {{"axis", to_string(opts.axis)},
          {"seeds", opts.seeds},
          {"first_seed", opts.first_seed},
          {"K", opts.K},
          {"sigma", opts.sigma},
          {"field", opts.field},
          {"rows", out}};
}

}  // namespace airsea
