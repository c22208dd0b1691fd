#include <airsea/channel.hpp>
#include <airsea/conic/model.hpp>
#include <airsea/conic/rank1.hpp>
#include <airsea/stage.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <tuple>

namespace airsea {

using conic::Affine;
using conic::Model;
using conic::VectorXd;

namespace {

// One SINR requirement target * (c I + N) <= c S for a common beam scale c.
struct SinrTerm {
  double signal = 0.0, interference = 0.0, noise = 0.0, target = 0.0;
};

// Smallest common scale meeting every requirement, or nullopt.
std::optional<double> common_scale(const std::vector<SinrTerm>& terms) {
  double c = 0.0;
  for (const auto& t : terms) {
    if (t.target <= 0.0) continue;
    const double margin = t.signal - t.target * t.interference;
    if (!(margin > 0.0)) return std::nullopt;
    c = std::max(c, t.target * t.noise / margin);
  }
  return c;
}

struct SlotGeometry {
  CVec h;                     // comm channel
  std::vector<CVec> g;        // effective sensing channels H_k^H u_k
  std::vector<double> sense_noise;
  double comm_noise = 0.0;
};

SlotGeometry slot_geometry(const Vec3& q, const Vec2& b, const std::vector<int>& targets, const Scenario& s) {
  const auto& sys = s.system;
  SlotGeometry geo;
  geo.h = comm_channel(q, b, sys).h;
  geo.comm_noise = sys.noise_hover / sys.duty();
  for (int k : targets) {
    const SensingChannel ch = sensing_channel(q, s.world.targets[k], sys);
    const CVec u = combiner(q, s.world.targets[k], sys);
    geo.g.push_back(ch.H.adjoint() * u);
    geo.sense_noise.push_back(sys.noise_sense * u.squaredNorm() / sys.duty());
  }
  return geo;
}

// Requirements for beams w and v (v indexed like targets).
std::vector<SinrTerm> slot_terms(const SlotGeometry& geo, const CVec& w, const std::vector<CVec>& v, double rho,
                                 double gamma) {
  std::vector<SinrTerm> terms;
  SinrTerm comm{std::norm(geo.h.dot(w)), 0.0, geo.comm_noise, rho};
  for (const auto& vk : v) comm.interference += std::norm(geo.h.dot(vk));
  terms.push_back(comm);
  for (std::size_t k = 0; k < v.size(); ++k) {
    SinrTerm t{std::norm(geo.g[k].dot(v[k])), 0.0, geo.sense_noise[k], gamma};
    for (std::size_t j = 0; j < v.size(); ++j)
      if (j != k) t.interference += std::norm(geo.g[k].dot(v[j]));
    terms.push_back(t);
  }
  return terms;
}

double beam_power(const CVec& w, const std::vector<CVec>& v) {
  double p = w.squaredNorm();
  for (const auto& vk : v) p += vk.squaredNorm();
  return p;
}

}  // namespace

SensingSchedule joint_schedule(const std::vector<int>& targets, int slots, const Scenario& s) {
  SensingSchedule out;
  out.targets.assign(slots, targets);
  out.gamma.assign(slots, slots > 0 ? s.requirements.total_snr / slots : 0.0);
  return out;
}

namespace {

using SlotKey = std::tuple<double, double, std::vector<int>, double>;

struct SlotResult {
  std::vector<CVec> beams;  // w then one per scheduled target
  double relaxed = 0.0;
  bool randomized = false;
};

SlotResult solve_slot(const Vec3& q, const Vec2& b, const std::vector<int>& targets, double gamma,
                      const Scenario& s, int stage, int slot, std::mt19937_64& rng, std::uint64_t seed) {
  const auto& sys = s.system;
  const int M = sys.num_antennas;
  const int K = int(targets.size());
  const double rho = std::exp2(s.requirements.rate_hover) - 1.0;
  const bool sense = gamma > 0.0 && K > 0;
  SlotResult out;
  if (rho <= 0.0 && !sense) {
    out.beams.assign(1 + K, CVec::Zero(M));
    return out;
  }
  const SlotGeometry geo = slot_geometry(q, b, targets, s);
  Model m;
  const int mats = 1 + K;
  const Eigen::MatrixXcd start = Eigen::MatrixXcd::Identity(M, M) * (0.5 * sys.power_budget / (mats * M));
  std::vector<conic::HermitianVar> X;
  for (int i = 0; i < mats; ++i) X.push_back(conic::add_hermitian_psd(m, M, start));
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(M, M);
  Affine total;
  for (const auto& x : X) total += conic::trace_product(x, I);
  m.add_objective(total);
  m.add_le(total, Affine(sys.power_budget));
  // Each requirement is divided by its noise term.
  const Eigen::MatrixXcd Hc = geo.h * geo.h.adjoint() / geo.comm_noise;
  if (rho > 0.0) {
    Affine c = conic::trace_product(X[0], Hc) - Affine(rho);
    for (int k = 0; k < K; ++k) c -= rho * conic::trace_product(X[1 + k], Hc);
    m.add_nonneg(c);
  }
  if (sense)
    for (int k = 0; k < K; ++k) {
      const Eigen::MatrixXcd G = geo.g[k] * geo.g[k].adjoint() / geo.sense_noise[k];
      Affine c = conic::trace_product(X[1 + k], G) - Affine(gamma);
      for (int j = 0; j < K; ++j)
        if (j != k) c -= gamma * conic::trace_product(X[1 + j], G);
      m.add_nonneg(c);
    }
  conic::SolverOptions so;
  so.tol = 1e-9;
  const conic::Solution sol = conic::solve_conic(m.program(), so);
  // A stall just short of the gap target still gives usable beams; they are
  // rescaled and checked exactly below.
  const bool near = sol.status == conic::Status::iteration_limit && sol.max_violation <= 1e-9 &&
                    sol.gap <= 1e-6 * (1.0 + std::abs(sol.objective));
  if (sol.status != conic::Status::optimal && !near)
    throw StageError(stage, "hover beamforming SDP " + std::string(conic::to_string(sol.status)) +
                                " at hover slot " + std::to_string(slot));
  out.relaxed = sol.objective;

  const double g_eff = sense ? gamma : 0.0;
  std::vector<Eigen::MatrixXcd> values;
  bool dominant = true;
  std::vector<CVec> pc;
  for (int i = 0; i < mats; ++i) {
    values.push_back(conic::hermitian_value(X[i], sol.x));
    const conic::Rank1 r = conic::extract_rank1(values.back(), {1e-3, 0, seed, 1e-6});
    dominant = dominant && !r.randomized;
    pc.push_back(r.vector);
  }
  auto scaled = [&](const std::vector<CVec>& cand) -> std::optional<std::vector<CVec>> {
    const std::vector<CVec> v(cand.begin() + 1, cand.end());
    const auto c = common_scale(slot_terms(geo, cand[0], v, rho, g_eff));
    if (!c) return std::nullopt;
    std::vector<CVec> res;
    for (const auto& x : cand) res.push_back(std::sqrt(*c) * x);
    if (beam_power(res[0], std::vector<CVec>(res.begin() + 1, res.end())) > sys.power_budget * (1 + 1e-9))
      return std::nullopt;
    return res;
  };
  auto power_of = [](const std::vector<CVec>& x) {
    double p = 0.0;
    for (const auto& v : x) p += v.squaredNorm();
    return p;
  };
  std::optional<std::vector<CVec>> best = scaled(pc);
  if (!dominant || !best) {
    out.randomized = true;
    for (int draw = 0; draw < 100; ++draw) {
      std::vector<CVec> cand;
      for (const auto& Xv : values) cand.push_back(conic::gaussian_sample(Xv, rng));
      auto sc = scaled(cand);
      if (sc && (!best || power_of(*sc) < power_of(*best))) best = sc;
    }
  }
  if (!best) throw StageError(stage, "no feasible rank-one beams at hover slot " + std::to_string(slot));
  out.beams = *best;
  return out;
}

}  // namespace

HoverBeams optimize_hover_beams(const Vec3& q, const std::vector<Vec2>& b, const SensingSchedule& schedule,
                                const Scenario& s, int stage, std::uint64_t seed) {
  if (schedule.slots() != int(b.size()))
    throw StageError(stage, "sensing schedule and USV path lengths differ");
  const int M = s.system.num_antennas;
  HoverBeams out;
  std::mt19937_64 rng(seed);
  std::map<SlotKey, SlotResult> cache;
  for (std::size_t n = 0; n < b.size(); ++n) {
    const auto& targets = schedule.targets[n];
    const SlotKey key{b[n].x(), b[n].y(), targets, schedule.gamma[n]};
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, solve_slot(q, b[n], targets, schedule.gamma[n], s, stage, int(n) + 1, rng, seed))
               .first;
    const SlotResult& r = it->second;
    SlotBeams beams;
    beams.w = r.beams[0];
    beams.v.assign(s.world.targets.size(), CVec());
    beams.active.assign(s.world.targets.size(), false);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      beams.v[targets[k]] = r.beams[1 + k];
      beams.active[targets[k]] = true;
    }
    if (!beams.w.size()) beams.w = CVec::Zero(M);
    const double power = beams.comm_power() + beams.sense_power();
    out.relaxed_power += r.relaxed;
    out.power += power;
    out.randomized += r.randomized ? 1 : 0;
    if (r.relaxed > 0.0) out.rank1_gap = std::max(out.rank1_gap, power / r.relaxed - 1.0);
    out.slots.push_back(std::move(beams));
  }
  return out;
}

double nulled_sensing_snr(const Vec3& q, double distance, const Vec2& target, const Scenario& s) {
  const auto& sys = s.system;
  const double H = q.z();
  const Vec2 b = ground(q) + Vec2(std::sqrt(std::max(distance * distance - H * H, 0.0)), 0.0);
  const CVec h = comm_channel(q, b, sys).h;
  const double rho = std::exp2(s.requirements.rate_hover) - 1.0;
  const double p_link = rho * (sys.noise_hover / sys.duty()) / h.squaredNorm();
  const double p_sense = sys.power_budget - p_link;
  if (p_sense <= 0.0) return 0.0;
  const CVec u = combiner(q, target, sys);
  CVec g = sensing_channel(q, target, sys).H.adjoint() * u;
  if (rho > 0.0) g -= h * (h.dot(g) / h.squaredNorm());
  return p_sense * g.squaredNorm() / (sys.noise_sense * u.squaredNorm() / sys.duty());
}

HoverSetup plan_hover(const Vec3& q, const Vec2& arrive, const std::vector<int>& targets, int slots,
                      const Scenario& s, int stage) {
  const auto& sys = s.system;
  const double total = s.requirements.total_snr;
  HoverSetup out;
  if (slots >= 1) {
    out.schedule = joint_schedule(targets, slots, s);
    try {
      optimize_hover_beams(q, {arrive}, {{targets}, {out.schedule.gamma[0]}}, s, stage);
      out.usv.assign(slots + 1, arrive);
      out.joint = true;
      return out;
    } catch (const StageError&) {
    }
  }

  // One target per slot, with the USV parked on the ray from the hover point
  // through its arrival point.
  const double H = q.z();
  const Vec2 centre = ground(q);
  const double r_arrive = (arrive - centre).norm();
  const Vec2 dir = r_arrive > 1e-9 ? Vec2((arrive - centre) / r_arrive) : Vec2(1.0, 0.0);
  const double d_arrive = std::hypot(r_arrive, H);
  const double d_top = std::max(d_arrive, comm_distance_threshold(s.requirements.rate_hover, sys.power_budget, sys));
  const double step = sys.usv_max_speed * sys.slot_duration;

  struct Choice {
    double cost = std::numeric_limits<double>::infinity();
    double move = 0.0;
    Vec2 park;
    std::vector<int> counts;
  } best;
  const int grid = 60;
  const double max_slots = 1000.0;
  for (int i = 0; i <= grid; ++i) {
    const double D = H + (d_top - H) * i / grid;
    const double r = std::sqrt(std::max(D * D - H * H, 0.0));
    const Vec2 park = centre + r * dir;
    bool blocked = false;
    for (const Vec2& o : s.world.obstacles) {
      const Vec2 seg = park - arrive;
      const double t = seg.squaredNorm() > 0 ? std::clamp((o - arrive).dot(seg) / seg.squaredNorm(), 0.0, 1.0) : 0.0;
      if ((arrive + t * seg - o).norm() < sys.obstacle_radius) blocked = true;
    }
    if (blocked) continue;
    std::vector<int> counts;
    double cost = std::ceil((park - arrive).norm() / step - 1e-9);
    for (int k : targets) {
      const double g = nulled_sensing_snr(q, D, s.world.targets[k], s);
      if (!(g * max_slots > total)) {
        cost = std::numeric_limits<double>::infinity();
        break;
      }
      counts.push_back(std::max(1, int(std::ceil(total / g * (1 + 1e-9)))));
      cost += counts.back();
    }
    const double move = (park - arrive).norm();
    if (cost < best.cost || (cost == best.cost && move < best.move)) best = {cost, move, park, counts};
  }
  if (!std::isfinite(best.cost))
    throw StageError(stage, "no USV position lets the hover sense every target");

  // Slower transits trade hover time against the USV's quadratic drag.
  const int transit = std::max(int(std::ceil(best.move / step - 1e-9)),
                               int(std::lround(best.move * std::sqrt(sys.usv_drag / sys.hover_power()) /
                                               sys.slot_duration)));
  out = HoverSetup{};
  out.usv.push_back(arrive);
  for (int n = 1; n <= transit; ++n) {
    out.usv.push_back(arrive + (double(n) / transit) * (best.park - arrive));
    out.schedule.targets.push_back({});
    out.schedule.gamma.push_back(0.0);
  }
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (int c = 0; c < best.counts[i]; ++c) {
      out.usv.push_back(best.park);
      out.schedule.targets.push_back({targets[i]});
      out.schedule.gamma.push_back(total / best.counts[i]);
    }
  return out;
}

RateMargin hover_rate_margin(const Vec3& q, double distance, const SlotBeams& beams, const SystemParams& sys,
                             double rate) {
  (void)q;
  const int M = sys.num_antennas;
  const double c = sys.channel_gain * sys.small_scale_fading;
  const double kappa = 2.0 * std::numbers::pi * sys.antenna_spacing * sys.altitude / sys.wavelength;
  const double D = distance;
  CVec h(M), dh(M);
  for (int m = 0; m < M; ++m) {
    const std::complex<double> a = std::polar(1.0, kappa * m / D);
    h[m] = c / (D * D) * a;
    dh[m] = c * a * std::complex<double>(-2.0 / (D * D * D), -kappa * m / (D * D * D * D));
  }
  const double rho = std::exp2(rate) - 1.0;
  auto term = [&](const CVec& x, double weight, RateMargin& r) {
    if (!x.size()) return;
    const std::complex<double> hx = h.dot(x), dhx = dh.dot(x);
    r.value += weight * std::norm(hx);
    r.slope += weight * 2.0 * std::real(std::conj(hx) * dhx);
  };
  RateMargin r;
  term(beams.w, 1.0, r);
  for (std::size_t k = 0; k < beams.v.size(); ++k)
    if (k < beams.active.size() && beams.active[k]) term(beams.v[k], -rho, r);
  r.value -= rho * sys.noise_hover / sys.duty();
  return r;
}

namespace {

// Distances around d0 over which the fixed beams keep the hover rate.
std::pair<double, double> rate_interval(const Vec3& q, double d0, const SlotBeams& beams, const SystemParams& sys,
                                        double rate) {
  // Rounding slack well inside the exact check's tolerance.
  const double slack = 1e-10 * (std::exp2(rate) - 1.0) * sys.noise_hover / sys.duty();
  auto F = [&](double D) { return hover_rate_margin(q, D, beams, sys, rate).value + slack; };
  if (F(d0) < 0.0) return {d0, d0};
  auto edge = [&](double dir, double limit) {
    double inside = d0, outside = limit, step = 0.25;
    for (;;) {
      const double next = inside + dir * step;
      if (dir * (next - limit) >= 0.0) {
        if (F(limit) >= 0.0) return limit;
        break;
      }
      if (F(next) < 0.0) {
        outside = next;
        break;
      }
      inside = next;
      step *= 1.5;
    }
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (inside + outside);
      (F(mid) >= 0.0 ? inside : outside) = mid;
    }
    return inside;
  };
  return {edge(-1.0, q.z()), edge(1.0, d0 + 1000.0)};
}

class HoverUsvProblem {
 public:
  HoverUsvProblem(const Vec3& q, const std::vector<SlotBeams>& beams, const std::vector<Vec2>& init,
                  const Scenario& s)
      : q_(q), beams_(beams), init_(init), s_(s), N_(int(init.size()) - 1) {}

  int primary() const { return 2 * N_; }

  Vec2 b(const VectorXd& x, int n) const {
    if (n == 0) return init_.front();
    return Vec2(x[2 * (n - 1)], x[2 * (n - 1) + 1]);
  }

  VectorXd initial() const {
    VectorXd x(primary());
    for (int n = 1; n <= N_; ++n) x.segment<2>(2 * (n - 1)) = init_[n];
    return x;
  }

  double objective(const VectorXd& x) const {
    double e = 0.0;
    for (int n = 1; n <= N_; ++n) e += usv_slot_energy(b(x, n - 1), b(x, n), s_.current, s_.system);
    return e;
  }

  bool feasible(const VectorXd& x) const {
    const auto& sys = s_.system;
    const double need = std::exp2(s_.requirements.rate_hover) - 1.0;
    for (int n = 1; n <= N_; ++n) {
      if ((b(x, n) - b(x, n - 1)).norm() > sys.usv_max_speed * sys.slot_duration * (1 + 1e-7)) return false;
      for (const Vec2& o : s_.world.obstacles)
        if ((b(x, n) - o).norm() < sys.obstacle_radius * (1 - 1e-7)) return false;
      if (need > 0.0) {
        const SlotBeams& bm = beams_[n - 1];
        if (hover_sinr(q_, b(x, n), bm.w, bm.v, bm.active, sys) < need * (1 - 1e-9)) return false;
      }
    }
    return true;
  }

  conic::ConicProgram build(const VectorXd& x0) const {
    const auto& sys = s_.system;
    const double dt = sys.slot_duration;
    Model m;
    for (int i = 0; i < primary(); ++i) m.add_var(x0[i]);
    auto ba = [&](int n, int c) -> Affine {
      if (n == 0) return Affine(init_.front()[c]);
      return m.var(2 * (n - 1) + c);
    };
    const bool rate = s_.requirements.rate_hover > 0.0;
    for (int n = 1; n <= N_; ++n) {
      const Affine bx = (ba(n, 0) - ba(n - 1, 0)) * (1.0 / dt);
      const Affine by = (ba(n, 1) - ba(n - 1, 1)) * (1.0 / dt);
      m.add_soc({bx, by}, Affine(sys.usv_max_speed));
      const Vec2 w = current_at(s_.current, b(x0, n));
      const int u = m.add_var(m.size() < x0.size() ? x0[m.size()] : 0.0);
      m.add_rotated({bx - w.x(), by - w.y()}, m.var(u), Affine(1.0));
      m.add_objective(sys.usv_drag * dt * m.var(u));
      for (const Vec2& o : s_.world.obstacles) {
        const Vec2 d0 = b(x0, n) - o;
        const double len = std::max(d0.norm(), 1e-9);
        m.add_nonneg((d0.x() / len) * (ba(n, 0) - o.x()) + (d0.y() / len) * (ba(n, 1) - o.y()) -
                     sys.obstacle_radius);
      }
      if (!rate) continue;
      const double d0 = (q_ - lift(b(x0, n), 0.0)).norm();
      const auto [lo, hi] = rate_interval(q_, d0, beams_[n - 1], sys, s_.requirements.rate_hover);
      m.add_soc({ba(n, 0) - q_.x(), ba(n, 1) - q_.y(), Affine(q_.z())}, Affine(hi));
      if (lo > q_.z() * (1 + 1e-12)) {
        const Vec2 grad = (b(x0, n) - ground(q_)) / d0;
        m.add_nonneg(Affine(d0 - lo) + grad.x() * (ba(n, 0) - b(x0, n).x()) + grad.y() * (ba(n, 1) - b(x0, n).y()));
      }
    }
    return m.program();
  }

 private:
  Vec3 q_;
  const std::vector<SlotBeams>& beams_;
  std::vector<Vec2> init_;
  const Scenario& s_;
  int N_;
};

}  // namespace

HoverUsvResult optimize_hover_usv(const Vec3& q, const std::vector<SlotBeams>& beams,
                                  const std::vector<Vec2>& init, const Scenario& s,
                                  const conic::ScaOptions& opts, int stage) {
  HoverUsvResult out;
  const int N = int(init.size()) - 1;
  if (N < 1) throw StageError(stage, "hover USV path needs at least one slot");
  if (int(beams.size()) != N) throw StageError(stage, "hover beams and USV path lengths differ");
  const HoverUsvProblem hp(q, beams, init, s);
  conic::ScaProblem prob;
  prob.build = [&](const VectorXd& x) { return hp.build(x); };
  prob.objective = [&](const VectorXd& x) { return hp.objective(x.head(hp.primary())); };
  prob.feasible = [&](const VectorXd& x) { return hp.feasible(x.head(hp.primary())); };
  VectorXd x0 = hp.initial();
  const int full = hp.build(x0).num_vars;
  x0.conservativeResize(full);
  x0.tail(full - hp.primary()).setZero();
  conic::ScaState st;
  try {
    st = conic::sca_loop(prob, x0, opts);
  } catch (const conic::ScaError& e) {
    throw StageError(stage, std::string("hover USV surrogate infeasible: ") + e.what());
  }
  const VectorXd x = st.iterate.head(hp.primary());
  for (int n = 0; n <= N; ++n) out.usv.push_back(hp.b(x, n));
  out.history = st.history;
  out.penalty_used = st.penalty_used;
  return out;
}

StageSolution alternate_optimize_hover(const StageProblem& p, const Scenario& s, const AoOptions& opts) {
  const auto& sys = s.system;
  if (p.targets.empty()) throw StageError(p.stage, "hover stage without targets");
  const Vec3 q = p.uav_from;
  const double dt = sys.slot_duration;

  HoverSetup setup;
  if (p.schedule.slots() > 0) {
    if (p.warm_usv.size() != std::size_t(p.schedule.slots() + 1))
      throw StageError(p.stage, "fixed hover schedule needs slots + 1 USV positions");
    setup.usv = p.warm_usv;
    setup.schedule = p.schedule;
  } else {
    setup = plan_hover(q, p.usv_from, p.targets, p.slots, s, p.stage);
  }
  const int N = setup.schedule.slots();
  std::vector<Vec2> b = setup.usv;
  auto slice = [](const std::vector<Vec2>& v) { return std::vector<Vec2>(v.begin() + 1, v.end()); };
  auto usv_energy = [&](const std::vector<Vec2>& path) {
    double e = 0.0;
    for (int n = 1; n <= N; ++n) e += usv_slot_energy(path[n - 1], path[n], s.current, sys);
    return e;
  };

  HoverBeams beams = optimize_hover_beams(q, slice(b), setup.schedule, s, p.stage, opts.seed);
  StageSolution sol;
  double total = dt * beams.power + usv_energy(b);
  sol.history.push_back(total);
  for (int it = 0; it < opts.max_iterations; ++it) {
    const HoverUsvResult usv = optimize_hover_usv(q, beams.slots, b, s, opts.sca, p.stage);
    sol.penalty_used = sol.penalty_used || usv.penalty_used;
    b = usv.usv;
    HoverBeams next = optimize_hover_beams(q, slice(b), setup.schedule, s, p.stage, opts.seed + it + 1);
    // The previous beams stay feasible on the new path; keep whichever is cheaper.
    if (next.power <= beams.power) beams = std::move(next);
    const double now = dt * beams.power + usv_energy(b);
    sol.history.push_back(now);
    ++sol.iterations;
    const double change = total - now;
    total = now;
    if (change <= opts.tol * std::max(1.0, std::abs(now))) break;
  }

  for (int n = 0; n <= N; ++n) {
    sol.uav.push_back(q);
    sol.usv.push_back(b[n]);
  }
  sol.beams.emplace_back();
  for (auto& bm : beams.slots) sol.beams.push_back(bm);
  sol.schedule = setup.schedule;
  sol.randomized_slots = beams.randomized;
  sol.rank1_gap = beams.rank1_gap;
  sol.uav_energy = N * dt * uav_power_flying(0.0, sys);
  sol.transmit_energy = dt * beams.power;
  sol.usv_energy = usv_energy(b);
  return sol;
}

}  // namespace airsea
