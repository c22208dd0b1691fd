#include <airsea/channel.hpp>
#include <airsea/conic/model.hpp>
#include <airsea/stage.hpp>

#include <algorithm>
#include <cmath>

namespace airsea {

using conic::Affine;
using conic::Model;
using conic::VectorXd;

std::vector<Vec2> detour_path(const Vec2& a, const Vec2& b, int slots, const Scenario& s) {
  if (slots < 1) return {a};
  const double clear = 1.2 * s.system.obstacle_radius;
  const Vec2 along = (b - a).norm() > 0.0 ? Vec2((b - a).normalized()) : Vec2(1.0, 0.0);
  const Vec2 side(-along.y(), along.x());
  const int samples = std::max(200, 20 * slots);
  std::vector<Vec2> pts;
  for (int i = 0; i <= samples; ++i) {
    Vec2 p = a + (double(i) / samples) * (b - a);
    if (i > 0 && i < samples)
      for (const Vec2& o : s.world.obstacles) {
        const Vec2 r = p - o;
        if (r.norm() >= clear) continue;
        p = o + clear * (r.norm() > 1e-9 ? Vec2(r.normalized()) : side);
      }
    pts.push_back(p);
  }
  std::vector<double> arc{0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) arc.push_back(arc.back() + (pts[i] - pts[i - 1]).norm());
  std::vector<Vec2> out{a};
  std::size_t seg = 1;
  for (int n = 1; n < slots; ++n) {
    const double target = arc.back() * n / slots;
    while (seg + 1 < arc.size() && arc[seg] < target) ++seg;
    const double span = arc[seg] - arc[seg - 1];
    const double f = span > 0.0 ? (target - arc[seg - 1]) / span : 0.0;
    out.push_back(pts[seg - 1] + f * (pts[seg] - pts[seg - 1]));
  }
  out.push_back(b);
  return out;
}

namespace {

double path_length(const std::vector<Vec2>& p) {
  double len = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) len += (p[i] - p[i - 1]).norm();
  return len;
}

class FlyingProblem {
 public:
  FlyingProblem(const StageProblem& p, const Scenario& s)
      : p_(p), s_(s), N_(p.slots), follower_(!p.uav_path.empty()) {
    const auto& sys = s.system;
    const double dt = sys.slot_duration;
    if (follower_ && (p.uav_only || p.uav_path.size() != std::size_t(N_ + 1)))
      throw StageError(p.stage, "follower leg needs slots + 1 UAV positions and the USV");
    int next = 0;
    if (!follower_) q_ = next, next += 2 * (N_ - 1);
    if (!p.uav_only) {
      b_ = next, next += 2 * (N_ - 1);
      pc_ = next, next += N_;
    }
    if (!follower_) {
      s_idx_ = next, next += N_;
      xi_ = next, next += N_;
    }
    primary_ = next;

    if ((p.uav_to - p.uav_from).head<2>().norm() > sys.uav_max_speed * N_ * dt * (1.0 + 1e-9))
      throw StageError(p.stage, "UAV end point unreachable within the slot budget");
    if (!p.uav_only) {
      usv0_ = p.warm_usv.size() == std::size_t(N_ + 1) ? p.warm_usv : detour_path(p.usv_from, p.usv_to, N_, s);
      if (path_length(usv0_) > sys.usv_max_speed * N_ * dt * (1.0 + 1e-9))
        throw StageError(p.stage, "USV end point unreachable within the slot budget");
      for (const Vec2& o : s.world.obstacles)
        for (const Vec2& e : {p.usv_from, p.usv_to})
          if ((e - o).norm() < sys.obstacle_radius * (1.0 - 1e-9))
            throw StageError(p.stage, "USV boundary point inside an obstacle");
      const double g = sys.duty();
      rate_k_ = g * sys.num_antennas * std::pow(sys.channel_gain * sys.small_scale_fading, 2) /
                (sys.noise_comm * (std::exp2(s.requirements.rate_fly) - 1.0)) /
                std::pow(sys.altitude, 4);
    }
  }

  int primary() const { return primary_; }

  Vec2 q(const VectorXd& x, int n) const {
    if (follower_) return p_.uav_path[n].head<2>();
    if (n == 0) return p_.uav_from.head<2>();
    if (n == N_) return p_.uav_to.head<2>();
    return Vec2(x[q_ + 2 * (n - 1)], x[q_ + 2 * (n - 1) + 1]);
  }
  Vec2 b(const VectorXd& x, int n) const {
    if (n == 0) return p_.usv_from;
    if (n == N_) return p_.usv_to;
    return Vec2(x[b_ + 2 * (n - 1)], x[b_ + 2 * (n - 1) + 1]);
  }

  VectorXd initial() const {
    const auto& sys = s_.system;
    const double dt = sys.slot_duration;
    VectorXd x = VectorXd::Zero(primary_);
    std::vector<Vec2> uav(N_ + 1);
    bool follow = !p_.uav_only;
    for (int n = 0; n <= N_; ++n) {
      const double f = double(n) / N_;
      const Vec2 straight = (1 - f) * p_.uav_from.head<2>() + f * p_.uav_to.head<2>();
      uav[n] = follow ? Vec2(usv0_[n] + (1 - f) * (p_.uav_from.head<2>() - p_.usv_from) +
                             f * (p_.uav_to.head<2>() - p_.usv_to))
                      : straight;
    }
    if (follow)
      for (int n = 1; n <= N_; ++n)
        if ((uav[n] - uav[n - 1]).norm() > sys.uav_max_speed * dt) follow = false;
    for (int n = 1; n < N_ && follower_; ++n) x.segment<2>(b_ + 2 * (n - 1)) = usv0_[n];
    for (int n = 1; n < N_ && !follower_; ++n) {
      const double f = double(n) / N_;
      const Vec2 u = follow ? uav[n] : Vec2((1 - f) * p_.uav_from.head<2>() + f * p_.uav_to.head<2>());
      x.segment<2>(q_ + 2 * (n - 1)) = u;
      if (!p_.uav_only) x.segment<2>(b_ + 2 * (n - 1)) = usv0_[n];
    }
    for (int n = 1; n <= N_; ++n) {
      const double v = (q(x, n) - q(x, n - 1)).norm() / dt;
      if (!follower_) {
        x[s_idx_ + n - 1] = v;
        x[xi_ + n - 1] = xi_from_speed(v, sys);
      }
      if (!p_.uav_only) x[pc_ + n - 1] = comm_power_for_rate(distance(x, n), s_.requirements.rate_fly, sys);
    }
    return x;
  }

  double distance(const VectorXd& x, int n) const {
    return (lift(q(x, n), s_.system.altitude) - lift(b(x, n), 0.0)).norm();
  }

  double objective(const VectorXd& x) const {
    const auto& sys = s_.system;
    const double dt = sys.slot_duration;
    double e = 0.0;
    for (int n = 1; n <= N_; ++n) {
      if (!follower_) e += dt * uav_power_flying((q(x, n) - q(x, n - 1)).norm() / dt, sys);
      if (p_.uav_only) continue;
      e += dt * comm_power_for_rate(distance(x, n), s_.requirements.rate_fly, sys);
      e += usv_slot_energy(b(x, n - 1), b(x, n), s_.current, sys);
    }
    return e;
  }

  bool feasible(const VectorXd& x) const {
    const auto& sys = s_.system;
    const double dt = sys.slot_duration;
    for (int n = 1; n <= N_; ++n) {
      if (!follower_ && (q(x, n) - q(x, n - 1)).norm() > sys.uav_max_speed * dt * (1 + 1e-7)) return false;
      if (p_.uav_only) continue;
      if ((b(x, n) - b(x, n - 1)).norm() > sys.usv_max_speed * dt * (1 + 1e-7)) return false;
      if (comm_power_for_rate(distance(x, n), s_.requirements.rate_fly, sys) > sys.power_budget * (1 + 1e-7))
        return false;
      for (const Vec2& o : s_.world.obstacles)
        if ((b(x, n) - o).norm() < sys.obstacle_radius * (1 - 1e-7)) return false;
    }
    return true;
  }

  conic::ConicProgram build(const VectorXd& x0) const {
    const auto& sys = s_.system;
    const double dt = sys.slot_duration;
    const double h = sys.altitude;
    Model m;
    for (int i = 0; i < primary_; ++i) m.add_var(x0[i]);
    auto start_at = [&](int i, double fallback) { return i < x0.size() ? x0[i] : fallback; };
    auto fresh = [&](double v) { return m.add_var(start_at(m.size(), v)); };
    auto qa = [&](int n, int c) -> Affine {
      if (follower_) return Affine(p_.uav_path[n][c]);
      if (n == 0) return Affine(p_.uav_from[c]);
      if (n == N_) return Affine(p_.uav_to[c]);
      return m.var(q_ + 2 * (n - 1) + c);
    };
    auto ba = [&](int n, int c) -> Affine {
      if (n == 0) return Affine(p_.usv_from[c]);
      if (n == N_) return Affine(p_.usv_to[c]);
      return m.var(b_ + 2 * (n - 1) + c);
    };
    const double cp = 0.5 * sys.fuselage_drag_ratio * sys.air_density * sys.rotor_solidity * sys.disc_area;

    for (int n = 1; n <= N_; ++n) {
      if (!follower_) {
        const Affine sp = m.var(s_idx_ + n - 1);
        const Affine xi = m.var(xi_ + n - 1);
        const Affine dx = (qa(n, 0) - qa(n - 1, 0)) * (1.0 / dt);
        const Affine dy = (qa(n, 1) - qa(n - 1, 1)) * (1.0 / dt);
        m.add_soc({dx, dy}, sp);
        m.add_le(sp, Affine(sys.uav_max_speed));
        const int sq = m.square_over(sp, Affine(1.0), start_at(m.size(), 0.0));
        const int cube = m.cube_over_square(sp, Affine(1.0), start_at(m.size() + 1, 0.0));
        m.add_objective(dt * (Affine(sys.blade_profile_power) +
                              3.0 * sys.blade_profile_power / (sys.tip_speed * sys.tip_speed) * m.var(sq) +
                              cp * m.var(cube) + sys.induced_power * xi));
        // 1/xi^2 <= xi^2 + v^2/v0^2 with the right side linearised at x0.
        const Vec2 v0 = (q(x0, n) - q(x0, n - 1)) / dt;
        const double xi0 = std::max(x0[xi_ + n - 1], 1e-6);
        const InducedTangent tan = induced_tangent(xi0, v0, sys);
        const Affine lin = tan.value + tan.d_xi * (xi - xi0) + tan.d_v.x() * (dx - v0.x()) +
                           tan.d_v.y() * (dy - v0.y());
        const int y = fresh(1.0 / xi0);
        m.add_rotated({Affine(1.0)}, m.var(y), xi);
        m.add_rotated({m.var(y)}, lin, Affine(1.0));
        if (p_.uav_only) continue;
      }

      const Affine bx = (ba(n, 0) - ba(n - 1, 0)) * (1.0 / dt);
      const Affine by = (ba(n, 1) - ba(n - 1, 1)) * (1.0 / dt);
      m.add_soc({bx, by}, Affine(sys.usv_max_speed));
      const Vec2 w = current_at(s_.current, b(x0, n));
      const int u = fresh((b(x0, n) - b(x0, n - 1)).squaredNorm() / (dt * dt));
      m.add_rotated({bx - w.x(), by - w.y()}, m.var(u), Affine(1.0));
      m.add_objective(sys.usv_drag * dt * m.var(u));

      // (|q - b|^2 + H^2)^2 <= K p_c, in units of H.
      const Affine pc = m.var(pc_ + n - 1);
      const double r0 = std::pow(distance(x0, n) / h, 2);
      const int r = fresh(r0);
      m.add_rotated({(qa(n, 0) - ba(n, 0)) * (1.0 / h), (qa(n, 1) - ba(n, 1)) * (1.0 / h), Affine(1.0)},
                    m.var(r), Affine(1.0));
      m.add_rotated({m.var(r)}, rate_k_ * pc, Affine(1.0));
      m.add_le(pc, Affine(sys.power_budget));
      m.add_objective(dt * pc);
      if (n < N_)
        for (const Vec2& o : s_.world.obstacles) {
          const Vec2 d0 = b(x0, n) - o;
          const double len = std::max(d0.norm(), 1e-9);
          m.add_nonneg((d0.x() / len) * (ba(n, 0) - o.x()) + (d0.y() / len) * (ba(n, 1) - o.y()) -
                       sys.obstacle_radius);
        }
    }
    return m.program();
  }

 private:
  const StageProblem& p_;
  const Scenario& s_;
  int N_;
  bool follower_;
  std::vector<Vec2> usv0_;
  double rate_k_ = 0.0;
  int q_ = 0, b_ = 0, pc_ = 0, s_idx_ = 0, xi_ = 0, primary_ = 0;
};

}  // namespace

StageSolution optimize_flying(const StageProblem& p, const Scenario& s, const conic::ScaOptions& opts) {
  const auto& sys = s.system;
  StageSolution sol;
  sol.uav.push_back(p.uav_from);
  sol.usv.push_back(p.usv_from);
  sol.beams.emplace_back();
  if (p.slots == 0) {
    if ((p.uav_to - p.uav_from).norm() > 1e-6 || (p.usv_to - p.usv_from).norm() > 1e-6)
      throw StageError(p.stage, "zero-slot leg with distinct end points");
    return sol;
  }
  const FlyingProblem fp(p, s);
  conic::ScaProblem prob;
  prob.build = [&](const VectorXd& x) { return fp.build(x); };
  prob.objective = [&](const VectorXd& x) { return fp.objective(x.head(fp.primary())); };
  prob.feasible = [&](const VectorXd& x) { return fp.feasible(x.head(fp.primary())); };
  VectorXd init = fp.initial();
  const int full = fp.build(init).num_vars;
  init.conservativeResize(full);
  init.tail(full - fp.primary()).setZero();

  conic::ScaState st;
  try {
    st = conic::sca_loop(prob, init, opts);
  } catch (const conic::ScaError& e) {
    throw StageError(p.stage, std::string("flying surrogate infeasible: ") + e.what());
  }
  const VectorXd x = st.iterate.head(fp.primary());
  if (!fp.feasible(x)) throw StageError(p.stage, "flying trajectory violates an exact constraint");
  sol.history = st.history;
  sol.iterations = st.iterations;
  sol.penalty_used = st.penalty_used;
  const double dt = sys.slot_duration;
  for (int n = 1; n <= p.slots; ++n) {
    const Vec3 q = lift(fp.q(x, n), sys.altitude);
    const Vec2 b = p.uav_only ? fp.q(x, n) : fp.b(x, n);
    sol.uav.push_back(q);
    sol.usv.push_back(b);
    SlotBeams beams;
    if (!p.uav_only) {
      const double power = comm_power_for_rate((q - lift(b, 0.0)).norm(), s.requirements.rate_fly, sys);
      beams.w = mrt_beamformer(q, lift(b, 0.0), power, sys);
      sol.transmit_energy += dt * beams.comm_power();
      sol.usv_energy += usv_slot_energy(sol.usv[n - 1], b, s.current, sys);
    }
    sol.beams.push_back(beams);
    sol.uav_energy += dt * uav_power_flying((q - sol.uav[n - 1]).norm() / dt, sys);
  }
  if (p.uav_only) sol.usv.assign(sol.uav.size(), Vec2::Zero());
  return sol;
}

}  // namespace airsea
