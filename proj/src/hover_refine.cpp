#include <airsea/channel.hpp>
#include <airsea/conic/model.hpp>
#include <airsea/hover.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace airsea {

using conic::Affine;
using conic::Model;
using conic::VectorXd;

int HoverPlan::m(int e) const {
  int slot = 0;
  for (int j = 0; j < e - 1; ++j) slot += fly_slots[j] + hover_slots[j];
  return slot + fly_slots[e - 1];
}

int HoverPlan::n(int e) const { return m(e) + hover_slots[e - 1]; }

int HoverPlan::total_slots() const {
  int slots = 0;
  for (int s : fly_slots) slots += s;
  for (int s : hover_slots) slots += s;
  return slots;
}

namespace {

struct SegmentCurrent {
  Vec2 mean = Vec2::Zero();
  double mean_sq = 0.0;
};

// Current sampled at the N_d segment start points between a and b.
SegmentCurrent sample_current(const Vec2& a, const Vec2& b, const Scenario& s) {
  const double len = (b - a).norm();
  const int nd = std::max(1, int(std::ceil(len / s.system.current_resolution - 1e-12)));
  SegmentCurrent out;
  for (int k = 0; k < nd; ++k) {
    const Vec2 w = current_at(s.current, a + (double(k) / nd) * (b - a));
    out.mean += w / nd;
    out.mean_sq += w.squaredNorm() / nd;
  }
  return out;
}

double usv_leg_energy(const Vec2& a, const Vec2& b, double t, const Scenario& s) {
  const Vec2 d = b - a;
  const SegmentCurrent c = sample_current(a, b, s);
  if (t <= 1e-12) return d.norm() > 1e-9 ? std::numeric_limits<double>::infinity() : 0.0;
  return s.system.usv_drag * (d.squaredNorm() / t - 2.0 * d.dot(c.mean) + t * c.mean_sq);
}

double uav_leg_energy(double dist, double t, const SystemParams& sys) {
  if (t <= 1e-12) return dist > 1e-9 ? std::numeric_limits<double>::infinity() : 0.0;
  return t * uav_power_flying(dist / t, sys);
}

// Index layout of the primary refinement variables; auxiliary epigraph variables follow.
class RefineProblem {
 public:
  RefineProblem(const ClusterAssignment& a, const VisitOrder& order, const Scenario& s, const RefineOptions& opts)
      : s_(s), opts_(opts), E_(a.E) {
    for (std::size_t p = 1; p + 1 < order.path.size(); ++p) {
      const int c = order.path[p] - 1;
      centroid_.push_back(a.centroids[c]);
      members_.push_back(a.clusters[c]);
    }
    if (int(centroid_.size()) != E_) throw PlanError("visit order does not cover every cluster");
    int next = 0;
    if (!opts.fix_hover) q_ = next, next += 2 * E_;
    if (!opts.uav_only) {
      bf_ = next, next += 2 * E_;
      bh_ = next, next += 2 * E_;
    }
    th_ = next, next += E_;
    tf_ = next, next += E_ + 1;
    psi_ = next, next += E_ + 1;
    primary_ = next;

    const auto& sys = s.system;
    for (int e = 0; e < E_; ++e) {
      const double p = sys.sensing_power / double(members_[e].size());
      ds_.push_back(sensing_distance_threshold(s.requirements.inst_snr, p, sys));
      if (ds_.back() <= sys.altitude)
        throw PlanError("sensing distance threshold does not exceed the altitude");
      // gamma_k = snr_coef / d^4
      snr_coef_.push_back(mrt_sensing_snr(1.0, p, sys));
    }
    dc_ = comm_distance_threshold(s.requirements.rate_hover, sys.comm_power, sys);
    if (!opts.uav_only && dc_ <= sys.altitude)
      throw PlanError("communication distance threshold does not exceed the altitude");
  }

  int primary() const { return primary_; }

  Vec2 q(const VectorXd& x, int e) const {
    return opts_.fix_hover ? centroid_[e] : Vec2(x[q_ + 2 * e], x[q_ + 2 * e + 1]);
  }
  Vec2 bf(const VectorXd& x, int e) const { return Vec2(x[bf_ + 2 * e], x[bf_ + 2 * e + 1]); }
  Vec2 bh(const VectorXd& x, int e) const { return Vec2(x[bh_ + 2 * e], x[bh_ + 2 * e + 1]); }
  double th(const VectorXd& x, int e) const { return x[th_ + e]; }
  double tf(const VectorXd& x, int l) const { return x[tf_ + l]; }

  Vec2 uav_from(const VectorXd& x, int l) const { return l == 0 ? s_.world.uav_start : q(x, l - 1); }
  Vec2 uav_to(const VectorXd& x, int l) const { return l == E_ ? s_.world.uav_end : q(x, l); }
  Vec2 usv_from(const VectorXd& x, int l) const { return l == 0 ? s_.world.usv_start : bh(x, l - 1); }
  Vec2 usv_to(const VectorXd& x, int l) const { return l == E_ ? s_.world.usv_end : bf(x, l); }

  /// Time the hover at q must last for every member to reach the total SNR.
  double required_hover(const Vec2& qe, int e) const {
    double need = 0.0;
    const double h2 = s_.system.altitude * s_.system.altitude;
    for (int k : members_[e]) {
      const double d2 = (qe - s_.world.targets[k]).squaredNorm() + h2;
      need = std::max(need, s_.system.slot_duration * s_.requirements.total_snr * d2 * d2 / snr_coef_[e]);
    }
    return need;
  }

  VectorXd initial() const {
    VectorXd x = VectorXd::Zero(primary_);
    const double vu = max_range_speed(s_.system);
    const double vs = s_.system.usv_max_speed;
    for (int e = 0; e < E_; ++e) {
      if (!opts_.fix_hover) x.segment<2>(q_ + 2 * e) = centroid_[e];
      if (!opts_.uav_only) {
        x.segment<2>(bf_ + 2 * e) = centroid_[e];
        x.segment<2>(bh_ + 2 * e) = centroid_[e];
      }
      x[th_ + e] = 1.05 * required_hover(centroid_[e], e) + 1e-3;
    }
    for (int l = 0; l <= E_; ++l) {
      double t = (uav_to(x, l) - uav_from(x, l)).norm() / vu;
      if (!opts_.uav_only) t = std::max(t, (usv_to(x, l) - usv_from(x, l)).norm() / vs);
      t = std::max(t, 1e-2);
      x[tf_ + l] = t;
      x[psi_ + l] = t * xi_from_speed((uav_to(x, l) - uav_from(x, l)).norm() / t, s_.system);
    }
    return x;
  }

  double objective(const VectorXd& x) const {
    const auto& sys = s_.system;
    double total = 0.0;
    for (int l = 0; l <= E_; ++l) {
      total += uav_leg_energy((uav_to(x, l) - uav_from(x, l)).norm(), tf(x, l), sys);
      if (!opts_.uav_only) total += usv_leg_energy(usv_from(x, l), usv_to(x, l), tf(x, l), s_);
    }
    for (int e = 0; e < E_; ++e) {
      total += sys.hover_power() * th(x, e);
      if (!opts_.uav_only) total += usv_leg_energy(bf(x, e), bh(x, e), th(x, e), s_);
    }
    return total;
  }

  conic::ConicProgram build(const VectorXd& x0) const {
    const auto& sys = s_.system;
    Model m;
    for (int i = 0; i < primary_; ++i) m.add_var(i < x0.size() ? x0[i] : 0.0);
    // Auxiliary variables take their start from x0 when it already has them,
    // so the layout repeats on every rebuild.
    auto start_at = [&](int i, double fallback) { return i < x0.size() ? x0[i] : fallback; };
    auto fresh = [&](double v) { return m.add_var(start_at(m.size(), v)); };
    auto qa = [&](int e, int c) -> Affine {
      return opts_.fix_hover ? Affine(centroid_[e][c]) : m.var(q_ + 2 * e + c);
    };
    auto pt = [&](int base, int e, int c) -> Affine { return m.var(base + 2 * e + c); };
    auto uav_end = [&](int l, bool to, int c) -> Affine {
      if (!to && l == 0) return Affine(s_.world.uav_start[c]);
      if (to && l == E_) return Affine(s_.world.uav_end[c]);
      return qa(to ? l : l - 1, c);
    };
    auto usv_end = [&](int l, bool to, int c) -> Affine {
      if (!to && l == 0) return Affine(s_.world.usv_start[c]);
      if (to && l == E_) return Affine(s_.world.usv_end[c]);
      return to ? pt(bf_, l, c) : pt(bh_, l - 1, c);
    };
    auto gadget_square = [&](const Affine& xv, const Affine& y) {
      return m.square_over(xv, y, start_at(m.size(), 0.0));
    };
    auto gadget_cube = [&](const Affine& xv, const Affine& y) {
      return m.cube_over_square(xv, y, start_at(m.size() + 1, 0.0));
    };
    auto usv_leg = [&](const Affine& ax, const Affine& ay, const Affine& bx, const Affine& by,
                       const Affine& t, const Vec2& a0, const Vec2& b0) {
      const SegmentCurrent c = sample_current(a0, b0, s_);
      const Affine dx = bx - ax, dy = by - ay;
      const int e = fresh((b0 - a0).squaredNorm() / std::max(t.eval(x0), 1e-6));
      m.add_rotated({dx, dy}, m.var(e), t);
      m.add_objective(sys.usv_drag * (m.var(e) - 2.0 * c.mean.x() * dx - 2.0 * c.mean.y() * dy +
                                      c.mean_sq * t));
      m.add_soc({dx, dy}, sys.usv_max_speed * t);
    };

    const double cp = 0.5 * sys.fuselage_drag_ratio * sys.air_density * sys.rotor_solidity * sys.disc_area;
    const double v0sq = sys.mean_induced_speed * sys.mean_induced_speed;
    for (int l = 0; l <= E_; ++l) {
      const Affine t = m.var(tf_ + l);
      const Affine psi = m.var(psi_ + l);
      const Affine dx = uav_end(l, true, 0) - uav_end(l, false, 0);
      const Affine dy = uav_end(l, true, 1) - uav_end(l, false, 1);
      const Vec2 d0(dx.eval(x0), dy.eval(x0));
      const double t0 = std::max(x0[tf_ + l], 1e-9);
      const int dist = fresh(d0.norm());
      m.add_soc({dx, dy}, m.var(dist));
      m.add_le(m.var(dist), sys.uav_max_speed * t);
      const int sq = gadget_square(m.var(dist), t);
      const int cube = gadget_cube(m.var(dist), t);
      m.add_objective(sys.blade_profile_power * t +
                      3.0 * sys.blade_profile_power / (sys.tip_speed * sys.tip_speed) * m.var(sq) +
                      cp * m.var(cube) + sys.induced_power * psi);
      // psi = t xi with t^4/psi^2 <= psi^2 + D^2/v0^2, right side linearised at
      // the expansion point so that it stays feasible.
      const double psi0 = x0[psi_ + l] > 0.0 ? x0[psi_ + l] : t0 * xi_from_speed(d0.norm() / t0, sys);
      const Affine lin = psi0 * psi0 + 2.0 * psi0 * (psi - psi0) +
                         (d0.squaredNorm() + 2.0 * d0.x() * (dx - d0.x()) + 2.0 * d0.y() * (dy - d0.y())) * (1.0 / v0sq);
      const int z = fresh(t0 * t0 / psi0);
      m.add_rotated({t}, psi, m.var(z));
      m.add_rotated({m.var(z)}, lin, Affine(1.0));
      if (!opts_.uav_only)
        usv_leg(usv_end(l, false, 0), usv_end(l, false, 1), usv_end(l, true, 0), usv_end(l, true, 1), t,
                usv_from(x0, l), usv_to(x0, l));
    }

    const double h = sys.altitude;
    for (int e = 0; e < E_; ++e) {
      const Affine t = m.var(th_ + e);
      m.add_objective(sys.hover_power() * t);
      const double k_snr = snr_coef_[e] / (sys.slot_duration * s_.requirements.total_snr);
      for (int k : members_[e]) {
        const Vec2& tk = s_.world.targets[k];
        const Affine rx = qa(e, 0) - tk.x(), ry = qa(e, 1) - tk.y();
        m.add_soc({rx, ry, Affine(h)}, Affine(ds_[e]));
        const double r2 = (q(x0, e) - tk).squaredNorm() + h * h;
        const int sk = fresh(r2);
        m.add_rotated({rx, ry, Affine(h)}, m.var(sk), Affine(1.0));
        m.add_rotated({m.var(sk)}, k_snr * t, Affine(1.0));
      }
      if (!opts_.uav_only) {
        for (int base : {bf_, bh_})
          m.add_soc({qa(e, 0) - pt(base, e, 0), qa(e, 1) - pt(base, e, 1), Affine(h)}, Affine(dc_));
        usv_leg(pt(bf_, e, 0), pt(bf_, e, 1), pt(bh_, e, 0), pt(bh_, e, 1), t, bf(x0, e), bh(x0, e));
      }
    }
    return m.program();
  }

  HoverPlan extract(const VectorXd& x) const {
    const auto& sys = s_.system;
    HoverPlan p;
    p.E = E_;
    p.targets = members_;
    for (int e = 0; e < E_; ++e) {
      p.hover.push_back(lift(q(x, e), sys.altitude));
      p.usv_arrive.push_back(opts_.uav_only ? q(x, e) : bf(x, e));
      p.usv_depart.push_back(opts_.uav_only ? q(x, e) : bh(x, e));
      // Continuous time never below the exact requirement at the final point.
      p.hover_time.push_back(std::max(th(x, e), required_hover(q(x, e), e)));
    }
    const double dt = sys.slot_duration;
    for (int l = 0; l <= E_; ++l) {
      const double du = (uav_to(x, l) - uav_from(x, l)).norm();
      const double ds = opts_.uav_only ? 0.0 : (usv_to(x, l) - usv_from(x, l)).norm();
      double t = std::max(tf(x, l), 0.0);
      t = std::max({t, du / sys.uav_max_speed, opts_.uav_only ? 0.0 : ds / sys.usv_max_speed});
      p.fly_time.push_back(t);
      const int slots = (du <= 1e-6 && ds <= 1e-6) ? 0 : std::max(1, int(std::ceil(t / dt - 1e-9)));
      p.fly_slots.push_back(slots);
      p.uav_speed.push_back(slots ? du / (slots * dt) : 0.0);
      p.usv_fly_speed.push_back(slots ? ds / (slots * dt) : 0.0);
    }
    for (int e = 0; e < E_; ++e) {
      const int slots = std::max(1, int(std::ceil(p.hover_time[e] / dt - 1e-9)));
      p.hover_slots.push_back(slots);
      p.usv_hover_speed.push_back((p.usv_depart[e] - p.usv_arrive[e]).norm() / (slots * dt));
    }
    std::vector<StageSegment> segs;
    for (int l = 0; l <= E_; ++l) {
      StageSegment seg;
      seg.fly_time = p.fly_slots[l] * dt;
      seg.uav_speed = p.uav_speed[l];
      if (!opts_.uav_only && p.fly_slots[l]) {
        seg.usv_fly_velocity = (usv_to(x, l) - usv_from(x, l)) / seg.fly_time;
        seg.fly_current = sample_current(usv_from(x, l), usv_to(x, l), s_).mean;
      }
      if (l < E_) {
        seg.hover_time = p.hover_slots[l] * dt;
        if (!opts_.uav_only) {
          seg.usv_hover_velocity = (p.usv_depart[l] - p.usv_arrive[l]) / seg.hover_time;
          seg.hover_current = sample_current(p.usv_arrive[l], p.usv_depart[l], s_).mean;
        }
      }
      segs.push_back(seg);
    }
    p.estimate = stage_energy_estimate(segs, sys);
    return p;
  }

 private:
  const Scenario& s_;
  RefineOptions opts_;
  int E_;
  std::vector<Vec2> centroid_;
  std::vector<std::vector<int>> members_;
  std::vector<double> ds_, snr_coef_;
  double dc_ = 0.0;
  int q_ = -1, bf_ = -1, bh_ = -1, th_ = -1, tf_ = -1, psi_ = -1, primary_ = 0;
};

}  // namespace

HoverPlan refine_hover_plan(const ClusterAssignment& a, const VisitOrder& order, const Scenario& s,
                            const RefineOptions& opts) {
  const RefineProblem rp(a, order, s, opts);
  conic::ScaProblem prob;
  prob.build = [&](const VectorXd& x) { return rp.build(x); };
  prob.objective = [&](const VectorXd& x) { return rp.objective(x.head(rp.primary())); };

  VectorXd init = rp.initial();
  const int full = rp.build(init).num_vars;
  init.conservativeResize(full);
  init.tail(full - rp.primary()).setZero();

  conic::ScaState st;
  try {
    st = conic::sca_loop(prob, init, opts.sca);
  } catch (const conic::ScaError& e) {
    throw PlanError(std::string("hover refinement infeasible: ") + e.what());
  }
  HoverPlan plan = rp.extract(st.iterate.head(rp.primary()));
  plan.history = st.history;
  plan.penalty_used = st.penalty_used;
  const std::string bad = check_hover_plan(plan, s, opts.uav_only);
  if (!bad.empty()) throw PlanError("hover refinement infeasible: " + bad);
  return plan;
}

std::string check_hover_plan(const HoverPlan& plan, const Scenario& s, bool uav_only) {
  const auto& sys = s.system;
  const int K = int(s.world.targets.size());
  std::vector<int> seen(K, 0);
  std::ostringstream err;
  const double rel = 1e-6;
  for (int e = 0; e < plan.E; ++e) {
    const auto& S = plan.targets[e];
    if (S.empty()) return "hover point without targets";
    if (int(S.size()) > sys.max_simultaneous_targets) {
      err << "hover point " << e << " serves more than Z targets";
      return err.str();
    }
    const double p = sys.sensing_power / double(S.size());
    const double ds = sensing_distance_threshold(s.requirements.inst_snr, p, sys);
    for (int k : S) {
      if (k < 0 || k >= K) return "target index out of range";
      ++seen[k];
      const double d = (plan.hover[e] - lift(s.world.targets[k], 0.0)).norm();
      if (d > ds * (1.0 + rel)) {
        err << "sensing distance violated at hover " << e << " target " << k;
        return err.str();
      }
      const double gamma = mrt_sensing_snr(d, p, sys);
      if (plan.hover_slots[e] * gamma < s.requirements.total_snr * (1.0 - rel)) {
        err << "hover time too short at hover " << e << " target " << k;
        return err.str();
      }
    }
    if (!uav_only) {
      const double dc = comm_distance_threshold(s.requirements.rate_hover, sys.comm_power, sys);
      for (const Vec2& b : {plan.usv_arrive[e], plan.usv_depart[e]})
        if ((plan.hover[e] - lift(b, 0.0)).norm() > dc * (1.0 + rel)) {
          err << "communication distance violated at hover " << e;
          return err.str();
        }
    }
  }
  for (int k = 0; k < K; ++k)
    if (seen[k] != 1) {
      err << "target " << k << " scheduled " << seen[k] << " times";
      return err.str();
    }
  for (std::size_t l = 0; l < plan.uav_speed.size(); ++l) {
    if (plan.uav_speed[l] > sys.uav_max_speed * (1.0 + rel)) return "UAV speed limit violated";
    if (plan.usv_fly_speed[l] > sys.usv_max_speed * (1.0 + rel)) return "USV speed limit violated";
  }
  for (double v : plan.usv_hover_speed)
    if (v > sys.usv_max_speed * (1.0 + rel)) return "USV speed limit violated";
  return "";
}

nlohmann::json to_json(const HoverPlan& plan) {
  using nlohmann::json;
  json hovers = json::array();
  for (int e = 0; e < plan.E; ++e) {
    hovers.push_back({{"q", {plan.hover[e].x(), plan.hover[e].y(), plan.hover[e].z()}},
                      {"usv_arrive", {plan.usv_arrive[e].x(), plan.usv_arrive[e].y()}},
                      {"usv_depart", {plan.usv_depart[e].x(), plan.usv_depart[e].y()}},
                      {"targets", plan.targets[e]},
                      {"hover_time_s", plan.hover_time[e]},
                      {"hover_slots", plan.hover_slots[e]},
                      {"usv_hover_speed_mps", plan.usv_hover_speed[e]},
                      {"m", plan.m(e + 1)},
                      {"n", plan.n(e + 1)}});
  }
  json legs = json::array();
  for (std::size_t l = 0; l < plan.fly_time.size(); ++l)
    legs.push_back({{"fly_time_s", plan.fly_time[l]},
                    {"fly_slots", plan.fly_slots[l]},
                    {"uav_speed_mps", plan.uav_speed[l]},
                    {"usv_speed_mps", plan.usv_fly_speed[l]}});
  return {{"E", plan.E},          {"hover_points", hovers},     {"legs", legs},
          {"total_slots", plan.total_slots()}, {"estimate_J", plan.estimate},
          {"sca_history", plan.history}, {"penalty_used", plan.penalty_used}};
}

}  // namespace airsea
