#include <airsea/channel.hpp>
#include <airsea/hover.hpp>
#include <airsea/lp.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace airsea {

int initial_cluster_count(int K, int Z) {
  if (K < 1 || Z < 1) throw std::invalid_argument("initial_cluster_count: K and Z must be >= 1");
  return (K + Z - 1) / Z;
}

double sensing_radius(int size, const Scenario& s) {
  const double ds = sensing_distance_threshold(s.requirements.inst_snr,
                                               s.system.sensing_power / std::max(size, 1), s.system);
  const double h = s.system.altitude;
  return ds > h ? std::sqrt(ds * ds - h * h) : 0.0;
}

namespace {

int nearest(const Vec2& p, const std::vector<Vec2>& centers) {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double d = (p - centers[i]).squaredNorm();
    if (d < bd) {
      bd = d;
      best = int(i);
    }
  }
  return best;
}

std::vector<Vec2> farthest_point_seeds(const std::vector<Vec2>& pts, int E, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec2> centers{pts[rng() % pts.size()]};
  while (int(centers.size()) < E) {
    int pick = 0;
    double far = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = (pts[i] - centers[nearest(pts[i], centers)]).squaredNorm();
      if (d > far) {
        far = d;
        pick = int(i);
      }
    }
    centers.push_back(pts[pick]);
  }
  return centers;
}

void recompute_centroids(const std::vector<Vec2>& pts, ClusterAssignment& a) {
  for (int i = 0; i < a.E; ++i) {
    if (a.clusters[i].empty()) continue;
    Vec2 c = Vec2::Zero();
    for (int k : a.clusters[i]) c += pts[k];
    a.centroids[i] = c / double(a.clusters[i].size());
  }
}

ClusterAssignment lloyd(const std::vector<Vec2>& pts, int E, std::uint64_t seed) {
  ClusterAssignment a;
  a.E = E;
  a.centroids = farthest_point_seeds(pts, E, seed);
  a.cluster_of.assign(pts.size(), -1);
  for (int it = 0; it < 100; ++it) {
    bool changed = false;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const int c = nearest(pts[k], a.centroids);
      if (c != a.cluster_of[k]) {
        a.cluster_of[k] = c;
        changed = true;
      }
    }
    a.clusters.assign(E, {});
    for (std::size_t k = 0; k < pts.size(); ++k) a.clusters[a.cluster_of[k]].push_back(int(k));
    recompute_centroids(pts, a);
    if (!changed) break;
  }
  return a;
}

// Moves the targets farthest from an over-full centroid to the nearest
// centroid with spare capacity, lower index first on ties.
void redistribute(const std::vector<Vec2>& pts, ClusterAssignment& a, int Z) {
  for (int i = 0; i < a.E; ++i) {
    auto& S = a.clusters[i];
    if (int(S.size()) <= Z) continue;
    std::stable_sort(S.begin(), S.end(), [&](int x, int y) {
      return (pts[x] - a.centroids[i]).squaredNorm() > (pts[y] - a.centroids[i]).squaredNorm();
    });
    while (int(S.size()) > Z) {
      const int k = S.front();
      S.erase(S.begin());
      int dest = -1;
      double bd = std::numeric_limits<double>::infinity();
      for (int j = 0; j < a.E; ++j) {
        if (j == i || int(a.clusters[j].size()) >= Z) continue;
        const double d = (pts[k] - a.centroids[j]).squaredNorm();
        if (d < bd) {
          bd = d;
          dest = j;
        }
      }
      a.clusters[dest].push_back(k);
      a.cluster_of[k] = dest;
    }
  }
  recompute_centroids(pts, a);
}

void drop_empty(ClusterAssignment& a) {
  ClusterAssignment out;
  out.cluster_of.assign(a.cluster_of.size(), -1);
  for (int i = 0; i < a.E; ++i) {
    if (a.clusters[i].empty()) continue;
    for (int k : a.clusters[i]) out.cluster_of[k] = int(out.clusters.size());
    std::sort(a.clusters[i].begin(), a.clusters[i].end());
    out.clusters.push_back(a.clusters[i]);
    out.centroids.push_back(a.centroids[i]);
  }
  out.E = int(out.clusters.size());
  a = std::move(out);
}

bool covered(const std::vector<Vec2>& pts, const ClusterAssignment& a, const CoverageRadius& radius) {
  for (int i = 0; i < a.E; ++i) {
    const double r = radius(int(a.clusters[i].size()));
    for (int k : a.clusters[i])
      if ((pts[k] - a.centroids[i]).norm() > r + 1e-9) return false;
  }
  return true;
}

}  // namespace

ClusterAssignment vbsc_cluster(const std::vector<Vec2>& targets, const CoverageRadius& radius, int Z,
                               std::uint64_t seed) {
  const int K = int(targets.size());
  if (K < 1) throw std::invalid_argument("vbsc_cluster: no targets");
  for (int E = initial_cluster_count(K, Z); E <= K; ++E) {
    ClusterAssignment a = lloyd(targets, E, seed);
    redistribute(targets, a, Z);
    drop_empty(a);
    if (covered(targets, a, radius)) return a;
  }
  // One cluster per target always satisfies coverage and capacity.
  ClusterAssignment a;
  a.E = K;
  for (int k = 0; k < K; ++k) {
    a.clusters.push_back({k});
    a.centroids.push_back(targets[k]);
    a.cluster_of.push_back(k);
  }
  return a;
}

ClusterAssignment vbsc_cluster(const std::vector<Vec2>& targets, double radius, int Z, std::uint64_t seed) {
  return vbsc_cluster(targets, [radius](int) { return radius; }, Z, seed);
}

double bi_tspn_cost(const Vec2& uav_from, const Vec2& uav_to, const Vec2& usv_from, const Vec2& usv_to,
                    const CurrentField& field, double v_uav, double v_usv, const SystemParams& sys) {
  if (!(v_uav > 0.0) || !(v_usv > 0.0)) throw std::invalid_argument("bi_tspn_cost: speeds must be positive");
  double cost = 0.0;
  const double du = (uav_to - uav_from).norm();
  cost += du / v_uav * uav_power_flying(v_uav, sys);
  const double d = (usv_to - usv_from).norm();
  if (d > 0.0) {
    const int nd = std::max(1, int(std::ceil(d / sys.current_resolution - 1e-12)));
    const Vec2 dir = (usv_to - usv_from) / d;
    const Vec2 vel = v_usv * dir;
    for (int k = 0; k < nd; ++k) {
      const Vec2 bk = usv_from + (double(k) / nd) * (usv_to - usv_from);
      cost += d * sys.usv_drag / (nd * v_usv) * (vel - current_at(field, bk)).squaredNorm();
    }
  }
  return cost;
}

double bi_tspn_cost(const Vec2& ci, const Vec2& cj, const CurrentField& field, double v_uav, double v_usv,
                    const SystemParams& sys) {
  return bi_tspn_cost(ci, cj, ci, cj, field, v_uav, v_usv, sys);
}

double max_range_speed(const SystemParams& sys) {
  auto f = [&](double v) { return uav_power_flying(v, sys) / v; };
  double lo = 0.5, hi = sys.uav_max_speed;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int i = 0; i < 100; ++i) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = f(b);
    }
  }
  return 0.5 * (lo + hi);
}

CostMatrix build_cost_matrix(const ClusterAssignment& a, const Scenario& s, bool uav_only) {
  const int E = a.E;
  std::vector<Vec2> uav(E + 2), usv(E + 2);
  uav[0] = s.world.uav_start;
  usv[0] = s.world.usv_start;
  for (int i = 0; i < E; ++i) uav[i + 1] = usv[i + 1] = a.centroids[i];
  uav[E + 1] = s.world.uav_end;
  usv[E + 1] = s.world.usv_end;
  const double vu = max_range_speed(s.system);
  const double vs = s.system.usv_max_speed;
  CostMatrix m;
  m.cost = Eigen::MatrixXd::Zero(E + 2, E + 2);
  for (int i = 0; i < E + 2; ++i)
    for (int j = 0; j < E + 2; ++j) {
      if (i == j) continue;
      if (uav_only)
        m.cost(i, j) = (uav[j] - uav[i]).norm() / vu * uav_power_flying(vu, s.system);
      else
        m.cost(i, j) = bi_tspn_cost(uav[i], uav[j], usv[i], usv[j], s.current, vu, vs, s.system);
    }
  return m;
}

namespace {

VisitOrder held_karp(const Eigen::MatrixXd& c) {
  const int E = int(c.rows()) - 2;
  VisitOrder out;
  if (E == 0) {
    out.path = {0, 1};
    out.cost = c(0, 1);
    return out;
  }
  const int full = (1 << E) - 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(std::size_t(1 << E) * E, inf);
  std::vector<int> parent(std::size_t(1 << E) * E, -1);
  auto at = [E](int mask, int j) { return std::size_t(mask) * E + j; };
  for (int j = 0; j < E; ++j) dp[at(1 << j, j)] = c(0, j + 1);
  for (int mask = 1; mask <= full; ++mask)
    for (int j = 0; j < E; ++j) {
      if (!(mask & (1 << j))) continue;
      const double base = dp[at(mask, j)];
      if (base == inf) continue;
      for (int k = 0; k < E; ++k) {
        if (mask & (1 << k)) continue;
        const int next = mask | (1 << k);
        const double v = base + c(j + 1, k + 1);
        if (v < dp[at(next, k)]) {
          dp[at(next, k)] = v;
          parent[at(next, k)] = j;
        }
      }
    }
  double best = inf;
  int last = -1;
  for (int j = 0; j < E; ++j) {
    const double v = dp[at(full, j)] + c(j + 1, E + 1);
    if (v < best) {
      best = v;
      last = j;
    }
  }
  std::vector<int> rev;
  int mask = full;
  for (int j = last; j >= 0;) {
    rev.push_back(j + 1);
    const int p = parent[at(mask, j)];
    mask &= ~(1 << j);
    j = p;
  }
  out.path.push_back(0);
  out.path.insert(out.path.end(), rev.rbegin(), rev.rend());
  out.path.push_back(E + 1);
  out.cost = best;
  return out;
}

// Path MILP with Miller-Tucker-Zemlin ordering, solved by depth-first
// branch and bound over LP relaxations.
class MtzBranchAndBound {
 public:
  explicit MtzBranchAndBound(const Eigen::MatrixXd& c) : c_(c), E_(int(c.rows()) - 2) { build(); }

  VisitOrder solve() {
    incumbent_ = greedy();
    std::vector<int> fixed(arcs_.size(), -1);
    branch(fixed);
    VisitOrder out;
    out.path = best_path_;
    out.cost = incumbent_;
    out.nodes_explored = nodes_;
    out.mtz.assign(E_, 0.0);
    for (std::size_t p = 1; p + 1 < best_path_.size(); ++p) out.mtz[best_path_[p] - 1] = double(p);
    return out;
  }

 private:
  struct Arc {
    int i, j;
  };

  void build() {
    for (int i = 0; i <= E_; ++i)
      for (int j = 1; j <= E_ + 1; ++j) {
        if (i == j || (i == 0 && j == E_ + 1 && E_ > 0)) continue;
        arc_index_[{i, j}] = int(arcs_.size());
        arcs_.push_back({i, j});
      }
    const int na = int(arcs_.size());
    // Equality rows are pushed as-is; `<=` rows get a slack column.
    struct Row {
      std::vector<std::pair<int, double>> coef;
      double rhs;
      bool slack;
    };
    std::vector<Row> rows;
    for (int i = 0; i <= E_; ++i) {
      Row r{{}, 1.0, false};
      for (int a = 0; a < na; ++a)
        if (arcs_[a].i == i) r.coef.push_back({a, 1.0});
      rows.push_back(r);
    }
    for (int j = 1; j <= E_ + 1; ++j) {
      Row r{{}, 1.0, false};
      for (int a = 0; a < na; ++a)
        if (arcs_[a].j == j) r.coef.push_back({a, 1.0});
      rows.push_back(r);
    }
    auto u = [&](int i) { return na + i - 1; };  // shifted order u' = u - 1 in [0, E-1]
    auto arc = [&](int i, int j) { return arc_index_.at({i, j}); };
    // Lifted MTZ: u_i - u_j + E x_ij + (E-2) x_ji <= E - 1.
    for (int i = 1; i <= E_; ++i)
      for (int j = 1; j <= E_; ++j) {
        if (i == j) continue;
        rows.push_back({{{u(i), 1.0}, {u(j), -1.0}, {arc(i, j), double(E_)}, {arc(j, i), double(E_ - 2)}},
                        double(E_ - 1),
                        true});
      }
    for (int i = 1; i <= E_; ++i) {
      if (E_ == 1) {
        rows.push_back({{{u(i), 1.0}}, 0.0, true});
        continue;
      }
      // First after s sits at 0, last before t at E-1, all others strictly between.
      rows.push_back({{{u(i), 1.0}, {arc(0, i), double(E_ - 2)}, {arc(i, E_ + 1), -1.0}}, double(E_ - 2), true});
      rows.push_back({{{u(i), -1.0}, {arc(0, i), -1.0}, {arc(i, E_ + 1), double(E_ - 2)}}, -1.0, true});
    }
    int slacks = 0;
    for (const auto& r : rows) slacks += r.slack;
    cols_ = na + E_ + slacks;
    A_ = Eigen::MatrixXd::Zero(int(rows.size()), cols_);
    b_ = Eigen::VectorXd::Zero(int(rows.size()));
    cost_ = Eigen::VectorXd::Zero(cols_);
    for (int a = 0; a < na; ++a) cost_[a] = c_(arcs_[a].i, arcs_[a].j);
    int slack = na + E_;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      for (const auto& [col, v] : rows[k].coef) A_(int(k), col) += v;
      if (rows[k].slack) A_(int(k), slack++) = 1.0;
      b_[int(k)] = rows[k].rhs;
    }
  }

  double path_cost(const std::vector<int>& path) const {
    double v = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) v += c_(path[k], path[k + 1]);
    return v;
  }

  double greedy() {
    std::vector<int> path{0};
    std::vector<bool> used(E_ + 2, false);
    used[0] = true;
    for (int step = 0; step < E_; ++step) {
      int best = -1;
      for (int j = 1; j <= E_; ++j)
        if (!used[j] && (best < 0 || c_(path.back(), j) < c_(path.back(), best))) best = j;
      used[best] = true;
      path.push_back(best);
    }
    path.push_back(E_ + 1);
    best_path_ = path;
    return path_cost(path);
  }

  void branch(std::vector<int>& fixed) {
    if (++nodes_ > 500000) throw OrderError("branch and bound node limit exceeded");
    std::vector<int> keep;
    Eigen::VectorXd rhs = b_;
    double fixed_cost = 0.0;
    const int na = int(arcs_.size());
    for (int a = 0; a < na; ++a) {
      if (fixed[a] == 1) {
        rhs -= A_.col(a);
        fixed_cost += cost_[a];
      } else if (fixed[a] == -1) {
        keep.push_back(a);
      }
    }
    for (int k = na; k < cols_; ++k) keep.push_back(k);
    Eigen::MatrixXd A(A_.rows(), keep.size());
    Eigen::VectorXd c(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
      A.col(k) = A_.col(keep[k]);
      c[k] = cost_[keep[k]];
    }
    const LpResult lp = solve_lp(A, rhs, c);
    if (lp.status != LpStatus::optimal) return;
    const double bound = lp.value + fixed_cost;
    if (bound >= incumbent_ - 1e-9 * (1.0 + std::abs(incumbent_))) return;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(na);
    for (int a = 0; a < na; ++a)
      if (fixed[a] == 1) x[a] = 1.0;
    for (std::size_t k = 0; k < keep.size(); ++k)
      if (keep[k] < na) x[keep[k]] = lp.x[k];

    int pick = -1;
    double frac = 1e-6;
    for (int a = 0; a < na; ++a) {
      const double f = std::min(x[a], 1.0 - x[a]);
      if (f > frac) {
        frac = f;
        pick = a;
      }
    }
    if (pick < 0) {
      accept(x, bound);
      return;
    }
    fixed[pick] = 1;
    branch(fixed);
    fixed[pick] = 0;
    branch(fixed);
    fixed[pick] = -1;
  }

  void accept(const Eigen::VectorXd& x, double value) {
    std::vector<int> next(E_ + 2, -1);
    for (std::size_t a = 0; a < arcs_.size(); ++a)
      if (x[a] > 0.5) next[arcs_[a].i] = arcs_[a].j;
    std::vector<int> path{0};
    while (path.back() != E_ + 1 && int(path.size()) <= E_ + 2) {
      const int nx = next[path.back()];
      if (nx < 0) return;
      path.push_back(nx);
    }
    if (int(path.size()) != E_ + 2) return;
    incumbent_ = std::min(value, path_cost(path));
    best_path_ = path;
  }

  const Eigen::MatrixXd& c_;
  int E_;
  std::vector<Arc> arcs_;
  std::map<std::pair<int, int>, int> arc_index_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_, cost_;
  int cols_ = 0;
  double incumbent_ = 0.0;
  std::vector<int> best_path_;
  int nodes_ = 0;
};

}  // namespace

VisitOrder solve_visit_order(const CostMatrix& costs, OrderMethod method) {
  const int E = costs.centroids();
  if (E < 0) throw OrderError("cost matrix needs start and end nodes");
  if (method == OrderMethod::exact_dp) {
    if (E + 2 > 20) throw OrderError("exact-dp supports at most 20 nodes");
    VisitOrder out = held_karp(costs.cost);
    out.mtz.assign(E, 0.0);
    for (std::size_t p = 1; p + 1 < out.path.size(); ++p) out.mtz[out.path[p] - 1] = double(p);
    return out;
  }
  if (E == 0) return held_karp(costs.cost);
  return MtzBranchAndBound(costs.cost).solve();
}

}  // namespace airsea
