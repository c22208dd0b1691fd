// Log-barrier path following with a sparse Newton system. Phase I solves an
// auxiliary program in (x, s) that relaxes every constraint by s and stops as
// soon as s < 0.

#include <airsea/conic/program.hpp>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace airsea::conic {

namespace {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

struct Barrier {
  const ConicProgram& p;
  int n;
  VectorXd scratch;           // sparse accumulator values
  std::vector<int> mark;      // generation tags for the accumulator
  std::vector<int> support;
  int generation = 0;

  explicit Barrier(const ConicProgram& prog)
      : p(prog), n(prog.num_vars), scratch(VectorXd::Zero(prog.num_vars)), mark(prog.num_vars, -1) {}

  double value(const VectorXd& x) const {
    double v = 0.0;
    for (const auto& a : p.linear) {
      const double s = a.eval(x);
      if (!(s > 0.0)) return inf();
      v -= std::log(s);
    }
    for (const auto& c : p.socs) {
      const double t = c.bound.eval(x);
      if (!(t > 0.0)) return inf();
      double r2 = 0.0;
      for (const auto& r : c.rows) r2 += std::pow(r.eval(x), 2);
      const double D = t * t - r2;
      if (!(D > 0.0)) return inf();
      v -= std::log(D);
    }
    for (const auto& b : p.psds) {
      Eigen::LLT<MatrixXd> llt(b.eval(x));
      if (llt.info() != Eigen::Success) return inf();
      const auto& L = llt.matrixLLT();
      for (int i = 0; i < L.rows(); ++i) {
        if (!(L(i, i) > 0.0)) return inf();
        v -= 2.0 * std::log(L(i, i));
      }
    }
    return v;
  }

  static double inf() { return std::numeric_limits<double>::infinity(); }

  void begin() {
    ++generation;
    support.clear();
  }
  void add(int i, double c) {
    if (mark[i] != generation) {
      mark[i] = generation;
      scratch[i] = 0.0;
      support.push_back(i);
    }
    scratch[i] += c;
  }

  static void outer(const Affine& a, double w, std::vector<Triplet>& h) {
    for (const auto& [i, ci] : a.terms)
      for (const auto& [j, cj] : a.terms) h.emplace_back(i, j, w * ci * cj);
  }

  // Gradient and Hessian of the barrier; x must be in the domain.
  void derivatives(const VectorXd& x, VectorXd& grad, std::vector<Triplet>& hess) {
    grad.setZero(n);
    hess.clear();
    for (int i = 0; i < n; ++i) hess.emplace_back(i, i, 0.0);
    for (const auto& a : p.linear) {
      const double s = a.eval(x);
      for (const auto& [i, c] : a.terms) grad[i] -= c / s;
      outer(a, 1.0 / (s * s), hess);
    }
    for (const auto& c : p.socs) {
      const double t = c.bound.eval(x);
      std::vector<double> r(c.rows.size());
      double r2 = 0.0;
      for (std::size_t k = 0; k < c.rows.size(); ++k) {
        r[k] = c.rows[k].eval(x);
        r2 += r[k] * r[k];
      }
      const double D = t * t - r2;
      begin();
      for (const auto& [i, ci] : c.bound.terms) add(i, 2.0 * t * ci);
      for (std::size_t k = 0; k < c.rows.size(); ++k)
        for (const auto& [i, ci] : c.rows[k].terms) add(i, -2.0 * r[k] * ci);
      for (int i : support) grad[i] -= scratch[i] / D;
      for (int i : support)
        for (int j : support) hess.emplace_back(i, j, scratch[i] * scratch[j] / (D * D));
      outer(c.bound, -2.0 / D, hess);
      for (const auto& row : c.rows) outer(row, 2.0 / D, hess);
    }
    for (const auto& b : p.psds) {
      Eigen::LLT<MatrixXd> llt(b.eval(x));
      const auto L = llt.matrixL();
      std::vector<MatrixXd> G;
      G.reserve(b.terms.size());
      for (const auto& [i, Fi] : b.terms) {
        MatrixXd Y = L.solve(Fi);
        MatrixXd Gi = L.solve(Y.transpose()).transpose();
        grad[i] -= Gi.trace();
        G.push_back(std::move(Gi));
      }
      for (std::size_t u = 0; u < b.terms.size(); ++u)
        for (std::size_t v = 0; v < b.terms.size(); ++v)
          hess.emplace_back(b.terms[u].first, b.terms[v].first, (G[u].array() * G[v].array()).sum());
    }
  }
};

// Merge repeated variables inside affine forms and PSD blocks.
ConicProgram normalized(const ConicProgram& in) {
  ConicProgram p = in;
  // Unit-scale linear rows so the phase-I slack weighs them alike.
  for (auto& a : p.linear) {
    a.compress();
    double scale = 0.0;
    for (const auto& [i, c] : a.terms) scale = std::max(scale, std::abs(c));
    if (scale > 0.0) a *= 1.0 / scale;
  }
  for (auto& c : p.socs) {
    c.bound.compress();
    for (auto& r : c.rows) r.compress();
  }
  for (auto& b : p.psds) {
    std::map<int, MatrixXd> merged;
    for (auto& [i, F] : b.terms) {
      auto it = merged.find(i);
      if (it == merged.end())
        merged.emplace(i, 0.5 * (F + F.transpose()));
      else
        it->second += 0.5 * (F + F.transpose());
    }
    b.terms.assign(merged.begin(), merged.end());
    b.constant = 0.5 * (b.constant + b.constant.transpose());
  }
  return p;
}

struct PathResult {
  VectorXd x;
  int newton = 0;
  double gap = 0.0;
  Status status = Status::optimal;
  bool exited_early = false;
};

PathResult follow_path(const ConicProgram& p, VectorXd x, const SolverOptions& opts, int budget,
                       const std::function<bool(const VectorXd&)>& stop_early) {
  Barrier bar(p);
  PathResult res;
  const double nu = std::max(1.0, p.barrier_degree());
  VectorXd grad;
  std::vector<Triplet> trip;
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analyzed = false;
  SpMat H(p.num_vars, p.num_vars);

  auto newton_direction = [&](const VectorXd& g, VectorXd& dx) {
    H.setFromTriplets(trip.begin(), trip.end());
    for (int i = 0; i < p.num_vars; ++i) H.coeffRef(i, i) *= 1.0 + 1e-13;
    if (!analyzed) {
      ldlt.analyzePattern(H);
      analyzed = true;
    }
    ldlt.factorize(H);
    if (ldlt.info() != Eigen::Success) return false;
    dx = ldlt.solve(-g);
    return dx.allFinite();
  };

  // Initial barrier weight: least-squares fit of t c to -grad phi in the
  // Hessian metric, clamped to a sane range.
  double t = nu / (1.0 + std::abs(p.value(x)));
  {
    bar.derivatives(x, grad, trip);
    VectorXd hc, hg;
    if (newton_direction(-p.objective, hc) && newton_direction(-grad, hg)) {
      const double num = -p.objective.dot(hg);
      const double den = p.objective.dot(hc);
      if (den > 0 && num > 0 && std::isfinite(num / den)) t = std::clamp(num / den, t * 1e-3, t * 1e3);
    }
  }

  for (;;) {
    // Centering.
    for (int steps = 0;;) {
      if (res.newton >= budget) {
        res.status = Status::iteration_limit;
        res.x = x;
        res.gap = nu / t;
        return res;
      }
      bar.derivatives(x, grad, trip);
      const VectorXd g = t * p.objective + grad;
      VectorXd dx;
      if (!newton_direction(g, dx)) {
        res.status = Status::numerical_failure;
        res.x = x;
        res.gap = nu / t;
        return res;
      }
      const double lambda2 = -g.dot(dx);
      if (lambda2 < 0.0 || lambda2 <= 1e-6) break;
      ++res.newton;
      ++steps;
      double alpha = 1.0;
      if (lambda2 < 0.05) {
        if (steps > 60) break;
        // Inside the quadratic-convergence region of a self-concordant
        // barrier the full step stays feasible; skip Armijo, whose test is
        // below working precision here.
        while (!std::isfinite(bar.value(x + alpha * dx)) && alpha > 1e-14) alpha *= 0.5;
      } else {
        const double f0 = t * p.value(x) + bar.value(x);
        double f1 = t * p.value(x + dx) + bar.value(x + dx);
        while (!(f1 <= f0 - 0.25 * alpha * lambda2) && alpha > 1e-14) {
          alpha *= 0.5;
          f1 = t * p.value(x + alpha * dx) + bar.value(x + alpha * dx);
        }
        // Near the centre, a failing Armijo test is rounding noise.
        if (alpha < 1e-4 && lambda2 < 1.0) break;
        if (alpha <= 1e-14) {
          res.status = Status::numerical_failure;
          res.x = x;
          res.gap = nu / t;
          return res;
        }
      }
      x += alpha * dx;
      if (stop_early && stop_early(x)) {
        res.x = x;
        res.exited_early = true;
        res.gap = nu / t;
        return res;
      }
      if (p.value(x) < -1e15) {
        res.status = Status::iteration_limit;  // unbounded objective
        res.x = x;
        res.gap = nu / t;
        return res;
      }
    }
    if (nu / t <= opts.tol * (1.0 + std::abs(p.value(x)))) break;
    t *= opts.mu;
  }
  res.x = x;
  res.gap = nu / t;
  return res;
}

}  // namespace

Solution solve_conic(const ConicProgram& in, const SolverOptions& opts) {
  in.check();
  ConicProgram p = normalized(in);
  const int n = p.num_vars;
  VectorXd x0 = p.warm_start ? *p.warm_start : VectorXd::Zero(n);
  // A wide box around the start keeps every centering problem bounded
  // without coupling variables in the Newton system.
  const double radius = 1e4 * (1.0 + x0.cwiseAbs().maxCoeff());
  const std::size_t first_box = p.linear.size();
  for (int i = 0; i < n; ++i) {
    p.linear.push_back(Affine::variable(i) + Affine(radius - x0[i]));
    p.linear.push_back(Affine::variable(i, -1.0) + Affine(radius + x0[i]));
  }

  Solution sol;
  const double viol = max_violation(p, x0);
  Barrier bar(p);
  int used = 0;
  if (viol > 0.0 || !std::isfinite(bar.value(x0))) {
    // Phase I on (x, s).
    ConicProgram aux;
    aux.num_vars = n + 1;
    // A light copy of the real objective stops epigraph variables drifting
    // towards the box walls while s is driven down.
    aux.objective = VectorXd::Zero(n + 1);
    aux.objective.head(n) = p.objective * (1e-3 / (1.0 + std::abs(p.value(x0))));
    aux.objective[n] = 1.0;
    const Affine s = Affine::variable(n);
    aux.linear = p.linear;
    for (auto& a : aux.linear) a += s;
    aux.socs = p.socs;
    for (auto& c : aux.socs) c.bound += s;
    aux.psds = p.psds;
    for (auto& b : aux.psds) b.terms.push_back({n, MatrixXd::Identity(b.order(), b.order())});
    // Keep the auxiliary problem bounded below.
    const double floor = std::max(1.0, 0.1 * std::abs(viol));
    aux.linear.push_back(s + Affine(floor));
    VectorXd z(n + 1);
    z.head(n) = x0;
    z[n] = viol + std::max(1.0, std::abs(viol));
    // The SOC bound needs bound + s > 0 as well as D > 0; the margin above covers both.
    SolverOptions o1 = opts;
    PathResult ph1 = follow_path(aux, z, o1, opts.max_newton, [n](const VectorXd& v) { return v[n] < 0.0; });
    used = ph1.newton;
    if (!ph1.exited_early && ph1.status == Status::optimal && used < opts.max_newton) {
      // The objective copy can hold s just above zero; retry on s alone.
      aux.objective.head(n).setZero();
      const PathResult again = follow_path(aux, ph1.x, o1, opts.max_newton - used,
                                           [n](const VectorXd& v) { return v[n] < 0.0; });
      ph1 = again;
      used += again.newton;
    }
    if (!ph1.exited_early) {
      sol.x = ph1.x.head(n);
      sol.iterations = used;
      sol.objective = p.value(sol.x);
      sol.max_violation = max_violation(in, sol.x);
      sol.status = ph1.status == Status::optimal ? Status::infeasible : ph1.status;
      return sol;
    }
    x0 = ph1.x.head(n);
  }

  const PathResult ph2 = follow_path(p, x0, opts, std::max(1, opts.max_newton - used), {});
  sol.x = ph2.x;
  sol.iterations = used + ph2.newton;
  sol.status = ph2.status;
  sol.gap = ph2.gap;
  sol.objective = p.value(sol.x);
  sol.max_violation = max_violation(in, sol.x);
  // A box wall within reach of the solution means the problem is unbounded.
  if (sol.status == Status::optimal)
    for (std::size_t k = first_box; k < p.linear.size(); ++k)
      if (p.linear[k].eval(sol.x) < 1e-3 * radius) sol.status = Status::iteration_limit;
  return sol;
}

}  // namespace airsea::conic
