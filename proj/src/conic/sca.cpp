#include <airsea/conic/sca.hpp>

#include <cmath>
#include <random>

namespace airsea::conic {

ScaState sca_loop(const ScaProblem& problem, const VectorXd& init, const ScaOptions& opts) {
  ScaState st;
  st.iterate = init;
  st.expansion = init;
  double f = problem.objective(init);
  st.history.push_back(f);

  for (int k = 0; k < opts.max_iterations; ++k) {
    ConicProgram prog = problem.build(st.iterate);
    if (!prog.warm_start) prog.warm_start = st.iterate;
    Solution sol = solve_conic(prog, opts.solver);
    VectorXd cand;
    if (sol.status == Status::infeasible || sol.status == Status::numerical_failure) {
      if (!opts.elastic) {
        if (k == 0) throw ScaError("surrogate infeasible at the initial point");
        break;
      }
      const ConicProgram relaxed = elastic(prog, opts.penalty);
      const Solution rs = solve_conic(relaxed, opts.solver);
      if (rs.status == Status::infeasible || rs.status == Status::numerical_failure) {
        if (k == 0) throw ScaError("surrogate infeasible at the initial point");
        break;
      }
      st.penalty_used = true;
      st.max_slack = std::max(st.max_slack, rs.x[prog.num_vars]);
      cand = rs.x.head(prog.num_vars);
    } else {
      cand = sol.x;
    }
    ++st.iterations;

    // Backtrack on the exact objective from the current iterate.
    bool accepted = false;
    double alpha = 1.0;
    VectorXd z;
    double fz = f;
    for (int tries = 0; tries < 8; ++tries, alpha *= 0.5) {
      z = st.iterate + alpha * (cand - st.iterate);
      fz = problem.objective(z);
      if (std::isfinite(fz) && fz <= f && (!problem.feasible || problem.feasible(z))) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      st.converged = true;
      break;
    }
    st.expansion = st.iterate;
    st.iterate = z;
    const double change = f - fz;
    f = fz;
    st.history.push_back(f);
    if (change <= opts.tol * std::max(1.0, std::abs(f))) {
      st.converged = true;
      break;
    }
  }
  return st;
}

LinearizationCheck check_linearization(const std::function<double(const VectorXd&)>& f,
                                       const std::function<double(const VectorXd&)>& model,
                                       const VectorXd& point, double radius, int directions,
                                       int halvings, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  std::vector<VectorXd> dirs;
  for (int d = 0; d < directions; ++d) {
    VectorXd v(point.size());
    for (int i = 0; i < v.size(); ++i) v[i] = n(rng);
    dirs.push_back(v / v.norm());
  }
  LinearizationCheck out;
  double r = radius;
  for (int h = 0; h <= halvings; ++h, r *= 0.5) {
    double worst = 0.0;
    for (const auto& d : dirs) {
      const VectorXd x = point + r * d;
      const double gap = std::abs(f(x) - model(x));
      out.worst_gap = std::max(out.worst_gap, gap);
      worst = std::max(worst, gap / (r * r));
    }
    out.radii.push_back(r);
    out.ratio.push_back(worst);
    out.worst_ratio = std::max(out.worst_ratio, worst);
  }
  return out;
}

}  // namespace airsea::conic
