#pragma once

// Successive convex approximation driver. Each round builds a convex
// surrogate at the current iterate, solves it, and accepts the new point by
// backtracking on the exact objective, so the recorded history never rises.

#include <airsea/conic/program.hpp>

#include <functional>
#include <stdexcept>

namespace airsea::conic {

struct ScaOptions {
  double tol = 1e-3;          // relative objective change that counts as converged
  int max_iterations = 50;
  double penalty = 1e4;       // elastic slack weight when a surrogate is infeasible
  bool elastic = true;        // false: an infeasible surrogate is an error
  SolverOptions solver;
};

struct ScaState {
  VectorXd iterate;
  VectorXd expansion;            // point the last accepted surrogate was built at
  std::vector<double> history;   // exact objective, history[0] at the initial point
  int iterations = 0;
  bool converged = false;
  bool penalty_used = false;
  double max_slack = 0.0;
};

struct ScaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScaProblem {
  std::function<ConicProgram(const VectorXd& expansion)> build;
  std::function<double(const VectorXd&)> objective;
  /// Optional exact feasibility test applied to accepted points.
  std::function<bool(const VectorXd&)> feasible;
};

ScaState sca_loop(const ScaProblem& problem, const VectorXd& init, const ScaOptions& opts = {});

struct LinearizationCheck {
  std::vector<double> radii;
  std::vector<double> ratio;  // worst |f - model| / r^2 per radius
  double worst_gap = 0.0;
  double worst_ratio = 0.0;
};

/// Compares f with a first-order model along `directions` random unit
/// directions at radii r, r/2, r/4, ...
LinearizationCheck check_linearization(const std::function<double(const VectorXd&)>& f,
                                       const std::function<double(const VectorXd&)>& model,
                                       const VectorXd& point, double radius, int directions = 16,
                                       int halvings = 3, std::uint64_t seed = 0);

}  // namespace airsea::conic
