#pragma once

// Conic programs over a real variable vector x:
//   minimize    c^T x + c0
//   subject to  a_i^T x + b_i >= 0                 (linear)
//               || A_j x + b_j || <= f_j^T x + g_j  (second-order cone)
//               F_0 + sum_l x_l F_l  PSD            (semidefinite)
// Equality constraints are not supported; callers substitute fixed values.

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace airsea::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Affine {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  Affine() = default;
  Affine(double c) : constant(c) {}  // NOLINT: constants promote implicitly
  static Affine variable(int index, double coef = 1.0) {
    Affine a;
    a.terms.push_back({index, coef});
    return a;
  }

  double eval(const VectorXd& x) const;
  /// Merge duplicate indices and drop exact zeros.
  Affine& compress();

  Affine& operator+=(const Affine& o);
  Affine& operator-=(const Affine& o);
  Affine& operator*=(double s);
};

Affine operator+(Affine a, const Affine& b);
Affine operator-(Affine a, const Affine& b);
Affine operator-(Affine a);
Affine operator*(double s, Affine a);
Affine operator*(Affine a, double s);

struct SocBlock {
  std::vector<Affine> rows;
  Affine bound;
};

struct PsdBlock {
  MatrixXd constant;
  std::vector<std::pair<int, MatrixXd>> terms;
  int order() const { return int(constant.rows()); }
  MatrixXd eval(const VectorXd& x) const;
};

struct ConicProgram {
  int num_vars = 0;
  VectorXd objective;
  double objective_constant = 0.0;
  std::vector<Affine> linear;
  std::vector<SocBlock> socs;
  std::vector<PsdBlock> psds;
  std::optional<VectorXd> warm_start;

  /// Throws std::invalid_argument on inconsistent dimensions or indices.
  void check() const;
  /// Self-concordance parameter of the log barrier.
  double barrier_degree() const;
  double value(const VectorXd& x) const { return objective.dot(x) + objective_constant; }
};

enum class Status { optimal, infeasible, iteration_limit, numerical_failure };

const char* to_string(Status s);

struct Solution {
  VectorXd x;
  double objective = 0.0;
  Status status = Status::numerical_failure;
  double max_violation = 0.0;
  double gap = 0.0;  // barrier duality gap bound at exit
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-8;  // relative duality gap
  int max_newton = 600;
  double mu = 16.0;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Solution solve_conic(const ConicProgram& prog, const SolverOptions& opts = {});

/// Largest constraint violation at x (0 when feasible).
double max_violation(const ConicProgram& prog, const VectorXd& x);

/// Adds one slack s >= 0 to every constraint with objective weight `weight`.
/// The slack is the last variable.
ConicProgram elastic(const ConicProgram& prog, double weight);

/// Plain-text listing of objective and blocks.
void dump(const ConicProgram& prog, std::ostream& os);

}  // namespace airsea::conic
