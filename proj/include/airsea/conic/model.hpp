#pragma once

// Incremental builder for ConicProgram with the cone gadgets the planners
// need: rotated cones, power epigraphs and Hermitian PSD variables.

#include <airsea/conic/program.hpp>

#include <complex>

namespace airsea::conic {

class Model {
 public:
  int add_var(double start = 0.0);
  std::vector<int> add_vars(int count, double start = 0.0);
  Affine var(int i) const { return Affine::variable(i); }
  int size() const { return int(start_.size()); }

  void set_start(int i, double v) { start_[i] = v; }
  double start(int i) const { return start_[i]; }

  void add_objective(const Affine& a);
  void add_nonneg(const Affine& a);                       // a >= 0
  void add_le(const Affine& lhs, const Affine& rhs);      // lhs <= rhs
  void add_soc(std::vector<Affine> rows, Affine bound);    // ||rows|| <= bound
  void add_rotated(std::vector<Affine> rows, Affine y, Affine z);  // ||rows||^2 <= y z, y, z >= 0
  void add_psd(PsdBlock block);

  /// New variable e with e >= x^2 / y (y > 0 affine).
  int square_over(const Affine& x, const Affine& y, double start = 0.0);
  /// New variable e with e >= x^3 / y^2 for x >= 0, y > 0.
  int cube_over_square(const Affine& x, const Affine& y, double start = 0.0);

  ConicProgram program() const;

 private:
  std::vector<double> start_;
  std::vector<std::pair<int, double>> objective_;
  double objective_constant_ = 0.0;
  ConicProgram prog_;
};

/// Hermitian PSD matrix variable of order m stored as m^2 reals:
/// diagonal, then (Re, Im) of each strictly upper entry.
struct HermitianVar {
  int offset = 0;
  int order = 0;
};

HermitianVar add_hermitian_psd(Model& model, int order, const Eigen::MatrixXcd& start);
/// tr(A X) for Hermitian A.
Affine trace_product(const HermitianVar& X, const Eigen::MatrixXcd& A);
Eigen::MatrixXcd hermitian_value(const HermitianVar& X, const VectorXd& x);
void set_hermitian_start(Model& model, const HermitianVar& X, const Eigen::MatrixXcd& value);

}  // namespace airsea::conic
