#include <airsea/conic/model.hpp>

#include <cmath>

namespace airsea::conic {

int Model::add_var(double start) {
  start_.push_back(start);
  return int(start_.size()) - 1;
}

std::vector<int> Model::add_vars(int count, double start) {
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(add_var(start));
  return out;
}

void Model::add_objective(const Affine& a) {
  objective_.insert(objective_.end(), a.terms.begin(), a.terms.end());
  objective_constant_ += a.constant;
}

void Model::add_nonneg(const Affine& a) { prog_.linear.push_back(a); }

void Model::add_le(const Affine& lhs, const Affine& rhs) { prog_.linear.push_back(rhs - lhs); }

void Model::add_soc(std::vector<Affine> rows, Affine bound) {
  prog_.socs.push_back({std::move(rows), std::move(bound)});
}

void Model::add_rotated(std::vector<Affine> rows, Affine y, Affine z) {
  for (auto& r : rows) r *= 2.0;
  rows.push_back(y - z);
  add_soc(std::move(rows), y + z);
}

void Model::add_psd(PsdBlock block) { prog_.psds.push_back(std::move(block)); }

int Model::square_over(const Affine& x, const Affine& y, double start) {
  const int e = add_var(start);
  add_rotated({x}, var(e), y);
  return e;
}

int Model::cube_over_square(const Affine& x, const Affine& y, double start) {
  // w >= x^2 / y and e >= w^2 / x give e >= x^3 / y^2.
  const double xs = x.eval(Eigen::Map<const VectorXd>(start_.data(), start_.size()));
  const double ys = y.eval(Eigen::Map<const VectorXd>(start_.data(), start_.size()));
  const int w = add_var(ys > 0 ? xs * xs / ys : 0.0);
  add_rotated({x}, var(w), y);
  const int e = add_var(start);
  add_rotated({var(w)}, var(e), x);
  return e;
}

ConicProgram Model::program() const {
  ConicProgram p = prog_;
  p.num_vars = size();
  p.objective = VectorXd::Zero(p.num_vars);
  for (const auto& [i, c] : objective_) p.objective[i] += c;
  p.objective_constant = objective_constant_;
  p.warm_start = Eigen::Map<const VectorXd>(start_.data(), start_.size());
  return p;
}

namespace {

// Index of the real parameters for entry (i, j), i < j.
int upper_index(int i, int j, int m) {
  int idx = m;
  for (int r = 0; r < i; ++r) idx += 2 * (m - 1 - r);
  return idx + 2 * (j - i - 1);
}

}  // namespace

HermitianVar add_hermitian_psd(Model& model, int m, const Eigen::MatrixXcd& start) {
  HermitianVar X{model.size(), m};
  model.add_vars(m * m);
  set_hermitian_start(model, X, start);
  // Real embedding [[A, -B], [B, A]] of X = A + jB.
  PsdBlock block;
  block.constant = MatrixXd::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    MatrixXd F = MatrixXd::Zero(2 * m, 2 * m);
    F(i, i) = F(m + i, m + i) = 1.0;
    block.terms.push_back({X.offset + i, F});
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const int k = X.offset + upper_index(i, j, m);
      MatrixXd Fr = MatrixXd::Zero(2 * m, 2 * m);
      Fr(i, j) = Fr(j, i) = Fr(m + i, m + j) = Fr(m + j, m + i) = 1.0;
      MatrixXd Fi = MatrixXd::Zero(2 * m, 2 * m);
      // B(i,j) = s, B(j,i) = -s; upper-right block holds -B.
      Fi(m + i, j) = 1.0;
      Fi(m + j, i) = -1.0;
      Fi(i, m + j) = -1.0;
      Fi(j, m + i) = 1.0;
      block.terms.push_back({k, Fr});
      block.terms.push_back({k + 1, Fi});
    }
  model.add_psd(std::move(block));
  return X;
}

Affine trace_product(const HermitianVar& X, const Eigen::MatrixXcd& A) {
  const int m = X.order;
  Affine a;
  for (int i = 0; i < m; ++i) a.terms.push_back({X.offset + i, A(i, i).real()});
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const int k = X.offset + upper_index(i, j, m);
      a.terms.push_back({k, 2.0 * A(i, j).real()});
      a.terms.push_back({k + 1, 2.0 * A(i, j).imag()});
    }
  return a;
}

Eigen::MatrixXcd hermitian_value(const HermitianVar& X, const VectorXd& x) {
  const int m = X.order;
  Eigen::MatrixXcd out(m, m);
  for (int i = 0; i < m; ++i) out(i, i) = x[X.offset + i];
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const int k = X.offset + upper_index(i, j, m);
      out(i, j) = std::complex<double>(x[k], x[k + 1]);
      out(j, i) = std::conj(out(i, j));
    }
  return out;
}

void set_hermitian_start(Model& model, const HermitianVar& X, const Eigen::MatrixXcd& value) {
  const int m = X.order;
  for (int i = 0; i < m; ++i) model.set_start(X.offset + i, value(i, i).real());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const int k = X.offset + upper_index(i, j, m);
      model.set_start(k, value(i, j).real());
      model.set_start(k + 1, value(i, j).imag());
    }
}

}  // namespace airsea::conic
