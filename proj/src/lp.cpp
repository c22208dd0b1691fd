#include <airsea/lp.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace airsea {

namespace {

constexpr double kEps = 1e-9;

// Tableau with the objective in the last row; column `rhs` holds b.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Tableau {
  RowMatrix T;
  std::vector<int> basis;
  int rows, cols;  // constraint rows, structural + artificial columns
  int pivots = 0;

  void pivot(int r, int c) {
    T.row(r) /= T(r, c);
    Eigen::VectorXd col = T.col(c);
    col[r] = 0.0;
    T.noalias() -= col * T.row(r);
    basis[r] = c;
    ++pivots;
  }

  // Returns false when unbounded. `allowed` limits entering columns.
  bool run(int allowed) {
    int degenerate = 0;
    for (;;) {
      const int obj = rows;
      int enter = -1;
      if (degenerate < 50) {
        double best = -kEps;
        for (int j = 0; j < allowed; ++j)
          if (T(obj, j) < best) {
            best = T(obj, j);
            enter = j;
          }
      } else {
        for (int j = 0; j < allowed; ++j)
          if (T(obj, j) < -kEps) {
            enter = j;
            break;
          }
      }
      if (enter < 0) return true;
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows; ++i) {
        const double a = T(i, enter);
        if (a > kEps) {
          const double r = T(i, cols) / a;
          if (r < ratio - 1e-12 || (std::abs(r - ratio) <= 1e-12 && leave >= 0 && basis[i] < basis[leave])) {
            ratio = r;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      degenerate = ratio < 1e-12 ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const int m = int(A.rows()), n = int(A.cols());
  Tableau tab;
  tab.rows = m;
  tab.cols = n + m;
  tab.T = RowMatrix::Zero(m + 1, n + m + 1);
  tab.basis.resize(m);
  RowMatrix signed_a(m, n);
  Eigen::VectorXd signed_b(m);
  for (int i = 0; i < m; ++i) {
    const double sign = b[i] < 0 ? -1.0 : 1.0;
    signed_a.row(i) = sign * A.row(i);
    signed_b[i] = sign * b[i];
  }
  // Crash basis: a unit column owned by a single row replaces the artificial.
  std::vector<int> owner(n, -1);
  for (int j = 0; j < n; ++j) {
    int nz = 0, row = -1;
    for (int i = 0; i < m; ++i)
      if (signed_a(i, j) != 0.0) ++nz, row = i;
    if (nz == 1 && signed_a(row, j) == 1.0) owner[j] = row;
  }
  std::vector<bool> crashed(m, false);
  for (int j = 0; j < n; ++j)
    if (owner[j] >= 0 && !crashed[owner[j]]) {
      crashed[owner[j]] = true;
      tab.basis[owner[j]] = j;
    }
  // Small distinct right-hand-side shifts keep the degenerate routing
  // relaxations from stalling; the final basis is re-solved exactly.
  for (int i = 0; i < m; ++i) {
    tab.T.row(i).head(n) = signed_a.row(i);
    if (!crashed[i]) {
      tab.T(i, n + i) = 1.0;
      tab.basis[i] = n + i;
    }
    tab.T(i, n + m) = signed_b[i] + 1e-8 * (1.0 + std::abs(signed_b[i])) * (1.0 + double((i * 7919) % 997) / 997.0);
  }
  // Phase I objective: sum of artificials, expressed in non-basic terms.
  for (int i = 0; i < m; ++i)
    if (!crashed[i]) tab.T.row(m) -= tab.T.row(i);
  for (int i = 0; i < m; ++i) tab.T(m, n + i) = 0.0;

  LpResult res;
  tab.run(n + m);
  if (-tab.T(m, n + m) > 1e-6 * (1.0 + b.cwiseAbs().maxCoeff())) {
    res.status = LpStatus::infeasible;
    res.pivots = tab.pivots;
    return res;
  }
  // Drive remaining artificials out of the basis; drop redundant rows.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) continue;
    int col = -1;
    for (int j = 0; j < n; ++j)
      if (std::abs(tab.T(i, j)) > 1e-7) {
        col = j;
        break;
      }
    if (col >= 0) tab.pivot(i, col);
  }
  // Phase II objective row.
  tab.T.row(m).setZero();
  tab.T.row(m).head(n) = c.transpose();
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < n) tab.T.row(m) -= c[tab.basis[i]] * tab.T.row(i);
  // Artificials stuck in the basis sit on all-zero rows; they never re-enter.
  if (!tab.run(n)) {
    res.status = LpStatus::unbounded;
    res.pivots = tab.pivots;
    return res;
  }
  Eigen::MatrixXd basis(m, m);
  for (int i = 0; i < m; ++i) {
    const int j = tab.basis[i];
    if (j < n)
      basis.col(i) = signed_a.col(j);
    else
      basis.col(i) = Eigen::VectorXd::Unit(m, j - n);
  }
  const Eigen::VectorXd xb = basis.colPivHouseholderQr().solve(signed_b);
  res.status = LpStatus::optimal;
  res.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < n) res.x[tab.basis[i]] = std::max(xb[i], 0.0);
  res.value = c.dot(res.x);
  res.pivots = tab.pivots;
  return res;
}

}  // namespace airsea
