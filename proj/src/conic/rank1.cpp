#include <airsea/conic/rank1.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace airsea::conic {

namespace {

Eigen::MatrixXcd psd_root(const Eigen::MatrixXcd& X) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(X);
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal();
}

}  // namespace

Eigen::VectorXcd gaussian_sample(const Eigen::MatrixXcd& X, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  Eigen::VectorXcd z(X.rows());
  for (int i = 0; i < z.size(); ++i) z[i] = {n(rng), n(rng)};
  return psd_root(X) * z;
}

Rank1 extract_rank1(const Eigen::MatrixXcd& X, const Rank1Options& opts, const Rescale& rescale) {
  const Eigen::MatrixXcd Xh = 0.5 * (X + X.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Xh);
  const auto& lam = es.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  if (lam.minCoeff() < -opts.psd_tol * scale)
    throw std::invalid_argument("extract_rank1: matrix is not positive semidefinite");

  Rank1 out;
  const double trace = Xh.trace().real();
  const int m = int(X.rows());
  if (trace <= 0.0) {
    out.vector = Eigen::VectorXcd::Zero(m);
    return out;
  }
  const double top = std::max(lam[m - 1], 0.0);
  out.vector = std::sqrt(top) * es.eigenvectors().col(m - 1);
  out.residual = 1.0 - top / trace;
  if (out.residual <= opts.threshold) return out;

  out.randomized = true;
  std::mt19937_64 rng(opts.seed);
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd chosen;
  for (int s = 0; s < opts.samples; ++s) {
    const Eigen::VectorXcd xi = gaussian_sample(Xh, rng);
    std::optional<Eigen::VectorXcd> cand;
    if (rescale) {
      cand = rescale(xi);
    } else if (xi.norm() > 0.0) {
      cand = xi * std::sqrt(trace) / xi.norm();
    }
    if (cand && cand->squaredNorm() < best) {
      best = cand->squaredNorm();
      chosen = *cand;
    }
  }
  if (chosen.size()) out.vector = chosen;
  return out;
}

}  // namespace airsea::conic
