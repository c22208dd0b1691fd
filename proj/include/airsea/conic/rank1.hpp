#pragma once

// Recovering beam vectors from relaxed Hermitian PSD solutions.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <random>

namespace airsea::conic {

struct Rank1 {
  Eigen::VectorXcd vector;
  double residual = 0.0;  // 1 - lambda_max / trace
  bool randomized = false;
};

struct Rank1Options {
  double threshold = 1e-3;
  int samples = 100;
  std::uint64_t seed = 0;
  double psd_tol = 1e-8;
};

/// Feasibility re-scaling of a randomized candidate; nullopt rejects it.
using Rescale = std::function<std::optional<Eigen::VectorXcd>(const Eigen::VectorXcd&)>;

/// Principal component of X when it dominates the trace, otherwise the
/// lowest-power feasible Gaussian sample. The default rescale matches the
/// trace of X. Throws std::invalid_argument when X is indefinite beyond tol.
Rank1 extract_rank1(const Eigen::MatrixXcd& X, const Rank1Options& opts = {}, const Rescale& rescale = {});

/// One draw of xi with E[xi xi^H] = X.
Eigen::VectorXcd gaussian_sample(const Eigen::MatrixXcd& X, std::mt19937_64& rng);

}  // namespace airsea::conic
