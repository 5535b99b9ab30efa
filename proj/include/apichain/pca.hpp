#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace apichain {

/// Mean-centered principal components (no variance scaling).
struct PcaModel {
  Eigen::VectorXd mean;                     // d
  Eigen::MatrixXd components;               // k x d, orthonormal rows
  Eigen::VectorXd explained_variance;       // k eigenvalues of the sample covariance
  Eigen::VectorXd explained_variance_ratio; // k fractions of the total variance
  bool degenerate = false;                  // zero total variance

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
  std::size_t output_dim() const noexcept { return static_cast<std::size_t>(components.rows()); }

  /// components * (x - mean). Throws on dimension mismatch.
  Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
  /// Row-wise transform of an n x d matrix.
  Eigen::MatrixXd transform_rows(const Eigen::MatrixXd& rows) const;
  Eigen::VectorXd inverse_transform(const Eigen::VectorXd& z) const;
};

inline constexpr std::size_t kDefaultPcaComponents = 10;

/// Requires n >= 2 and 1 <= k <= min(n, d). Uses the d x d covariance when d <= n,
/// otherwise the n x n Gram matrix. Each component's largest-magnitude
/// coefficient is made positive.
PcaModel fit_pca(const Eigen::MatrixXd& X, std::size_t k);

}  // namespace apichain
