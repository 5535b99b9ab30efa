#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "apichain/error.hpp"
#include "apichain/pca.hpp"
#include "oracles.hpp"

using namespace apichain;

namespace {

Eigen::MatrixXd gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = z(rng);
  return X;
}

// Correlated data with a spread-out spectrum.
Eigen::MatrixXd skewed(std::size_t n, std::size_t d, std::uint64_t seed) {
  Eigen::MatrixXd A = gaussian(d, d, seed + 1);
  Eigen::MatrixXd X = gaussian(n, d, seed) * A;
  for (Eigen::Index j = 0; j < X.cols(); ++j) X.col(j) *= 1.0 + static_cast<double>(j);
  return X;
}

}  // namespace

TEST_CASE("rank-1 data on y = 2x") {
  Eigen::MatrixXd X(5, 2);
  for (int i = 0; i < 5; ++i) X.row(i) << i, 2.0 * i;
  const auto p = fit_pca(X, 1);
  CHECK(p.explained_variance_ratio(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.components(0, 0) == doctest::Approx(1.0 / std::sqrt(5.0)));
  CHECK(p.components(0, 1) == doctest::Approx(2.0 / std::sqrt(5.0)));
}

TEST_CASE("explained variances match the Jacobi covariance oracle") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto X = skewed(200, 6, seed);
    const auto oracle = testing::covariance_eigenvalues(X);
    const auto p = fit_pca(X, 6);
    double total = 0;
    for (double v : oracle) total += v;
    for (int c = 0; c < 6; ++c) {
      CHECK(std::abs(p.explained_variance(c) - oracle[c]) <= 1e-6);
      CHECK(std::abs(p.explained_variance_ratio(c) - oracle[c] / total) <= 1e-6);
    }
  }
}

TEST_CASE("wide data (d > n) uses the Gram route and still matches the oracle") {
  const auto X = skewed(12, 40, 4);
  const auto oracle = testing::covariance_eigenvalues(X);
  const auto p = fit_pca(X, 10);
  for (int c = 0; c < 10; ++c) CHECK(std::abs(p.explained_variance(c) - oracle[c]) <= 1e-6);
  const Eigen::MatrixXd gram = p.components * p.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("components are orthonormal, ratios non-increasing, sign convention holds") {
  const auto X = skewed(300, 8, 5);
  const auto p = fit_pca(X, 5);
  const Eigen::MatrixXd gram = p.components * p.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-8);
  double sum = 0;
  for (int c = 0; c < 5; ++c) {
    CHECK(p.explained_variance_ratio(c) >= 0.0);
    CHECK(p.explained_variance_ratio(c) <= 1.0);
    if (c) CHECK(p.explained_variance_ratio(c) <= p.explained_variance_ratio(c - 1) + 1e-12);
    sum += p.explained_variance_ratio(c);
    Eigen::Index arg;
    p.components.row(c).cwiseAbs().maxCoeff(&arg);
    CHECK(p.components(c, arg) > 0.0);
  }
  CHECK(sum <= 1.0 + 1e-9);
}

TEST_CASE("isotropic Gaussian splits variance evenly") {
  const auto X = gaussian(10000, 4, 77);
  const auto p = fit_pca(X, 4);
  for (int c = 0; c < 4; ++c) CHECK(std::abs(p.explained_variance_ratio(c) - 0.25) <= 0.02);
}

TEST_CASE("transform") {
  const auto X = skewed(150, 5, 6);
  const auto p = fit_pca(X, 3);
  CHECK(p.transform(p.mean).cwiseAbs().maxCoeff() <= 1e-12);

  // Projected training rows have per-component variance equal to the eigenvalues.
  const Eigen::MatrixXd Z = p.transform_rows(X);
  for (int c = 0; c < 3; ++c) {
    const double mean = Z.col(c).mean();
    const double var = (Z.col(c).array() - mean).square().sum() / static_cast<double>(Z.rows() - 1);
    CHECK(std::abs(var - p.explained_variance(c)) <= 1e-6 * std::max(1.0, p.explained_variance(c)));
  }

  // Affine: T(x) - T(y) = C (x - y).
  const Eigen::VectorXd x = X.row(0).transpose(), y = X.row(1).transpose();
  CHECK(((p.transform(x) - p.transform(y)) - p.components * (x - y)).cwiseAbs().maxCoeff() <= 1e-10);

  CHECK_THROWS_AS(p.transform(Eigen::VectorXd::Zero(4)), Error);

  const auto full = fit_pca(X, 5);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd r = X.row(i).transpose();
    CHECK((full.inverse_transform(full.transform(r)) - r).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("first component maximizes projected variance") {
  const auto X = skewed(300, 6, 9);
  const auto p = fit_pca(X, 1);
  const Eigen::MatrixXd C = X.rowwise() - p.mean.transpose();
  const auto variance = [&](const Eigen::VectorXd& u) { return (C * u).squaredNorm() / static_cast<double>(C.rows() - 1); };
  const double best = variance(p.components.row(0).transpose());
  std::mt19937_64 rng(10);
  std::normal_distribution<double> z;
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd u(6);
    for (auto& v : u) v = z(rng);
    CHECK(variance(u.normalized()) <= best + 1e-9);
  }
}

TEST_CASE("degenerate and invalid input") {
  const Eigen::MatrixXd same = Eigen::MatrixXd::Constant(5, 3, 0.25);
  const auto p = fit_pca(same, 2);
  CHECK(p.degenerate);
  CHECK(p.explained_variance_ratio.isZero());
  const Eigen::MatrixXd gram = p.components * p.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(fit_pca(same, 0), Error);
  CHECK_THROWS_AS(fit_pca(same, 4), Error);
  CHECK_THROWS_AS(fit_pca(Eigen::MatrixXd::Zero(1, 3), 1), Error);
}
