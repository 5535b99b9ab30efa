#include "apichain/pca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "apichain/error.hpp"

namespace apichain {
namespace {

void fix_sign(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
}

// Replaces rows [from, k) with unit vectors orthogonal to everything before them.
void complete_basis(Eigen::MatrixXd& comps, Eigen::Index from) {
  const Eigen::Index d = comps.cols();
  Eigen::Index basis = 0;
  for (Eigen::Index r = from; r < comps.rows(); ++r) {
    while (basis < d) {
      Eigen::RowVectorXd v = Eigen::RowVectorXd::Unit(d, basis++);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index q = 0; q < r; ++q) v -= v.dot(comps.row(q)) * comps.row(q);
      if (v.norm() > 1e-6) {
        comps.row(r) = v / v.norm();
        break;
      }
    }
  }
}

}  // namespace

PcaModel fit_pca(const Eigen::MatrixXd& X, std::size_t k) {
  const auto n = X.rows();
  const auto d = X.cols();
  if (n < 2) throw Error("PCA needs at least two rows");
  if (k == 0 || k > static_cast<std::size_t>(std::min(n, d)))
    throw Error("PCA component count " + std::to_string(k) + " outside [1, " + std::to_string(std::min(n, d)) + "]");
  const auto kk = static_cast<Eigen::Index>(k);

  PcaModel model;
  model.mean = X.colwise().mean().transpose();
  const Eigen::MatrixXd centered = X.rowwise() - model.mean.transpose();
  const double denom = static_cast<double>(n - 1);
  const double total = centered.squaredNorm() / denom;

  model.components.resize(kk, d);
  model.explained_variance.resize(kk);

  if (d <= n) {
    const Eigen::MatrixXd cov = centered.transpose() * centered / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw Error("covariance eigendecomposition failed");
    for (Eigen::Index c = 0; c < kk; ++c) {
      const Eigen::Index src = d - 1 - c;  // eigenvalues ascend
      model.explained_variance(c) = std::max(0.0, solver.eigenvalues()(src));
      model.components.row(c) = solver.eigenvectors().col(src).transpose();
    }
  } else {
    const Eigen::MatrixXd gram = centered * centered.transpose() / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw Error("Gram eigendecomposition failed");
    const double tol = 1e-12 * std::max(1.0, total);
    Eigen::Index usable = kk;
    for (Eigen::Index c = 0; c < kk; ++c) {
      const Eigen::Index src = n - 1 - c;
      const double lambda = solver.eigenvalues()(src);
      if (lambda <= tol) {
        usable = c;
        break;
      }
      model.explained_variance(c) = lambda;
      Eigen::VectorXd v = centered.transpose() * solver.eigenvectors().col(src);
      model.components.row(c) = (v / v.norm()).transpose();
    }
    for (Eigen::Index c = usable; c < kk; ++c) model.explained_variance(c) = 0.0;
    complete_basis(model.components, usable);
  }

  model.degenerate = total <= 0.0;
  if (model.degenerate) {
    model.components.setZero();
    complete_basis(model.components, 0);
    model.explained_variance.setZero();
  }
  for (Eigen::Index c = 0; c < kk; ++c) fix_sign(model.components.row(c));
  model.explained_variance_ratio =
      model.degenerate ? Eigen::VectorXd::Zero(kk) : Eigen::VectorXd(model.explained_variance / total);
  return model;
}

Eigen::VectorXd PcaModel::transform(const Eigen::VectorXd& x) const {
  if (x.size() != mean.size())
    throw Error("PCA input has " + std::to_string(x.size()) + " features, expected " + std::to_string(mean.size()));
  return components * (x - mean);
}

Eigen::MatrixXd PcaModel::transform_rows(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != mean.size())
    throw Error("PCA input has " + std::to_string(rows.cols()) + " features, expected " + std::to_string(mean.size()));
  return (rows.rowwise() - mean.transpose()) * components.transpose();
}

Eigen::VectorXd PcaModel::inverse_transform(const Eigen::VectorXd& z) const {
  if (z.size() != components.rows()) throw Error("PCA output dimension mismatch");
  return components.transpose() * z + mean;
}

}  // namespace apichain
