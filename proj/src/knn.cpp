#include "apichain/knn.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "apichain/error.hpp"

namespace apichain {

std::vector<std::size_t> nearest_neighbors(const Eigen::MatrixXd& train, const Eigen::Ref<const Eigen::VectorXd>& x,
                                           std::size_t k) {
  const auto n = static_cast<std::size_t>(train.rows());
  if (n == 0) throw Error("k-NN training set is empty");
  if (k == 0 || k > n) throw Error("k-NN needs 1 <= k <= " + std::to_string(n));
  if (x.size() != train.cols())
    throw Error("k-NN expects " + std::to_string(train.cols()) + " features, got " + std::to_string(x.size()));

  const Eigen::VectorXd dist = (train.rowwise() - x.transpose()).rowwise().squaredNorm();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const auto closer = [&](std::size_t a, std::size_t b) {
    const auto da = dist(static_cast<Eigen::Index>(a));
    const auto db = dist(static_cast<Eigen::Index>(b));
    return da < db || (da == db && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), closer);
  idx.resize(k);
  return idx;
}

Label knn_predict(const LabeledDataset& train, const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t k) {
  std::size_t malware = 0;
  const auto near = nearest_neighbors(train.X, x, k);
  for (auto i : near) malware += train.y[i] == Label::malware;
  return 2 * malware >= near.size() ? Label::malware : Label::benign;
}

}  // namespace apichain
