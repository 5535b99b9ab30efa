#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "apichain/dataset.hpp"

namespace apichain {

/// Indices of the k nearest training rows by Euclidean distance, nearest first;
/// equal distances are ordered by lower row index.
std::vector<std::size_t> nearest_neighbors(const Eigen::MatrixXd& train, const Eigen::Ref<const Eigen::VectorXd>& x,
                                           std::size_t k);

/// Majority label of the k nearest rows (vote ties go to malware).
Label knn_predict(const LabeledDataset& train, const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t k);

}  // namespace apichain
