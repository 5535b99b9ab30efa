#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace apichain {

/// Malware is the positive class throughout.
enum class Label { benign = 0, malware = 1 };

Label parse_label(std::string_view text);
std::string_view to_string(Label l);

/// Feature rows with binary labels, epoch tags and app ids.
struct LabeledDataset {
  Eigen::MatrixXd X;
  std::vector<Label> y;
  std::vector<int> epoch;
  std::vector<std::string> app_ids;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(X.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(X.cols()); }
  std::size_t count(Label l) const;

  /// Throws unless every per-row field has one entry per row of X.
  void validate() const;
  LabeledDataset subset(std::span<const std::size_t> indices) const;
  LabeledDataset epoch_slice(int e) const;
  /// Sorted distinct epochs.
  std::vector<int> epochs() const;
};

}  // namespace apichain
