#include "apichain/dataset.hpp"

#include <algorithm>
#include <set>

#include "apichain/error.hpp"

namespace apichain {

Label parse_label(std::string_view text) {
  if (text == "malware") return Label::malware;
  if (text == "benign") return Label::benign;
  throw Error("unknown label '" + std::string(text) + "' (expected benign|malware)");
}

std::string_view to_string(Label l) { return l == Label::malware ? "malware" : "benign"; }

std::size_t LabeledDataset::count(Label l) const { return static_cast<std::size_t>(std::count(y.begin(), y.end(), l)); }

void LabeledDataset::validate() const {
  if (y.size() != rows() || epoch.size() != rows() || app_ids.size() != rows())
    throw Error("dataset fields disagree on the number of rows");
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.X.resize(static_cast<Eigen::Index>(indices.size()), X.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = indices[i];
    if (src >= rows()) throw Error("dataset row index out of range");
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(src));
    out.y.push_back(y[src]);
    out.epoch.push_back(epoch[src]);
    out.app_ids.push_back(app_ids[src]);
  }
  return out;
}

LabeledDataset LabeledDataset::epoch_slice(int e) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rows(); ++i)
    if (epoch[i] == e) idx.push_back(i);
  return subset(idx);
}

std::vector<int> LabeledDataset::epochs() const {
  const std::set<int> s(epoch.begin(), epoch.end());
  return {s.begin(), s.end()};
}

}  // namespace apichain
