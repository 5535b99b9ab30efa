#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "apichain/dataset.hpp"

namespace apichain {

/// CSV with header `app_id,label,epoch,f0,...,f{n-1}`; values use 9 significant digits.
void write_feature_csv(std::ostream& out, const LabeledDataset& d);
void write_feature_csv(const std::filesystem::path& path, const LabeledDataset& d);

LabeledDataset read_feature_csv(std::istream& in);
LabeledDataset read_feature_csv(const std::filesystem::path& path);

/// `%.9g`
std::string format_value(double v);

}  // namespace apichain
