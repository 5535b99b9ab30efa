#include "apichain/feature_csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "apichain/error.hpp"

namespace apichain {

std::string format_value(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.9g", v);
  return {buf, static_cast<std::size_t>(n)};
}

void write_feature_csv(std::ostream& out, const LabeledDataset& d) {
  d.validate();
  std::string line = "app_id,label,epoch";
  for (std::size_t j = 0; j < d.cols(); ++j) line += ",f" + std::to_string(j);
  out << line << '\n';
  for (std::size_t i = 0; i < d.rows(); ++i) {
    line = d.app_ids[i];
    line += ',';
    line += to_string(d.y[i]);
    line += ',';
    line += std::to_string(d.epoch[i]);
    for (std::size_t j = 0; j < d.cols(); ++j) {
      line += ',';
      line += format_value(d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out << line << '\n';
  }
}

void write_feature_csv(const std::filesystem::path& path, const LabeledDataset& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_feature_csv(out, d);
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

}  // namespace

LabeledDataset read_feature_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error("feature CSV is empty");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const auto cols = split_commas(header);
  if (cols.size() < 3 || cols[0] != "app_id" || cols[1] != "label" || cols[2] != "epoch")
    throw Error("feature CSV header must start with app_id,label,epoch");
  const std::size_t d = cols.size() - 3;
  for (std::size_t j = 0; j < d; ++j)
    if (cols[j + 3] != "f" + std::to_string(j)) throw Error("feature CSV column " + std::to_string(j + 3) + " is not f" + std::to_string(j));

  LabeledDataset out;
  std::vector<double> values;
  std::size_t line_no = 1;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != cols.size()) throw ParseError(line_no, line.substr(0, 80), "wrong number of fields");
    out.app_ids.emplace_back(fields[0]);
    out.y.push_back(parse_label(fields[1]));
    int epoch = 0;
    if (std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), epoch).ec != std::errc{})
      throw ParseError(line_no, std::string(fields[2]), "bad epoch");
    out.epoch.push_back(epoch);
    for (std::size_t j = 0; j < d; ++j) {
      const auto f = fields[j + 3];
      double v = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size()) throw ParseError(line_no, std::string(f), "bad feature value");
      values.push_back(v);
    }
  }
  const auto n = static_cast<Eigen::Index>(out.app_ids.size());
  out.X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, static_cast<Eigen::Index>(d));
  return out;
}

LabeledDataset read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open feature CSV '" + path.string() + "'");
  return read_feature_csv(in);
}

}  // namespace apichain
