#include "apichain/manifest.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "apichain/error.hpp"

namespace apichain {

std::filesystem::path Manifest::resolve(const ManifestEntry& e) const {
  return e.path.is_absolute() ? e.path : base_dir / e.path;
}

Manifest parse_manifest(std::istream& in, std::filesystem::path base_dir) {
  Manifest m;
  m.base_dir = std::move(base_dir);
  std::string line;
  if (!std::getline(in, line)) throw Error("manifest is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "app_id,label,epoch,path") throw Error("manifest header must be 'app_id,label,epoch,path'");

  std::unordered_set<std::string> ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string field; std::getline(ss, field, ',');) f.push_back(field);
    if (f.size() != 4) throw ParseError(line_no, line, "expected 4 manifest fields");
    ManifestEntry e;
    e.app_id = f[0];
    if (e.app_id.empty()) throw ParseError(line_no, line, "empty app_id");
    if (!ids.insert(e.app_id).second) throw Error("duplicate app_id '" + e.app_id + "' in manifest");
    try {
      e.label = parse_label(f[1]);
    } catch (const Error& err) {
      throw ParseError(line_no, line, err.what());
    }
    const auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), e.epoch);
    if (ec != std::errc{} || ptr != f[2].data() + f[2].size()) throw ParseError(line_no, line, "bad epoch");
    if (f[3].empty()) throw ParseError(line_no, line, "empty path");
    e.path = f[3];
    m.entries.push_back(std::move(e));
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& file, bool check_files) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open manifest '" + file.string() + "'");
  Manifest m = parse_manifest(in, file.parent_path());
  if (check_files) {
    std::string missing;
    for (const auto& e : m.entries) {
      if (!std::filesystem::exists(m.resolve(e))) missing += "\n  " + m.resolve(e).string();
    }
    if (!missing.empty()) throw Error("manifest references missing call-graph files:" + missing);
  }
  return m;
}

void write_manifest(std::ostream& out, const Manifest& m) {
  out << "app_id,label,epoch,path\n";
  for (const auto& e : m.entries)
    out << e.app_id << ',' << to_string(e.label) << ',' << e.epoch << ',' << e.path.generic_string() << '\n';
}

void write_manifest(const std::filesystem::path& file, const Manifest& m) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write manifest '" + file.string() + "'");
  write_manifest(out, m);
}

}  // namespace apichain
