#include "apichain/catalog.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "apichain/error.hpp"

namespace apichain {

Mode parse_mode(std::string_view text) {
  if (text == "family") return Mode::family;
  if (text == "package") return Mode::package;
  throw Error("unknown mode '" + std::string(text) + "' (expected family|package)");
}

std::string_view to_string(Mode m) { return m == Mode::family ? "family" : "package"; }

StateSpace::StateSpace(Mode mode, std::vector<std::string> names) : mode_(mode), names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], i).second) throw Error("duplicate state '" + names_[i] + "'");
  }
}

std::optional<std::size_t> StateSpace::index_of(std::string_view name) const {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  return std::nullopt;
}

std::size_t StateSpace::require(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw Error("state '" + std::string(name) + "' is not in the " + std::string(to_string(mode_)) +
              " state space");
}

namespace {

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

std::size_t parse_threshold(const std::string& value, std::size_t line_no, const std::string& line) {
  try {
    std::size_t used = 0;
    const auto v = std::stoul(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(line_no, line, "bad threshold value");
}

}  // namespace

PackageCatalog PackageCatalog::parse(std::string_view text) {
  PackageCatalog c;
  std::unordered_map<std::string, std::size_t> family_index;
  struct PendingPackage {
    std::string prefix;
    std::string family;
    std::size_t line_no;
    std::string line;
  };
  std::vector<PendingPackage> pending;

  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto words = split_words(line);
    if (words.empty() || words[0].front() == '#') continue;
    const auto& kind = words[0];
    if (kind == "@mode-params") {
      for (std::size_t i = 1; i < words.size(); ++i) {
        const auto eq = words[i].find('=');
        if (eq == std::string::npos) throw ParseError(line_no, line, "expected key=value");
        const auto key = words[i].substr(0, eq);
        const auto value = parse_threshold(words[i].substr(eq + 1), line_no, line);
        if (key == "obfusc_class_len") {
          c.obfuscation_.class_len = value;
        } else if (key == "obfusc_seg_len") {
          c.obfuscation_.segment_len = value;
        } else {
          throw ParseError(line_no, line, "unknown mode parameter '" + key + "'");
        }
      }
    } else if (kind == "family") {
      if (words.size() != 3 || (words[2] != "active" && words[2] != "inactive"))
        throw ParseError(line_no, line, "expected 'family <name> active|inactive'");
      if (words[1] == kSelfDefined || words[1] == kObfuscated)
        throw ParseError(line_no, line, "reserved family name");
      if (!family_index.emplace(words[1], c.families_.size()).second)
        throw ParseError(line_no, line, "duplicate family");
      c.families_.push_back({words[1], words[2] == "active"});
    } else if (kind == "package") {
      if (words.size() != 3) throw ParseError(line_no, line, "expected 'package <prefix> <family>'");
      pending.push_back({words[1], words[2], line_no, line});
    } else {
      throw ParseError(line_no, line, "unknown catalog directive");
    }
  }

  for (auto& p : pending) {
    const auto fam = family_index.find(p.family);
    if (fam == family_index.end()) throw ParseError(p.line_no, p.line, "unknown family tag '" + p.family + "'");
    if (p.prefix.empty() || p.prefix.front() == '.' || p.prefix.back() == '.' ||
        p.prefix.find("..") != std::string::npos)
      throw ParseError(p.line_no, p.line, "malformed package prefix");
    if (!c.package_index_.emplace(p.prefix, c.packages_.size()).second)
      throw ParseError(p.line_no, p.line, "duplicate package");
    c.packages_.push_back({std::move(p.prefix), fam->second});
  }
  return c;
}

PackageCatalog PackageCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open catalog '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ParseError& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::optional<std::size_t> PackageCatalog::match(std::string_view qualified) const {
  std::size_t end = qualified.size();
  while (true) {
    if (auto it = package_index_.find(std::string(qualified.substr(0, end))); it != package_index_.end())
      return it->second;
    const auto boundary = qualified.substr(0, end).find_last_of(".$");
    if (boundary == std::string_view::npos) return std::nullopt;
    end = boundary;
  }
}

StateSpace PackageCatalog::state_space(Mode mode) const {
  std::vector<std::string> names;
  if (mode == Mode::family) {
    for (const auto& f : families_)
      if (f.active) names.push_back(f.name);
  } else {
    for (const auto& p : packages_) names.push_back(p.prefix);
  }
  names.emplace_back(kSelfDefined);
  names.emplace_back(kObfuscated);
  return StateSpace(mode, std::move(names));
}

std::filesystem::path shipped_catalog(std::string_view file_name) {
  if (const char* dir = std::getenv("APICHAIN_DATA_DIR"); dir && *dir)
    return std::filesystem::path(dir) / file_name;
  return std::filesystem::path(APICHAIN_DATA_DIR) / file_name;
}

}  // namespace apichain
