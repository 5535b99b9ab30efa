#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "apichain/state_space.hpp"

namespace apichain {

/// Thresholds of the name-mangling heuristic (both must hold).
struct ObfuscationParams {
  std::size_t class_len = 2;
  std::size_t segment_len = 2;
};

/// Recognized API packages with their owning families, in file order.
///
/// Format:
///   @mode-params obfusc_class_len=2 obfusc_seg_len=2
///   family <name> active|inactive
///   package <dotted.prefix> <family>
/// `#` starts a comment line.
class PackageCatalog {
 public:
  struct Package {
    std::string prefix;
    std::size_t family;
  };
  struct Family {
    std::string name;
    bool active;
  };

  static PackageCatalog parse(std::string_view text);
  static PackageCatalog load(const std::filesystem::path& path);

  const std::vector<Package>& packages() const noexcept { return packages_; }
  const std::vector<Family>& families() const noexcept { return families_; }
  const ObfuscationParams& obfuscation() const noexcept { return obfuscation_; }

  /// Longest catalog prefix of `qualified` that ends on a `.`/`$` boundary or at
  /// the end of the string. Returns the package index.
  std::optional<std::size_t> match(std::string_view qualified) const;

  /// family: active families then the specials; package: every package then the specials.
  StateSpace state_space(Mode mode) const;

 private:
  std::vector<Package> packages_;
  std::vector<Family> families_;
  std::unordered_map<std::string, std::size_t> package_index_;
  ObfuscationParams obfuscation_;
};

/// Path of a catalog shipped in the data directory (`catalog_eval.txt`, `catalog_full.txt`).
std::filesystem::path shipped_catalog(std::string_view file_name);

}  // namespace apichain
