#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "apichain/dataset.hpp"

namespace apichain {

struct ManifestEntry {
  std::string app_id;
  Label label = Label::benign;
  int epoch = 0;
  std::filesystem::path path;  // as written; relative paths resolve against the manifest directory

  bool operator==(const ManifestEntry&) const = default;
};

/// CSV `app_id,label,epoch,path`.
struct Manifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const ManifestEntry& e) const;
};

/// Validates ids and labels; with check_files, every referenced file must exist
/// (the error lists all missing paths).
Manifest load_manifest(const std::filesystem::path& file, bool check_files = true);
Manifest parse_manifest(std::istream& in, std::filesystem::path base_dir);
void write_manifest(const std::filesystem::path& file, const Manifest& m);
void write_manifest(std::ostream& out, const Manifest& m);

}  // namespace apichain
