#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace apichain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `apichain` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

/// Reads `key=value` lines (`#` comments, blank lines ignored).
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

}  // namespace apichain::cli
