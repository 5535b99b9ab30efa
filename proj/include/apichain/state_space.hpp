#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace apichain {

enum class Mode { family, package };

Mode parse_mode(std::string_view text);
std::string_view to_string(Mode m);

inline constexpr std::string_view kSelfDefined = "self-defined";
inline constexpr std::string_view kObfuscated = "obfuscated";

/// An abstract Markov state (family or package name, or one of the two specials).
struct AbstractState {
  std::string name;
  bool operator==(const AbstractState&) const = default;
};

/// Ordered list of state names. The order is the feature-vector layout.
class StateSpace {
 public:
  StateSpace() = default;
  StateSpace(Mode mode, std::vector<std::string> names);

  Mode mode() const noexcept { return mode_; }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Throws when the name is not part of the space.
  std::size_t require(std::string_view name) const;
  std::size_t feature_count() const noexcept { return names_.size() * names_.size(); }

  bool operator==(const StateSpace& other) const { return mode_ == other.mode_ && names_ == other.names_; }

 private:
  Mode mode_ = Mode::family;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace apichain
