#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace apichain {

/// A fully qualified method signature: `<package>.<Class>: <ret> <name>(<params>)`.
struct MethodRef {
  std::string package;
  std::string class_name;
  std::string return_type;
  std::string method_name;
  std::vector<std::string> params;

  /// `package.Class`
  std::string qualified_class() const;
  /// Canonical rendering; parse_method_ref(render()) == *this.
  std::string render() const;
  /// `package.Class: name`, the raw-call key used by frequency analysis.
  std::string api_call() const;

  auto operator<=>(const MethodRef&) const = default;
  bool operator==(const MethodRef&) const = default;
};

/// Parses one signature. Throws apichain::Error describing the first violation.
MethodRef parse_method_ref(std::string_view text);

}  // namespace apichain
