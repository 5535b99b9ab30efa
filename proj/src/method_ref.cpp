#include "apichain/method_ref.hpp"

#include <algorithm>
#include <cctype>

#include "apichain/error.hpp"

namespace apichain {
namespace {

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

[[noreturn]] void fail(std::string_view text, const std::string& why) {
  throw Error("malformed signature '" + std::string(text) + "': " + why);
}

}  // namespace

std::string MethodRef::qualified_class() const { return package + "." + class_name; }

std::string MethodRef::render() const {
  std::string out = qualified_class();
  out += ": ";
  out += return_type;
  out += ' ';
  out += method_name;
  out += '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ',';
    out += params[i];
  }
  out += ')';
  return out;
}

std::string MethodRef::api_call() const { return qualified_class() + ": " + method_name; }

MethodRef parse_method_ref(std::string_view text) {
  const auto colon = text.find(": ");
  if (colon == std::string_view::npos) fail(text, "missing ': ' after class");
  const std::string_view qualified = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 2);

  if (qualified.empty() || has_space(qualified)) fail(text, "bad qualified class name");
  const auto dot = qualified.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == qualified.size())
    fail(text, "class must be qualified by a package");

  MethodRef m;
  m.package = std::string(qualified.substr(0, dot));
  m.class_name = std::string(qualified.substr(dot + 1));
  std::size_t start = 0;
  while (start <= m.package.size()) {
    const auto end = std::min(m.package.find('.', start), m.package.size());
    if (end == start) fail(text, "empty package segment");
    start = end + 1;
  }

  const auto space = rest.find(' ');
  if (space == std::string_view::npos || space == 0) fail(text, "missing return type");
  m.return_type = std::string(rest.substr(0, space));
  const std::string_view call = rest.substr(space + 1);
  const auto open = call.find('(');
  if (open == std::string_view::npos || open == 0) fail(text, "missing method name or '('");
  if (call.back() != ')') fail(text, "parameter list must end with ')'");
  m.method_name = std::string(call.substr(0, open));
  if (has_space(m.method_name)) fail(text, "whitespace in method name");

  const std::string_view plist = call.substr(open + 1, call.size() - open - 2);
  if (has_space(plist) || plist.find_first_of("()") != std::string_view::npos)
    fail(text, "bad parameter list");
  if (!plist.empty()) {
    std::size_t p = 0;
    while (true) {
      const auto comma = plist.find(',', p);
      const auto param = plist.substr(p, comma == std::string_view::npos ? plist.size() - p : comma - p);
      if (param.empty()) fail(text, "empty parameter type");
      m.params.emplace_back(param);
      if (comma == std::string_view::npos) break;
      p = comma + 1;
    }
  }
  return m;
}

}  // namespace apichain
