#include "fdml/keyvalue.hpp"

#include <fstream>
#include <sstream>

#include "fdml/error.hpp"
#include "fdml/text_io.hpp"

namespace fdml {

KeyValueMap parse_key_value_text(const std::string& text) {
  KeyValueMap out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::config, "line " + std::to_string(line_no) + ": expected key=value, got '" + t + "'");
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::config, "line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return out;
}

KeyValueMap read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_value_text(ss.str());
}

}  // namespace fdml
