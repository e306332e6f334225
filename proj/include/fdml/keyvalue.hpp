#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace fdml {

// `key = value` lines; `#` starts a comment; later keys win.
using KeyValueMap = std::map<std::string, std::string>;

KeyValueMap read_key_value_file(const std::filesystem::path& path);
KeyValueMap parse_key_value_text(const std::string& text);

}  // namespace fdml
