#include "prv/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "prv/errors.hpp"

namespace prv {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Json parse_json(std::string_view text, const std::string& source_name) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is the 1-based offset of the offending character.
    const std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw FormatError(source_name + ": malformed JSON at byte " + std::to_string(offset), line,
                      column);
  }
}

Json load_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

const Json& require(const Json& obj, std::string_view key, std::string_view context) {
  if (!obj.is_object()) throw FormatError(std::string(context) + ": expected an object");
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    throw FormatError(std::string(context) + ": missing key '" + std::string(key) + "'");
  }
  return *it;
}

double require_number(const Json& obj, std::string_view key, std::string_view context) {
  const Json& v = require(obj, key, context);
  if (!v.is_number()) {
    throw FormatError(std::string(context) + ": key '" + std::string(key) + "' must be a number");
  }
  return v.get<double>();
}

}  // namespace prv
