#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace prv {

using Json = nlohmann::ordered_json;

// 17 significant digits ("%.17g"); reading the text back is bit-exact.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Parses JSON text; on failure throws FormatError carrying line/column.
Json parse_json(std::string_view text, const std::string& source_name);
Json load_json_file(const std::filesystem::path& path);

// Typed accessors that throw FormatError naming the missing/mistyped key.
const Json& require(const Json& obj, std::string_view key, std::string_view context);
double require_number(const Json& obj, std::string_view key, std::string_view context);

}  // namespace prv
