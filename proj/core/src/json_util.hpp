#pragma once

// Internal helpers shared by the JSON/JSONL readers and writers.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace scriptmind::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string trim(std::string_view s);
bool is_blank(std::string_view s) noexcept;

std::string location(std::string_view source, std::size_t line);

// Typed field access; throws Error(code, ..., where) on a missing or
// mistyped field.
const json& require(const json& obj, std::string_view key, std::string_view where);
std::string require_string(const json& obj, std::string_view key, std::string_view where);
std::int64_t require_int(const json& obj, std::string_view key, std::string_view where);

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary sibling and rename so readers never see a partial file.
void write_file(const std::filesystem::path& path, std::string_view contents);

// Shortest round-trip decimal for doubles; stable across runs.
std::string format_double(double v);
std::string format_fixed(double v, int digits);

}  // namespace scriptmind::detail
