#include "json_util.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include "scriptmind/error.hpp"

namespace scriptmind::detail {

namespace {

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

bool is_blank(std::string_view s) noexcept {
  for (char c : s) {
    if (!is_space(c)) return false;
  }
  return true;
}

std::string location(std::string_view source, std::size_t line) {
  return fmt::format("{}:{}", source, line);
}

const json& require(const json& obj, std::string_view key, std::string_view where) {
  if (!obj.is_object()) {
    throw Error(Errc::MalformedRecord, "expected a JSON object", std::string(where));
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(Errc::MalformedRecord, fmt::format("missing field '{}'", key), std::string(where));
  }
  return *it;
}

std::string require_string(const json& obj, std::string_view key, std::string_view where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) {
    throw Error(Errc::MalformedRecord, fmt::format("field '{}' must be a string", key),
                std::string(where));
  }
  return v.get<std::string>();
}

std::int64_t require_int(const json& obj, std::string_view key, std::string_view where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) {
    throw Error(Errc::MalformedRecord, fmt::format("field '{}' must be an integer", key),
                std::string(where));
  }
  return v.get<std::int64_t>();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoError, "cannot open for reading", path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::IoError, "cannot open for writing", tmp.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      throw Error(Errc::IoError, "write failed", tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(Errc::IoError, ec.message(), path.string());
  }
}

std::string format_double(double v) { return fmt::format("{}", v); }

std::string format_fixed(double v, int digits) { return fmt::format("{:.{}f}", v, digits); }

}  // namespace scriptmind::detail
