#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Locale-independent formatting and small string helpers shared by the
// renderers. Every number that reaches an output document goes through here.
namespace modelcard::text {

/// Fixed notation with `decimals` digits after the point ("0.7500").
std::string fixed(double value, int decimals);

/// Shortest representation that round-trips through parsing ("1e-05", "0.001").
std::string shortest(double value);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Escapes &, <, >, " and ' for HTML/XML text and attribute values.
std::string escape_xml(std::string_view s);

/// Reads a whole file as bytes. Throws MissingFile / IoError.
std::string read_file(const std::filesystem::path& path);

/// Creates `dir` and its parents if missing. Throws IoError.
void ensure_directory(const std::filesystem::path& dir);

/// Writes via a sibling temp file and rename(2), so readers never observe a
/// partially written file. Creates missing parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

} // namespace modelcard::text
