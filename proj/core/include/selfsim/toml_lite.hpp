#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

namespace selfsim {

/// Reads the TOML subset used by simulation configs into a JSON tree:
/// comments, bare/quoted/dotted keys, [tables], [[arrays of tables]], basic
/// and literal strings, integers, floats, booleans, arrays (may span lines)
/// and inline tables. Dates and multi-line strings are not supported.
/// Throws DataError with the offending line number.
nlohmann::json parse_toml(std::string_view text);

nlohmann::json load_toml(const std::filesystem::path& path);

}  // namespace selfsim
