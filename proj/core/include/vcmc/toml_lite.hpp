#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

namespace vcmc {

/// Parses the TOML subset the experiment configs use -- [table] and dotted
/// headers, key = value with strings, integers, floats, booleans, and flat
/// arrays, plus # comments -- into a json object. Errors carry line numbers.
/// Dates, inline tables, arrays of tables, and multiline strings are not
/// supported.
nlohmann::json parse_toml_lite(const std::string& text);

}  // namespace vcmc
