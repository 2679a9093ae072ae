#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace mterm {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kReportSchema = "mterm/1";

// Shortest decimal string that round-trips the double exactly.
std::string fmt_double(double v);

// CSV field quoting: wraps in double quotes when the field contains a comma,
// a quote, or a newline; embedded quotes are doubled.
std::string csv_quote(const std::string& field);

// Common report envelope; no timestamps, so identical inputs give
// byte-identical reports.
nlohmann::json report_skeleton(const std::string& command, std::uint64_t seed,
                               const nlohmann::json& params);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mterm
