#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>

namespace skewprod {

/// Shortest round-trip decimal form of v ("nan", "inf", "-inf" for non-finite).
std::string num(double v);
std::string num(std::int64_t v);
std::string num(std::uint64_t v);
inline std::string num(int v) { return num(static_cast<std::int64_t>(v)); }

/// Comma-joined line terminated by '\n'. Fields are written verbatim.
void write_row(std::ostream& os, std::initializer_list<std::string> fields);

/// Opens path for writing; throws std::runtime_error on failure.
std::ofstream open_output(const std::string& path);

}  // namespace skewprod
