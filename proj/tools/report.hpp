#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

namespace usf::cli {

using Json = nlohmann::json;

// Sorted keys, two-space indent, doubles as %.17g, non-finite doubles as null.
// Keys beginning with "timestamp" are written last, one per line, so a plain
// line filter removes them.
void write_json(std::ostream& out, const Json& value);
std::string format_double(double x);

// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

}  // namespace usf::cli
