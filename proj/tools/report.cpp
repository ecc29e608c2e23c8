#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace usf::cli {
namespace {

void write_string(std::ostream& out, const std::string& s) { out << Json(s).dump(); }

void write_value(std::ostream& out, const Json& v, int indent) {
  const std::string pad(indent + 2, ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      auto emit = [&](const std::string& key, const Json& item) {
        if (!first) out << ",\n";
        first = false;
        out << pad;
        write_string(out, key);
        out << ": ";
        write_value(out, item, indent + 2);
      };
      // nlohmann's default object is a std::map, so iteration is sorted.
      for (const auto& [key, item] : v.items()) {
        if (key.rfind("timestamp", 0) != 0) emit(key, item);
      }
      for (const auto& [key, item] : v.items()) {
        if (key.rfind("timestamp", 0) == 0) emit(key, item);
      }
      out << "\n" << std::string(indent, ' ') << "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        write_value(out, v[i], indent + 2);
      }
      out << "\n" << std::string(indent, ' ') << "]";
      return;
    }
    case Json::value_t::number_float:
      out << format_double(v.get<double>());
      return;
    default:
      out << v.dump();
  }
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // keep it recognisably a float
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void write_json(std::ostream& out, const Json& value) {
  write_value(out, value, 0);
  out << "\n";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace usf::cli
