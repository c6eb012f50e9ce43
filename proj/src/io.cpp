#include "pam/io.hpp"

#include <cmath>
#include <cstdio>

namespace pam {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

void JsonLine::key(std::string_view k) {
  if (body_.size() > 1) body_ += ',';
  body_ += json_escape(k);
  body_ += ':';
}

JsonLine& JsonLine::add(std::string_view k, double v) {
  key(k);
  body_ += std::isfinite(v) ? format_double(v) : "null";
  return *this;
}

JsonLine& JsonLine::add(std::string_view k, std::int64_t v) {
  key(k);
  body_ += std::to_string(v);
  return *this;
}

JsonLine& JsonLine::add(std::string_view k, std::uint64_t v) {
  key(k);
  body_ += std::to_string(v);
  return *this;
}

JsonLine& JsonLine::add(std::string_view k, bool v) {
  key(k);
  body_ += v ? "true" : "false";
  return *this;
}

JsonLine& JsonLine::add(std::string_view k, std::string_view v) {
  key(k);
  body_ += json_escape(v);
  return *this;
}

JsonLine& JsonLine::add(std::string_view k, const std::vector<double>& v) {
  key(k);
  body_ += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) body_ += ',';
    body_ += std::isfinite(v[i]) ? format_double(v[i]) : "null";
  }
  body_ += ']';
  return *this;
}

JsonLine& JsonLine::add(std::string_view k, const LatticeSite& site) {
  key(k);
  body_ += '[';
  for (int i = 0; i < site.dim(); ++i) {
    if (i) body_ += ',';
    body_ += std::to_string(site[i]);
  }
  body_ += ']';
  return *this;
}

JsonLine& JsonLine::add_null(std::string_view k) {
  key(k);
  body_ += "null";
  return *this;
}

}  // namespace pam
