#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pam/lattice.hpp"

namespace pam {

/// 17 significant digits ("%.17g"); infinities as "inf"/"-inf", NaN as "nan".
std::string format_double(double v);

/// Builds one JSON object with fields in insertion order.
/// Non-finite doubles are written as null.
class JsonLine {
 public:
  JsonLine& add(std::string_view key, double v);
  JsonLine& add(std::string_view key, std::int64_t v);
  JsonLine& add(std::string_view key, std::uint64_t v);
  JsonLine& add(std::string_view key, int v) { return add(key, static_cast<std::int64_t>(v)); }
  JsonLine& add(std::string_view key, bool v);
  JsonLine& add(std::string_view key, std::string_view v);
  JsonLine& add(std::string_view key, const char* v) { return add(key, std::string_view(v)); }
  JsonLine& add(std::string_view key, const std::vector<double>& v);
  JsonLine& add(std::string_view key, const LatticeSite& site);
  JsonLine& add_null(std::string_view key);

  std::string str() const { return body_ + "}"; }

 private:
  void key(std::string_view k);
  std::string body_ = "{";
};

std::string json_escape(std::string_view s);

}  // namespace pam
