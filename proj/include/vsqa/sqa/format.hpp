#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace vsqa::sqa {

enum class Unit { None, Volts, Hertz, Seconds, Radians };

/// Two decimals, except whole-number hertz which print without a fraction ("50").
/// The unit word is not appended; templates add it.
inline std::string format_quantity(double value, Unit unit) {
  if (!std::isfinite(value)) throw std::invalid_argument("cannot format a non-finite quantity");
  char buf[64];
  if (unit == Unit::Hertz && value == std::round(value) && std::abs(value) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", value);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", value);
  }
  std::string s(buf);
  if (s == "-0.00" || s == "-0") s.erase(0, 1);
  return s;
}

/// "[a, b, c]" with each entry formatted by format_quantity.
inline std::string format_list(const std::vector<double>& values, Unit unit) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_quantity(values[i], unit);
  }
  return out + "]";
}

}  // namespace vsqa::sqa
