#pragma once

// Locale-independent number formatting shared by the CSV and table writers.

#include <cmath>
#include <iomanip>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

namespace lprelay {

/// Shortest-style rendering with `digits` significant digits and a '.' decimal.
inline std::string format_number(double x, int digits = 9) {
  if (x == 0.0) return "0";  // folds -0
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(digits) << x;
  return os.str();
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

}  // namespace lprelay
