#ifndef OCCUSCORE_CSV_HPP
#define OCCUSCORE_CSV_HPP

// Minimal CSV emission: header row, UTF-8, '.' decimal separator,
// 6 significant digits for reals.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace occuscore::csv {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string fmt(int v) { return std::to_string(v); }

struct Writer {
  std::ofstream out;

  Writer(const std::string& path, const std::string& header) : out(path, std::ios::binary) {
    if (!out) throw std::ios_base::failure("cannot open output file: " + path);
    out << header << "\n";
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ",";
      out << fields[i];
    }
    out << "\n";
  }
};

}  // namespace occuscore::csv

#endif
