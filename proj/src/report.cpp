#include "skewspec/report.hpp"

#include <charconv>
#include <cmath>

#include "skewspec/errors.hpp"

namespace skewspec {

std::string fmt_g17(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  bool needs_quotes = s.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return s;
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  require(!header.empty(), "write_csv: header must be nonempty");
  auto emit = [&os](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << csv_field(cells[i]);
    }
    os << "\r\n";
  };
  emit(header);
  for (const auto& row : rows) {
    require(row.size() == header.size(), "write_csv: row width does not match header");
    emit(row);
  }
}

}  // namespace skewspec
