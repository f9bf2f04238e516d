#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace skewspec {

// Shortest round-trip decimal for a double, capped at 17 significant digits.
// Uses to_chars, so the output is locale-independent and bit-stable.
std::string fmt_g17(double x);

// RFC 4180 quoting: fields containing a comma, quote, CR or LF are wrapped in
// quotes with embedded quotes doubled; everything else passes through.
std::string csv_field(const std::string& s);

// Header plus rows, CRLF line endings, every row padded/checked against the
// header width.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace skewspec
