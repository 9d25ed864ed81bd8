#pragma once
#include <string>
#include <vector>

namespace maxlab {

// Shortest decimal string that round-trips to the exact double (std::to_chars).
std::string format_double(double x);

// RFC 4180 field escaping: quotes a field containing comma, quote, or newline.
std::string csv_escape(const std::string& field);

// Writes header + rows as CSV with CRLF-free line endings ('\n'); all escaping
// via csv_escape. Overwrites. Throws std::runtime_error when the file cannot
// be opened.
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

} // namespace maxlab
