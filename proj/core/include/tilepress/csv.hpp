#pragma once

#include <string>
#include <vector>

namespace tilepress {

/// binary64 value with 17 significant digits ('.' decimal separator, locale
/// independent): round-trips exactly.
std::string fmt17(double v);

/// RFC 4180 field quoting.
std::string csv_escape(const std::string& field);

/// Writes header + rows with CRLF line endings. Deterministic byte output for
/// identical inputs.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

} // namespace tilepress
