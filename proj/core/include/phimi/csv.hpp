#pragma once

#include <iosfwd>
#include <string>

#include "phimi/sample.hpp"

namespace phimi {

/// Reads two columns of a headed CSV file (RFC 4180 quoting). Empty fields
/// and NA are missing values. For ValueKind::Real every selected field must
/// parse completely as a number.
///
/// Throws IoError (unreadable file), ParseError with the 1-based line number
/// (absent column, malformed row, non-numeric value) and MissingValueError.
PairedSample ingest_csv(const std::string& path, const std::string& x_col,
                        const std::string& y_col, ValueKind kind);
PairedSample ingest_csv(std::istream& in, const std::string& x_col, const std::string& y_col,
                        ValueKind kind);

}  // namespace phimi
