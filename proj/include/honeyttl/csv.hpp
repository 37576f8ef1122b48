#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace honeyttl {

/// RFC 4180 table: header row plus data rows, CRLF line endings. Fields are
/// quoted only when they contain a comma, quote, CR or LF.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const CsvTable &) const = default;
};

std::string to_csv(const CsvTable &table);

class CsvError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Inverse of to_csv. The first record is the header; ragged rows throw.
CsvTable parse_csv(std::string_view text);

} // namespace honeyttl
