#include "honeyttl/csv.hpp"

namespace honeyttl {

namespace {

bool needs_quotes(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_field(std::string &out, std::string_view field) {
  if (!needs_quotes(field)) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"')
      out += '"';
    out += c;
  }
  out += '"';
}

void append_row(std::string &out, const std::vector<std::string> &row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0)
      out += ',';
    append_field(out, row[i]);
  }
  out += "\r\n";
}

} // namespace

std::string to_csv(const CsvTable &table) {
  std::string out;
  append_row(out, table.header);
  for (const auto &row : table.rows)
    append_row(out, row);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    records.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
    case '"':
      if (!field.empty())
        throw CsvError("quote inside unquoted field");
      in_quotes = true;
      row_started = true;
      break;
    case ',':
      end_field();
      row_started = true;
      break;
    case '\r':
      if (i + 1 < text.size() && text[i + 1] == '\n')
        ++i;
      end_row();
      break;
    case '\n':
      end_row();
      break;
    default:
      field += c;
      row_started = true;
    }
  }
  if (in_quotes)
    throw CsvError("unterminated quoted field");
  if (row_started || !field.empty())
    end_row();

  if (records.empty())
    throw CsvError("missing header row");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size())
      throw CsvError("row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                     " fields, header has " + std::to_string(table.header.size()));
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

} // namespace honeyttl
