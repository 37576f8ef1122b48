#include "honeyttl/ndjson.hpp"

#include <chrono>
#include <ctime>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace honeyttl {

nlohmann::json make_header(std::string_view kind, std::string_view config_digest,
                           const nlohmann::json &extra) {
  nlohmann::json body = extra.is_object() ? extra : nlohmann::json::object();
  body["tool"] = kToolName;
  body["version"] = kToolVersion;
  body["kind"] = kind;
  body["config_digest"] = config_digest;
  body[std::string(kCreatedAtKey)] = utc_timestamp();
  return nlohmann::json{{std::string(kHeaderKey), body}};
}

void write_ndjson_line(std::ostream &out, const nlohmann::json &value) {
  out << value.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

NdjsonDocument read_ndjson(std::istream &in) {
  NdjsonDocument doc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos)
      continue;
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!value.is_object())
      throw std::runtime_error("line " + std::to_string(line_no) + ": not a JSON object");
    if (doc.header.is_null() && doc.lines.empty() && value.size() == 1 &&
        value.contains(kHeaderKey)) {
      doc.header = value[std::string(kHeaderKey)];
      continue;
    }
    doc.lines.push_back(std::move(value));
  }
  return doc;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

} // namespace honeyttl
