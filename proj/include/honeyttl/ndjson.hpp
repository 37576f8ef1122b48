#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace honeyttl {

inline constexpr std::string_view kToolName = "honeyttl";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Key of the self-describing first line of every intermediate file.
inline constexpr std::string_view kHeaderKey = "header";
/// Header field excluded from idempotence comparisons.
inline constexpr std::string_view kCreatedAtKey = "created_at";

/// Builds the header object written as the first line of an NDJSON artifact.
/// `extra` is merged in (sorted-key serialization keeps the line stable).
nlohmann::json make_header(std::string_view kind, std::string_view config_digest,
                           const nlohmann::json &extra = nlohmann::json::object());

/// Serializes one object per line, sorted keys, no whitespace.
void write_ndjson_line(std::ostream &out, const nlohmann::json &value);

struct NdjsonDocument {
  nlohmann::json header;              // null when the file carries none
  std::vector<nlohmann::json> lines;  // every non-header object, in order
};

/// Reads a whole NDJSON artifact. Blank lines are ignored; a malformed line
/// throws std::runtime_error naming the line number.
NdjsonDocument read_ndjson(std::istream &in);

/// Current UTC time as ISO-8601 with second resolution.
std::string utc_timestamp();

} // namespace honeyttl
