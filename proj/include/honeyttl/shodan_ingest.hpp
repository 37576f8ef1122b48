#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "honeyttl/ipv4.hpp"

namespace honeyttl {

struct HardwareModel {
  std::string model; // normalized, e.g. "6ES7 315-2EH14-0AB0"
  std::string vendor = "Siemens";

  auto operator<=>(const HardwareModel &) const = default;
};

/// One internet host as harvested from Shodan.
struct DeviceRecord {
  Ipv4Address address;
  int matched_port = 0;
  std::set<int> all_ports;
  std::set<std::string> tags;
  std::string org;
  std::string origin_query;
  std::string raw_banner;
  std::set<HardwareModel> hardware_models;

  bool operator==(const DeviceRecord &) const = default;
};

class RecordError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Canonical record serialization: exactly the DeviceRecord fields.
nlohmann::json to_json(const DeviceRecord &record);
/// Inverse of to_json; throws RecordError when an invariant does not hold.
DeviceRecord record_from_json(const nlohmann::json &value);

void write_record_file(std::ostream &out, const std::vector<DeviceRecord> &records,
                       const nlohmann::json &header);
std::vector<DeviceRecord> read_record_file(std::istream &in);

std::vector<std::string> default_queries();

// ---------------------------------------------------------------------------
// Offline exports

struct ExportParseResult {
  std::vector<DeviceRecord> records;
  std::size_t skipped_lines = 0;  // unparseable JSON or invalid banner fields
  std::size_t ipv6_rejected = 0;
  bool truncated_stream = false;  // gzip ended early; decoded prefix was used
};

class ExportError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Newline-delimited Shodan banners, plain or gzip (sniffed by magic bytes).
/// `origin_query` tags records whose line does not carry its own
/// "origin_query" field. Throws ExportError if no line parses.
ExportParseResult parse_export(std::istream &in, std::string_view origin_query);

/// Maps one Shodan banner object. Returns nullopt (and bumps the matching
/// counter in `result`) when the banner cannot become a valid record.
std::optional<DeviceRecord> record_from_banner(const nlohmann::json &banner,
                                               std::string_view origin_query,
                                               ExportParseResult &result);

// ---------------------------------------------------------------------------
// Deduplication

struct DedupStats {
  std::size_t total_in = 0;
  std::size_t total_out = 0;
  std::size_t removed = 0;
  std::map<std::string, std::size_t> per_query_before;
  std::map<std::string, std::size_t> per_query_after;
};

struct DedupResult {
  std::vector<DeviceRecord> records;
  DedupStats stats;
};

/// Address-keyed; the first occurrence survives and absorbs the tags, ports
/// and hardware models of later duplicates.
DedupResult deduplicate(std::vector<DeviceRecord> records);

nlohmann::json to_json(const DedupStats &stats);

// ---------------------------------------------------------------------------
// Banner inspection

std::set<HardwareModel> extract_hardware_strings(std::string_view banner);

bool has_honeypot_tag(const DeviceRecord &record);

// ---------------------------------------------------------------------------
// Live API

class ShodanError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class ShodanAuthError : public ShodanError {
public:
  using ShodanError::ShodanError;
};
class ShodanQuotaError : public ShodanError {
public:
  using ShodanError::ShodanError;
};
/// Transient failures that survived every retry.
class ShodanTransientError : public ShodanError {
public:
  using ShodanError::ShodanError;
};

struct FetchOptions {
  std::string base_url = "https://api.shodan.io";
  std::optional<int> page_limit;          // nullopt: until exhausted
  std::filesystem::path cache_dir = ".shodan-cache";
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::seconds request_timeout{30};
  std::function<void(std::string_view)> log;
};

struct FetchResult {
  std::vector<DeviceRecord> records;
  std::size_t pages_fetched = 0;
  std::size_t pages_from_cache = 0;
  std::size_t malformed_pages = 0;
  std::size_t skipped_banners = 0;
};

/// Shodan results are paged 100 banners at a time.
inline constexpr int kShodanPageSize = 100;

/// Cache file for one result page: "<sha256(query)>-<page>.json".
std::filesystem::path cache_path(const std::filesystem::path &cache_dir, std::string_view query,
                                 int page);

/// Pages through /shodan/host/search. Cached pages are read from disk without
/// touching the network; fresh pages are written to the cache.
FetchResult fetch_query(std::string_view query, std::string_view api_key,
                        const FetchOptions &options);

} // namespace honeyttl
