#include "honeyttl/shodan_ingest.hpp"

#include <istream>
#include <iterator>
#include <ostream>
#include <regex>
#include <unordered_map>

#include "honeyttl/gzip.hpp"
#include "honeyttl/ndjson.hpp"
#include "text_util.hpp"

namespace honeyttl {

using nlohmann::json;

namespace {

bool valid_port(int port) { return port >= 1 && port <= 65535; }

} // namespace

json to_json(const DeviceRecord &r) {
  json models = json::array();
  for (const auto &m : r.hardware_models)
    models.push_back({{"model", m.model}, {"vendor", m.vendor}});
  return json{
      {"address", r.address.to_string()},
      {"matched_port", r.matched_port},
      {"all_ports", r.all_ports},
      {"tags", r.tags},
      {"org", r.org},
      {"origin_query", r.origin_query},
      {"raw_banner", r.raw_banner},
      {"hardware_models", std::move(models)},
  };
}

DeviceRecord record_from_json(const json &v) {
  try {
    DeviceRecord r;
    auto address = Ipv4Address::parse(v.at("address").get<std::string>());
    if (!address)
      throw RecordError("address is not a dotted-quad IPv4 address");
    r.address = *address;
    r.matched_port = v.at("matched_port").get<int>();
    if (!valid_port(r.matched_port))
      throw RecordError("matched_port out of range");
    for (int p : v.value("all_ports", json::array())) {
      if (!valid_port(p))
        throw RecordError("all_ports member out of range");
      r.all_ports.insert(p);
    }
    for (const auto &t : v.value("tags", json::array()))
      r.tags.insert(t.get<std::string>());
    r.org = v.value("org", "");
    r.origin_query = v.at("origin_query").get<std::string>();
    if (r.origin_query.empty())
      throw RecordError("origin_query is empty");
    r.raw_banner = v.value("raw_banner", "");
    for (const auto &m : v.value("hardware_models", json::array())) {
      HardwareModel hm{m.at("model").get<std::string>(), m.value("vendor", "Siemens")};
      if (hm.model.empty())
        throw RecordError("hardware model is empty");
      r.hardware_models.insert(std::move(hm));
    }
    return r;
  } catch (const json::exception &e) {
    throw RecordError(std::string("malformed record: ") + e.what());
  }
}

void write_record_file(std::ostream &out, const std::vector<DeviceRecord> &records,
                       const json &header) {
  if (!header.is_null())
    write_ndjson_line(out, header);
  for (const auto &r : records)
    write_ndjson_line(out, to_json(r));
}

std::vector<DeviceRecord> read_record_file(std::istream &in) {
  auto doc = read_ndjson(in);
  std::vector<DeviceRecord> records;
  records.reserve(doc.lines.size());
  for (std::size_t i = 0; i < doc.lines.size(); ++i) {
    try {
      records.push_back(record_from_json(doc.lines[i]));
    } catch (const RecordError &e) {
      throw RecordError("record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return records;
}

std::vector<std::string> default_queries() {
  return {"6ES7", "Technodrome", "Mouser Factory", "[00:13:EA:00:00:00]"};
}

// ---------------------------------------------------------------------------

std::optional<DeviceRecord> record_from_banner(const json &banner, std::string_view origin_query,
                                               ExportParseResult &result) {
  if (!banner.is_object()) {
    ++result.skipped_lines;
    return std::nullopt;
  }
  auto ip_it = banner.find("ip_str");
  if (ip_it == banner.end() || !ip_it->is_string()) {
    if (banner.contains("ipv6"))
      ++result.ipv6_rejected;
    else
      ++result.skipped_lines;
    return std::nullopt;
  }
  const auto ip_text = ip_it->get<std::string>();
  if (ip_text.find(':') != std::string::npos) {
    ++result.ipv6_rejected;
    return std::nullopt;
  }
  auto address = Ipv4Address::parse(ip_text);
  auto port_it = banner.find("port");
  if (!address || port_it == banner.end() || !port_it->is_number_integer()) {
    ++result.skipped_lines;
    return std::nullopt;
  }

  DeviceRecord r;
  r.address = *address;
  r.matched_port = port_it->get<int>();
  if (!valid_port(r.matched_port)) {
    ++result.skipped_lines;
    return std::nullopt;
  }
  if (auto it = banner.find("ports"); it != banner.end() && it->is_array()) {
    for (const auto &p : *it)
      if (p.is_number_integer() && valid_port(p.get<int>()))
        r.all_ports.insert(p.get<int>());
  }
  if (auto it = banner.find("tags"); it != banner.end() && it->is_array()) {
    for (const auto &t : *it)
      if (t.is_string())
        r.tags.insert(t.get<std::string>());
  }
  if (auto it = banner.find("org"); it != banner.end() && it->is_string())
    r.org = it->get<std::string>();
  if (auto it = banner.find("data"); it != banner.end() && it->is_string())
    r.raw_banner = it->get<std::string>();

  r.origin_query = std::string(origin_query);
  if (auto it = banner.find("origin_query"); it != banner.end() && it->is_string() &&
                                             !it->get<std::string>().empty())
    r.origin_query = it->get<std::string>();
  if (r.origin_query.empty()) {
    ++result.skipped_lines;
    return std::nullopt;
  }

  r.hardware_models = extract_hardware_strings(r.raw_banner);
  return r;
}

ExportParseResult parse_export(std::istream &in, std::string_view origin_query) {
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad())
    throw ExportError("export stream is unreadable");

  ExportParseResult result;
  if (looks_gzipped(bytes)) {
    auto inflated = gunzip(bytes);
    result.truncated_stream = inflated.truncated;
    bytes = std::move(inflated.data);
  }

  std::size_t nonblank = 0;
  std::size_t start = 0;
  while (start < bytes.size()) {
    auto end = bytes.find('\n', start);
    if (end == std::string::npos)
      end = bytes.size();
    auto line = detail::trim(std::string_view(bytes).substr(start, end - start));
    start = end + 1;
    if (line.empty())
      continue;
    ++nonblank;
    json banner = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (banner.is_discarded()) {
      ++result.skipped_lines;
      continue;
    }
    if (auto r = record_from_banner(banner, origin_query, result))
      result.records.push_back(std::move(*r));
  }

  if (result.records.empty()) {
    if (nonblank == 0)
      throw ExportError("export contains no lines");
    throw ExportError("export contains no parseable banners (" + std::to_string(nonblank) +
                      " lines rejected)");
  }
  return result;
}

// ---------------------------------------------------------------------------

DedupResult deduplicate(std::vector<DeviceRecord> records) {
  DedupResult out;
  out.stats.total_in = records.size();
  std::unordered_map<std::uint32_t, std::size_t> survivor_of;
  survivor_of.reserve(records.size());

  for (auto &r : records) {
    ++out.stats.per_query_before[r.origin_query];
    auto [it, inserted] = survivor_of.emplace(r.address.value(), out.records.size());
    if (inserted) {
      out.records.push_back(std::move(r));
      continue;
    }
    auto &keep = out.records[it->second];
    keep.tags.insert(r.tags.begin(), r.tags.end());
    keep.hardware_models.insert(r.hardware_models.begin(), r.hardware_models.end());
    keep.all_ports.insert(r.all_ports.begin(), r.all_ports.end());
    if (r.matched_port != keep.matched_port) {
      keep.all_ports.insert(keep.matched_port);
      keep.all_ports.insert(r.matched_port);
    }
  }

  for (const auto &r : out.records)
    ++out.stats.per_query_after[r.origin_query];
  for (const auto &[query, n] : out.stats.per_query_before)
    out.stats.per_query_after.try_emplace(query, 0);
  out.stats.total_out = out.records.size();
  out.stats.removed = out.stats.total_in - out.stats.total_out;
  return out;
}

json to_json(const DedupStats &s) {
  return json{{"total_in", s.total_in},
              {"total_out", s.total_out},
              {"removed", s.removed},
              {"per_query_before", s.per_query_before},
              {"per_query_after", s.per_query_after}};
}

// ---------------------------------------------------------------------------

std::set<HardwareModel> extract_hardware_strings(std::string_view banner) {
  // 6ES7 order numbers: 3-digit family, 5 and 4 alphanumeric groups.
  static const std::regex kOrderNumber(
      R"((?:^|[^0-9A-Za-z])6ES7\s*([0-9]{3})\s*-\s*([0-9A-Za-z]{5})\s*-\s*([0-9A-Za-z]{4})(?![0-9A-Za-z]))",
      std::regex::ECMAScript | std::regex::icase);

  std::set<HardwareModel> models;
  if (banner.empty())
    return models;

  const auto upper_banner = detail::upper(banner);
  std::string vendor = "Siemens";
  if (upper_banner.find("INSEVIS") != std::string::npos)
    vendor = "INSEVIS";
  else if (upper_banner.find("VIPA") != std::string::npos)
    vendor = "VIPA";

  for (auto it = std::sregex_iterator(upper_banner.begin(), upper_banner.end(), kOrderNumber);
       it != std::sregex_iterator(); ++it) {
    const auto &m = *it;
    models.insert(HardwareModel{"6ES7 " + m[1].str() + "-" + m[2].str() + "-" + m[3].str(),
                                vendor});
  }
  return models;
}

bool has_honeypot_tag(const DeviceRecord &record) {
  for (const auto &t : record.tags)
    if (detail::lower(t) == "honeypot")
      return true;
  return false;
}

} // namespace honeyttl
