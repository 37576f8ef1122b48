#include "honeyttl/reporting.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <tuple>

#include "honeyttl/digest.hpp"

namespace honeyttl {

using nlohmann::json;

namespace {

const std::regex &dotted_quad_pattern() {
  static const std::regex re(R"((^|[^0-9])([0-9]{1,3}\.[0-9]{1,3}\.[0-9]{1,3}\.[0-9]{1,3})(?![0-9]))");
  return re;
}

std::string salted(std::string_view text, std::optional<std::string_view> salt) {
  std::string input;
  if (salt)
    input += *salt;
  input += text;
  return input;
}

} // namespace

std::string address_hash(Ipv4Address address, std::optional<std::string_view> salt) {
  return sha256_hex(salted(address.to_string(), salt));
}

bool contains_dotted_quad(std::string_view text) {
  return std::regex_search(text.begin(), text.end(), dotted_quad_pattern());
}

std::string scrub_ipv4_literals(std::string_view text, std::optional<std::string_view> salt) {
  std::string current(text);
  // A token ending in hex digits can combine with trailing ".N.N.N" into a new
  // literal, so repeat until clean. Each pass removes dots, so this terminates.
  while (contains_dotted_quad(current)) {
    std::string out;
    auto begin = current.cbegin();
    std::smatch m;
    while (std::regex_search(begin, current.cend(), m, dotted_quad_pattern())) {
      out.append(begin, m[2].first);
      out += "ipv4:" + sha256_hex(salted(m[2].str(), salt)).substr(0, 16);
      begin = m[2].second;
    }
    out.append(begin, current.cend());
    current = std::move(out);
  }
  return current;
}

json anonymize(const DeviceRecord &record, std::optional<std::string_view> salt) {
  json j = to_json(record);
  j.erase("address");
  j["address_hash"] = address_hash(record.address, salt);
  j["raw_banner"] = scrub_ipv4_literals(record.raw_banner, salt);
  j["org"] = scrub_ipv4_literals(record.org, salt);
  j["origin_query"] = scrub_ipv4_literals(record.origin_query, salt);
  return j;
}

json anonymize(const ComparisonOutcome &outcome, std::optional<std::string_view> salt) {
  json j = to_json(outcome);
  j["record"] = anonymize(outcome.record, salt);
  return j;
}

TtlSeries emit_sorted_ttl_series(const std::vector<ComparisonOutcome> &outcomes,
                                 const CategorySet &filter) {
  std::vector<std::tuple<int, int, int>> rows; // reconstructed, ping, hops
  for (const auto &o : outcomes) {
    if (!filter.contains(o.category) || !o.verdict)
      continue;
    const auto &r = o.verdict->reconstructed;
    rows.emplace_back(r.value, r.ping_ttl, r.hop_count);
  }
  std::sort(rows.begin(), rows.end());

  TtlSeries series;
  for (const auto &[value, ping_ttl, hops] : rows) {
    series.reconstructed.push_back(value);
    series.ping_ttl.push_back(ping_ttl);
    series.hop_count.push_back(hops);
  }
  return series;
}

CategorySummary emit_category_summary(const std::vector<ComparisonOutcome> &outcomes) {
  CategorySummary s;
  for (auto c : kAllCategories) {
    s.counts[c];
    s.category_totals[c] = 0;
  }
  for (const auto &o : outcomes) {
    const auto &q = o.record.origin_query;
    auto it = std::find(s.queries.begin(), s.queries.end(), q);
    std::size_t col = static_cast<std::size_t>(it - s.queries.begin());
    if (it == s.queries.end()) {
      s.queries.push_back(q);
      s.query_totals.push_back(0);
      for (auto &[c, column] : s.counts)
        column.push_back(0);
    }
    ++s.counts[o.category][col];
    ++s.query_totals[col];
    ++s.category_totals[o.category];
    ++s.total;
  }
  return s;
}

std::string format_fixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

CsvTable to_csv_table(const TtlSeries &series) {
  CsvTable t{{"ping_ttl", "hop_count", "reconstructed_ttl"}, {}};
  for (std::size_t i = 0; i < series.size(); ++i)
    t.rows.push_back({std::to_string(series.ping_ttl[i]), std::to_string(series.hop_count[i]),
                      std::to_string(series.reconstructed[i])});
  return t;
}

CsvTable to_csv_table(const CategorySummary &s) {
  CsvTable t;
  t.header.push_back("origin_query");
  for (auto c : kAllCategories)
    t.header.emplace_back(to_string(c));
  t.header.push_back("total");
  for (std::size_t q = 0; q < s.queries.size(); ++q) {
    std::vector<std::string> row{s.queries[q]};
    for (auto c : kAllCategories)
      row.push_back(std::to_string(s.counts.at(c)[q]));
    row.push_back(std::to_string(s.query_totals[q]));
    t.rows.push_back(std::move(row));
  }
  std::vector<std::string> totals{"total"};
  for (auto c : kAllCategories)
    totals.push_back(std::to_string(s.category_totals.at(c)));
  totals.push_back(std::to_string(s.total));
  t.rows.push_back(std::move(totals));
  return t;
}

CsvTable to_csv_table(const std::vector<PortShare> &table) {
  CsvTable t{{"port", "count", "percentage"}, {}};
  for (const auto &r : table)
    t.rows.push_back({std::to_string(r.port), std::to_string(r.count), format_fixed2(r.percentage)});
  return t;
}

CsvTable to_csv_table(const std::vector<ProviderShare> &table) {
  CsvTable t{{"provider", "count", "percentage"}, {}};
  for (const auto &r : table)
    t.rows.push_back({r.provider, std::to_string(r.count), format_fixed2(r.percentage)});
  return t;
}

CsvTable to_csv_table(const std::vector<ModelTtl> &table) {
  CsvTable t{{"vendor", "model", "mean_ttl", "sample_count"}, {}};
  for (const auto &r : table)
    t.rows.push_back({r.vendor, r.model, format_fixed2(r.mean_ttl), std::to_string(r.samples)});
  return t;
}

} // namespace honeyttl
