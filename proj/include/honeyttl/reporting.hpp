#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "honeyttl/analysis.hpp"
#include "honeyttl/csv.hpp"

namespace honeyttl {

/// hex(SHA-256(salt || address)). Unsalted by default; note that an unsalted
/// hash over the IPv4 space can be reversed by enumeration.
std::string address_hash(Ipv4Address address, std::optional<std::string_view> salt = {});

/// True if `text` contains something shaped like a dotted-quad address.
bool contains_dotted_quad(std::string_view text);

/// Replaces every dotted-quad literal in free text with "ipv4:" plus the first
/// 16 hex digits of its (salted) hash. The result never contains one.
std::string scrub_ipv4_literals(std::string_view text, std::optional<std::string_view> salt = {});

/// Record JSON with "address" replaced by "address_hash"; free-text fields
/// are scrubbed of embedded addresses.
nlohmann::json anonymize(const DeviceRecord &record, std::optional<std::string_view> salt = {});
nlohmann::json anonymize(const ComparisonOutcome &outcome,
                         std::optional<std::string_view> salt = {});

/// Three aligned series sorted by reconstructed TTL (ties by ping TTL, then
/// hop count).
struct TtlSeries {
  std::vector<int> ping_ttl;
  std::vector<int> hop_count;
  std::vector<int> reconstructed;

  std::size_t size() const { return reconstructed.size(); }
};

TtlSeries emit_sorted_ttl_series(const std::vector<ComparisonOutcome> &outcomes,
                                 const CategorySet &filter);

/// Category x origin_query counts. Queries appear in first-seen order.
struct CategorySummary {
  std::vector<std::string> queries;
  std::map<Category, std::vector<std::size_t>> counts; // one column per query
  std::vector<std::size_t> query_totals;
  std::map<Category, std::size_t> category_totals;
  std::size_t total = 0;
};

CategorySummary emit_category_summary(const std::vector<ComparisonOutcome> &outcomes);

CsvTable to_csv_table(const TtlSeries &series);
CsvTable to_csv_table(const CategorySummary &summary);
CsvTable to_csv_table(const std::vector<PortShare> &table);
CsvTable to_csv_table(const std::vector<ProviderShare> &table);
CsvTable to_csv_table(const std::vector<ModelTtl> &table);

std::string format_fixed2(double value);

} // namespace honeyttl
