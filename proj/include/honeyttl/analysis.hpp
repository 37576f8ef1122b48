#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "honeyttl/fingerprint_db.hpp"
#include "honeyttl/probe_engine.hpp"
#include "honeyttl/shodan_ingest.hpp"

namespace honeyttl {

/// Estimated initial TTL: the reply TTL plus the decrements of the return
/// path. The target sits at position hop_count, so a symmetric return path
/// crosses hop_count - 1 routers.
struct ReconstructedTtl {
  int value = 0;
  int ping_ttl = 0;
  int hop_count = 0;

  /// Above any TTL a sender can stamp: strong asymmetry or a TTL-rewriting
  /// middlebox.
  bool anomalous() const { return value > 255; }

  bool operator==(const ReconstructedTtl &) const = default;
};

/// Requires trace.reached; throws std::invalid_argument otherwise.
ReconstructedTtl reconstruct_ttl(const PingResult &ping, const TraceResult &trace);

enum class VerdictKind { Device, Honeypot, Inconclusive };

std::string_view to_string(VerdictKind kind);

struct LocalVerdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  MatchResult matched;
  ReconstructedTtl reconstructed;
};

LocalVerdict classify(const ReconstructedTtl &reconstructed, const FingerprintSet &set);

enum class Category {
  ConsensusHoneypot,
  ConsensusDevice,
  ContentionLocalDevice,   // Local says device, Shodan tags honeypot
  ContentionLocalHoneypot, // Local says honeypot, Shodan silent
  Error,
  Inconclusive,
};

inline constexpr Category kAllCategories[] = {
    Category::ConsensusHoneypot,     Category::ConsensusDevice, Category::ContentionLocalDevice,
    Category::ContentionLocalHoneypot, Category::Error,         Category::Inconclusive,
};

std::string_view to_string(Category category);
std::optional<Category> parse_category(std::string_view text);

using CategorySet = std::set<Category>;
CategorySet consensus_categories();
CategorySet contention_categories();

struct ComparisonOutcome {
  Category category = Category::Error;
  DeviceRecord record;
  std::optional<LocalVerdict> verdict;
  std::optional<ProbeError> probe_error;
};

enum class CompareMode {
  Default,
  Strict, // Inconclusive verdicts count as honeypot
};

/// `verdict` must be present exactly when the probe outcome has no error.
ComparisonOutcome compare(const DeviceRecord &record, const ProbeOutcome &outcome,
                          const std::optional<LocalVerdict> &verdict,
                          CompareMode mode = CompareMode::Default);

struct DatasetAnalysis {
  std::vector<ComparisonOutcome> outcomes; // record order
  std::vector<Ipv4Address> unprobed;       // records with no probe outcome
};

/// Joins records with probe outcomes by address and runs
/// reconstruct/classify/compare on every pair.
DatasetAnalysis analyze_dataset(const std::vector<DeviceRecord> &records,
                                const std::vector<ProbeOutcome> &probes,
                                const FingerprintSet &set, CompareMode mode);

// ---------------------------------------------------------------------------
// Summary tables

struct PortShare {
  int port = 0;
  std::size_t count = 0;
  double percentage = 0; // two-decimal resolution

  bool operator==(const PortShare &) const = default;
};

std::vector<PortShare> port_distribution(const std::vector<ComparisonOutcome> &outcomes,
                                         const CategorySet &filter);

struct ProviderRule {
  std::string needle; // matched case-insensitively against the org string
  std::string bucket;
};

/// Rules are tried in order; the first matching needle wins.
std::vector<ProviderRule> builtin_provider_rules();
/// `needle,Bucket Name` per line; `#` comments and blank lines ignored.
std::vector<ProviderRule> load_provider_rules(std::istream &in);

inline constexpr std::string_view kUnknownProvider = "(unknown)";

std::string provider_bucket(std::string_view org, const std::vector<ProviderRule> &rules);

struct ProviderShare {
  std::string provider;
  std::size_t count = 0;
  double percentage = 0;

  bool operator==(const ProviderShare &) const = default;
};

/// Sorted by provider name.
std::vector<ProviderShare> provider_distribution(const std::vector<ComparisonOutcome> &outcomes,
                                                 const CategorySet &filter,
                                                 const std::vector<ProviderRule> &rules);

struct ModelTtl {
  std::string vendor;
  std::string model;
  double mean_ttl = 0; // rounded to two decimals
  std::size_t samples = 0;

  bool operator==(const ModelTtl &) const = default;
};

std::vector<ModelTtl> average_ttl_by_model(const std::vector<ComparisonOutcome> &outcomes);

/// Splits 100% over `counts` in hundredths by largest remainder, so every
/// share is within 0.01 of its exact value and the shares sum to exactly 100.
std::vector<double> percentage_shares(const std::vector<std::size_t> &counts);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const Fingerprint &fingerprint);
Fingerprint fingerprint_from_json(const nlohmann::json &value);

nlohmann::json to_json(const ComparisonOutcome &outcome);
ComparisonOutcome comparison_from_json(const nlohmann::json &value);

} // namespace honeyttl
