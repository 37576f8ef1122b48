#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace honeyttl {

enum class FingerprintKind { Device, OperatingSystem };

std::string_view to_string(FingerprintKind kind);

/// A reference initial TTL for a device model or an operating system.
struct Fingerprint {
  std::string label;
  FingerprintKind kind = FingerprintKind::Device;
  int ttl = 0;
  std::optional<std::string> range; // product range, e.g. "S7-1200"

  bool operator==(const Fingerprint &) const = default;
};

/// Raised for any fingerprint table problem. `line()` is 0 when the problem
/// is not tied to a particular input line (e.g. a missing kind).
class FingerprintError : public std::runtime_error {
public:
  FingerprintError(const std::string &what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Immutable, validated collection of fingerprints. Construction enforces
/// TTL range, non-empty labels, unique (label, ttl) pairs and the presence of
/// at least one Device and one OperatingSystem entry.
class FingerprintSet {
public:
  FingerprintSet(std::vector<Fingerprint> entries, std::string provenance);

  std::span<const Fingerprint> entries() const { return entries_; }
  const std::string &provenance() const { return provenance_; }
  std::size_t size() const { return entries_.size(); }

  /// Entries compare equal in order; provenance is ignored.
  bool operator==(const FingerprintSet &other) const { return entries_ == other.entries_; }

private:
  std::vector<Fingerprint> entries_;
  std::string provenance_;
};

/// Siemens S7 reference devices plus the Linux and Windows defaults.
FingerprintSet builtin_set();

/// Parses the `kind,label,ttl[,range]` text format. The result replaces the
/// builtin set; it is never merged with it.
FingerprintSet load_fingerprints(std::istream &in, std::string provenance = "stream");
FingerprintSet load_fingerprints_file(const std::filesystem::path &path);

/// Renders a set back into the text format accepted by load_fingerprints.
std::string serialize_fingerprints(const FingerprintSet &set);

struct MatchResult {
  std::vector<Fingerprint> best; // canonical order: kind, ttl, label
  int distance = 0;
  bool tied_across_kinds = false;
};

/// All fingerprints at minimal absolute distance from `reconstructed`.
/// The result does not depend on the order of entries in `set`.
MatchResult nearest_match(int reconstructed, const FingerprintSet &set);

} // namespace honeyttl
