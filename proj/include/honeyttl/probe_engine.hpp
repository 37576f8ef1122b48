#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "honeyttl/transport.hpp"

namespace honeyttl {

struct ProbeOptions {
  int max_hops = 64;
  std::chrono::milliseconds per_probe_timeout{2000};
  int retries_per_method = 1; // attempts per method (per hop for traceroute)
  std::vector<ProbeMethod> methods{ProbeMethod::Icmp, ProbeMethod::Udp};
  /// Per-operation overrides; empty means "use methods".
  std::vector<ProbeMethod> ping_methods;
  std::vector<ProbeMethod> trace_methods;
  std::chrono::milliseconds inter_probe_delay{100};
  int concurrency_limit = 16;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;

  const std::vector<ProbeMethod> &effective_ping_methods() const {
    return ping_methods.empty() ? methods : ping_methods;
  }
  const std::vector<ProbeMethod> &effective_trace_methods() const {
    return trace_methods.empty() ? methods : trace_methods;
  }
};

/// Outgoing TTL used for ping probes so that any reachable target answers.
inline constexpr int kPingOutgoingTtl = 255;

struct PingResult {
  int reply_ttl = 0;
  std::chrono::microseconds rtt{0};
  ProbeMethod method = ProbeMethod::Icmp;

  bool operator==(const PingResult &) const = default;
};

struct Hop {
  int position = 0;
  std::optional<Ipv4Address> responder; // nullopt: silent hop

  bool operator==(const Hop &) const = default;
};

struct TraceResult {
  int hop_count = 0;
  bool reached = false;
  ProbeMethod method = ProbeMethod::Icmp;
  std::vector<Hop> hops;

  bool operator==(const TraceResult &) const = default;
};

enum class ProbeError { PingFailed, TraceFailed, BothFailed };

std::string_view to_string(ProbeError error);
std::optional<ProbeError> parse_probe_error(std::string_view text);

struct ProbeOutcome {
  Ipv4Address target;
  std::optional<PingResult> ping;
  std::optional<TraceResult> trace;
  std::optional<ProbeError> error; // derived from ping/trace presence

  bool operator==(const ProbeOutcome &) const = default;
};

/// Tries each method in order with `retries_per_method` attempts each.
/// Throws TransportFault on local failure.
std::optional<PingResult> ping(Ipv4Address target, Transport &transport,
                               const ProbeOptions &options);

/// Incrementing-TTL walk from 1 to max_hops. Stops at the first reply from
/// the target; silent hops are recorded and skipped. A method whose walk does
/// not reach the target is followed by the next method.
std::optional<TraceResult> traceroute(Ipv4Address target, Transport &transport,
                                      const ProbeOptions &options);

/// Ping, pause, traceroute. Target-side failures are folded into the outcome.
ProbeOutcome probe_target(Ipv4Address target, Transport &transport, const ProbeOptions &options);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

struct BatchResult {
  /// Position-aligned with the input. Entries are empty only when a transport
  /// fault cancelled the run before that target finished.
  std::vector<std::optional<ProbeOutcome>> outcomes;
  std::optional<std::string> fault;
};

BatchResult probe_batch(std::span<const Ipv4Address> targets, Transport &transport,
                        const ProbeOptions &options, const ProgressFn &progress = {});

nlohmann::json to_json(const ProbeOutcome &outcome);
ProbeOutcome probe_outcome_from_json(const nlohmann::json &value);

} // namespace honeyttl
