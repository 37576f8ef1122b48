#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "honeyttl/ipv4.hpp"

namespace honeyttl {

enum class ProbeMethod { Icmp, Udp };

std::string_view to_string(ProbeMethod method);
std::optional<ProbeMethod> parse_probe_method(std::string_view text);

/// Base UDP destination port; probe n goes to kTracerouteBasePort + n.
inline constexpr int kTracerouteBasePort = 33434;

struct ProbeRequest {
  Ipv4Address target;
  ProbeMethod method = ProbeMethod::Icmp;
  int ttl = 64;      // outgoing IP TTL
  int sequence = 0;  // hop index for traceroute probes, 0 for ping
};

enum class ReplyKind {
  TimeExceeded,     // a router on the path expired the probe
  DestinationReply, // the target itself answered (echo reply / port unreachable)
  Unreachable,      // some other node reported the target unreachable
};

struct ProbeReply {
  ReplyKind kind = ReplyKind::DestinationReply;
  Ipv4Address responder;
  int reply_ttl = 0; // TTL field of the reply IP header as received
  std::chrono::microseconds rtt{0};
};

/// Local misconfiguration (socket creation, permissions). Not a property of
/// the target, so it aborts a probing run instead of becoming an outcome.
class TransportFault : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Sends one probe and waits for the matching reply. Implementations must be
/// safe for concurrent calls.
class Transport {
public:
  virtual ~Transport() = default;

  /// nullopt means nothing matching arrived within `timeout`.
  virtual std::optional<ProbeReply> send_probe(const ProbeRequest &request,
                                               std::chrono::milliseconds timeout) = 0;
};

} // namespace honeyttl
