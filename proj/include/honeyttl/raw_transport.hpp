#pragma once

#include <atomic>
#include <cstdint>
#include <memory>

#include "honeyttl/transport.hpp"

namespace honeyttl {

/// Real network transport over raw ICMP sockets (CAP_NET_RAW or root).
/// ICMP probes are echo requests; UDP probes go to kTracerouteBasePort +
/// sequence and are answered by port-unreachable errors. Every call opens its
/// own sockets and filters replies by identifier/ports, so concurrent calls
/// do not interfere.
class RawSocketTransport final : public Transport {
public:
  /// Throws TransportFault when a raw socket cannot be opened.
  RawSocketTransport();

  std::optional<ProbeReply> send_probe(const ProbeRequest &request,
                                       std::chrono::milliseconds timeout) override;

private:
  std::optional<ProbeReply> send_icmp(const ProbeRequest &request,
                                      std::chrono::milliseconds timeout);
  std::optional<ProbeReply> send_udp(const ProbeRequest &request,
                                     std::chrono::milliseconds timeout);

  std::uint16_t base_id_;
  std::atomic<std::uint16_t> next_seq_{1};
};

} // namespace honeyttl
