#include "honeyttl/raw_transport.hpp"

#include <array>
#include <cerrno>
#include <cstring>
#include <string>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace honeyttl {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint8_t kIcmpEchoReply = 0;
constexpr std::uint8_t kIcmpUnreachable = 3;
constexpr std::uint8_t kIcmpEchoRequest = 8;
constexpr std::uint8_t kIcmpTimeExceeded = 11;

class Socket {
public:
  Socket(int domain, int type, int protocol) : fd_(::socket(domain, type, protocol)) {
    if (fd_ < 0)
      throw TransportFault(std::string("socket(): ") + std::strerror(errno) +
                           "; raw probing needs root or CAP_NET_RAW "
                           "(e.g. setcap cap_net_raw+ep honeyttl)");
  }
  Socket(const Socket &) = delete;
  Socket &operator=(const Socket &) = delete;
  ~Socket() {
    if (fd_ >= 0)
      ::close(fd_);
  }
  int fd() const { return fd_; }

  void set_ttl(int ttl) const {
    if (::setsockopt(fd_, IPPROTO_IP, IP_TTL, &ttl, sizeof ttl) < 0)
      throw TransportFault(std::string("setsockopt(IP_TTL): ") + std::strerror(errno));
  }

private:
  int fd_;
};

std::uint16_t checksum(const std::uint8_t *data, std::size_t len) {
  std::uint32_t sum = 0;
  for (std::size_t i = 0; i + 1 < len; i += 2)
    sum += static_cast<std::uint32_t>(data[i] << 8 | data[i + 1]);
  if (len & 1)
    sum += static_cast<std::uint32_t>(data[len - 1] << 8);
  while (sum >> 16)
    sum = (sum & 0xFFFF) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

std::uint16_t be16(const std::uint8_t *p) { return static_cast<std::uint16_t>(p[0] << 8 | p[1]); }
std::uint32_t be32(const std::uint8_t *p) {
  return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 | std::uint32_t(p[2]) << 8 | p[3];
}

sockaddr_in to_sockaddr(Ipv4Address address, int port = 0) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(static_cast<std::uint16_t>(port));
  sa.sin_addr.s_addr = htonl(address.value());
  return sa;
}

/// Parsed view of one received IPv4+ICMP datagram.
struct IcmpView {
  int ttl = 0;
  Ipv4Address source;
  std::uint8_t type = 0;
  const std::uint8_t *icmp = nullptr;
  std::size_t icmp_len = 0;
  // Quoted datagram for error messages.
  const std::uint8_t *inner_ip = nullptr;
  std::size_t inner_len = 0;

  std::uint8_t inner_protocol() const { return inner_ip[9]; }
  Ipv4Address inner_destination() const { return Ipv4Address(be32(inner_ip + 16)); }
  const std::uint8_t *inner_payload() const { return inner_ip + (inner_ip[0] & 0x0F) * 4; }
  bool inner_has_transport_header() const {
    return inner_ip && inner_len >= static_cast<std::size_t>((inner_ip[0] & 0x0F) * 4 + 8);
  }
};

std::optional<IcmpView> parse_icmp(const std::uint8_t *buf, std::size_t len) {
  if (len < 20)
    return std::nullopt;
  const std::size_t ihl = (buf[0] & 0x0F) * 4u;
  if (ihl < 20 || len < ihl + 8)
    return std::nullopt;
  IcmpView v;
  v.ttl = buf[8];
  v.source = Ipv4Address(be32(buf + 12));
  v.icmp = buf + ihl;
  v.icmp_len = len - ihl;
  v.type = v.icmp[0];
  if ((v.type == kIcmpUnreachable || v.type == kIcmpTimeExceeded) && v.icmp_len >= 8 + 20) {
    v.inner_ip = v.icmp + 8;
    v.inner_len = v.icmp_len - 8;
  }
  return v;
}

ReplyKind error_kind(const IcmpView &v, Ipv4Address target) {
  if (v.type == kIcmpTimeExceeded)
    return ReplyKind::TimeExceeded;
  return v.source == target ? ReplyKind::DestinationReply : ReplyKind::Unreachable;
}

/// Waits until `fd` is readable or the deadline passes.
bool wait_readable(int fd, Clock::time_point deadline) {
  auto remaining =
      std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  if (remaining <= 0)
    return false;
  pollfd p{fd, POLLIN, 0};
  int rc = ::poll(&p, 1, static_cast<int>(remaining));
  return rc > 0 && (p.revents & POLLIN);
}

} // namespace

RawSocketTransport::RawSocketTransport()
    : base_id_(static_cast<std::uint16_t>(::getpid() & 0xFFFF)) {
  Socket probe(AF_INET, SOCK_RAW, IPPROTO_ICMP); // fail early without privileges
}

std::optional<ProbeReply> RawSocketTransport::send_probe(const ProbeRequest &request,
                                                         std::chrono::milliseconds timeout) {
  return request.method == ProbeMethod::Icmp ? send_icmp(request, timeout)
                                             : send_udp(request, timeout);
}

std::optional<ProbeReply> RawSocketTransport::send_icmp(const ProbeRequest &request,
                                                        std::chrono::milliseconds timeout) {
  Socket sock(AF_INET, SOCK_RAW, IPPROTO_ICMP);
  sock.set_ttl(request.ttl);

  const std::uint16_t id = base_id_;
  const std::uint16_t seq = next_seq_.fetch_add(1);
  std::array<std::uint8_t, 24> packet{};
  packet[0] = kIcmpEchoRequest;
  packet[4] = static_cast<std::uint8_t>(id >> 8);
  packet[5] = static_cast<std::uint8_t>(id);
  packet[6] = static_cast<std::uint8_t>(seq >> 8);
  packet[7] = static_cast<std::uint8_t>(seq);
  std::memcpy(packet.data() + 8, "honeyttl-probe-0", 16);
  const auto sum = checksum(packet.data(), packet.size());
  packet[2] = static_cast<std::uint8_t>(sum >> 8);
  packet[3] = static_cast<std::uint8_t>(sum);

  auto dest = to_sockaddr(request.target);
  const auto sent_at = Clock::now();
  if (::sendto(sock.fd(), packet.data(), packet.size(), 0, reinterpret_cast<sockaddr *>(&dest),
               sizeof dest) < 0) {
    if (errno == EPERM || errno == EACCES)
      throw TransportFault(std::string("sendto(): ") + std::strerror(errno));
    return std::nullopt; // e.g. EHOSTUNREACH: no answer to report
  }

  const auto deadline = sent_at + timeout;
  std::array<std::uint8_t, 1500> buf{};
  while (wait_readable(sock.fd(), deadline)) {
    const auto n = ::recv(sock.fd(), buf.data(), buf.size(), 0);
    if (n <= 0)
      continue;
    auto v = parse_icmp(buf.data(), static_cast<std::size_t>(n));
    if (!v)
      continue;
    const auto rtt = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - sent_at);

    if (v->type == kIcmpEchoReply) {
      if (v->source == request.target && be16(v->icmp + 4) == id && be16(v->icmp + 6) == seq)
        return ProbeReply{ReplyKind::DestinationReply, v->source, v->ttl, rtt};
      continue;
    }
    if (!v->inner_has_transport_header() || v->inner_protocol() != IPPROTO_ICMP ||
        v->inner_destination() != request.target)
      continue;
    const auto *inner = v->inner_payload();
    if (inner[0] != kIcmpEchoRequest || be16(inner + 4) != id || be16(inner + 6) != seq)
      continue;
    return ProbeReply{error_kind(*v, request.target), v->source, v->ttl, rtt};
  }
  return std::nullopt;
}

std::optional<ProbeReply> RawSocketTransport::send_udp(const ProbeRequest &request,
                                                       std::chrono::milliseconds timeout) {
  Socket icmp(AF_INET, SOCK_RAW, IPPROTO_ICMP);
  Socket udp(AF_INET, SOCK_DGRAM, IPPROTO_UDP);

  auto local = to_sockaddr(Ipv4Address(0));
  if (::bind(udp.fd(), reinterpret_cast<sockaddr *>(&local), sizeof local) < 0)
    throw TransportFault(std::string("bind(): ") + std::strerror(errno));
  socklen_t local_len = sizeof local;
  ::getsockname(udp.fd(), reinterpret_cast<sockaddr *>(&local), &local_len);
  const std::uint16_t src_port = ntohs(local.sin_port);
  const int dst_port = kTracerouteBasePort + request.sequence;
  udp.set_ttl(request.ttl);
  const int on = 1;
  ::setsockopt(udp.fd(), IPPROTO_IP, IP_RECVTTL, &on, sizeof on);

  auto dest = to_sockaddr(request.target, dst_port);
  static constexpr char kPayload[] = "honeyttl-udp";
  const auto sent_at = Clock::now();
  if (::sendto(udp.fd(), kPayload, sizeof kPayload - 1, 0, reinterpret_cast<sockaddr *>(&dest),
               sizeof dest) < 0) {
    if (errno == EPERM || errno == EACCES)
      throw TransportFault(std::string("sendto(): ") + std::strerror(errno));
    return std::nullopt;
  }

  const auto deadline = sent_at + timeout;
  std::array<std::uint8_t, 1500> buf{};
  std::array<pollfd, 2> fds{pollfd{icmp.fd(), POLLIN, 0}, pollfd{udp.fd(), POLLIN, 0}};
  for (;;) {
    auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (remaining <= 0)
      return std::nullopt;
    fds[0].revents = fds[1].revents = 0;
    if (::poll(fds.data(), fds.size(), static_cast<int>(remaining)) <= 0)
      return std::nullopt;
    const auto rtt = [&] {
      return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - sent_at);
    };

    // A UDP service answered directly; the TTL comes from IP_RECVTTL.
    if (fds[1].revents & POLLIN) {
      sockaddr_in from{};
      std::array<char, 64> control{};
      iovec iov{buf.data(), buf.size()};
      msghdr msg{};
      msg.msg_name = &from;
      msg.msg_namelen = sizeof from;
      msg.msg_iov = &iov;
      msg.msg_iovlen = 1;
      msg.msg_control = control.data();
      msg.msg_controllen = control.size();
      if (::recvmsg(udp.fd(), &msg, 0) >= 0 && Ipv4Address(ntohl(from.sin_addr.s_addr)) == request.target) {
        for (auto *c = CMSG_FIRSTHDR(&msg); c; c = CMSG_NXTHDR(&msg, c)) {
          if (c->cmsg_level == IPPROTO_IP && c->cmsg_type == IP_TTL) {
            int ttl = 0;
            std::memcpy(&ttl, CMSG_DATA(c), sizeof ttl);
            return ProbeReply{ReplyKind::DestinationReply, request.target, ttl, rtt()};
          }
        }
      }
    }

    if (fds[0].revents & POLLIN) {
      const auto n = ::recv(icmp.fd(), buf.data(), buf.size(), 0);
      if (n <= 0)
        continue;
      auto v = parse_icmp(buf.data(), static_cast<std::size_t>(n));
      if (!v || !v->inner_has_transport_header() || v->inner_protocol() != IPPROTO_UDP ||
          v->inner_destination() != request.target)
        continue;
      const auto *inner = v->inner_payload();
      if (be16(inner) != src_port || be16(inner + 2) != dst_port)
        continue;
      return ProbeReply{error_kind(*v, request.target), v->source, v->ttl, rtt()};
    }
  }
}

} // namespace honeyttl
