#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace honeyttl {

/// Dotted-quad IPv4 address. Only the strict four-octet decimal form is
/// accepted; IPv6 and shorthand forms ("10.1") are rejected.
class Ipv4Address {
public:
  constexpr Ipv4Address() = default;
  constexpr explicit Ipv4Address(std::uint32_t host_order) : value_(host_order) {}

  static std::optional<Ipv4Address> parse(std::string_view text);

  constexpr std::uint32_t value() const { return value_; }
  std::string to_string() const;

  constexpr auto operator<=>(const Ipv4Address &) const = default;

private:
  std::uint32_t value_ = 0;
};

} // namespace honeyttl
