#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "honeyttl/fingerprint_db.hpp"
#include "honeyttl/transport.hpp"

namespace honeyttl {

struct SimHost {
  Ipv4Address address;
  int original_ttl = 64;
  int forward_depth = 1;
  int return_depth = 1;
  bool drops_icmp = false;
  bool drops_udp = false;
  bool is_honeypot_truth = false;
  std::optional<std::string> model_label;
  std::vector<int> silent_hops; // router positions that never answer

  int asymmetry() const { return return_depth - forward_depth; }

  bool operator==(const SimHost &) const = default;
};

struct TopologySpec {
  std::vector<SimHost> hosts;
  std::uint64_t seed = 0;

  bool operator==(const TopologySpec &) const = default;
};

class TopologyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// In-process network. A probe with outgoing TTL t toward a host at forward
/// depth d is expired by router t when t < d, and answered by the host when
/// t >= d with TTL original_ttl - (return_depth - 1). Responses depend only on
/// the topology and the request.
class SimTransport final : public Transport {
public:
  explicit SimTransport(TopologySpec spec);

  std::optional<ProbeReply> send_probe(const ProbeRequest &request,
                                       std::chrono::milliseconds timeout) override;

  const TopologySpec &spec() const { return spec_; }

  /// Probes addressed to `target` so far (observability only).
  std::size_t probes_sent(Ipv4Address target) const;
  std::size_t total_probes() const { return total_probes_.load(); }

  /// Address synthesized for the router at `position` on the path to `target`.
  static Ipv4Address router_address(Ipv4Address target, int position);

private:
  TopologySpec spec_;
  std::map<Ipv4Address, std::size_t> index_;
  mutable std::mutex count_mutex_;
  std::map<Ipv4Address, std::size_t> probe_counts_;
  std::atomic<std::size_t> total_probes_{0};
};

/// Validates the topology (unique addresses, depths >= 1, TTL range).
std::unique_ptr<SimTransport> build_topology(TopologySpec spec);

/// Weighted selectors: "device", "os", or a fingerprint label
/// (case-insensitive). Kind selectors spread evenly over their entries.
struct PopulationMix {
  std::vector<std::pair<std::string, double>> weights;

  /// Parses "device=0.5,os=0.5" or "Linux=1".
  static PopulationMix parse(std::string_view text);
};

struct PopulationParams {
  std::size_t count = 0;
  PopulationMix mix;
  int depth_min = 1;
  int depth_max = 30;
  int asymmetry_min = 0;
  int asymmetry_max = 0;
  std::uint64_t seed = 0;
};

/// Deterministic for a fixed seed. Hosts get addresses from 198.18.0.0/15
/// in index order. Return depths are clamped to at least 1, and forward
/// depths are capped so a host's reply outlives its return path whenever the
/// requested range allows it.
TopologySpec generate_population(const PopulationParams &params, const FingerprintSet &set);

/// First address handed out by generate_population.
Ipv4Address population_address(std::size_t index);

nlohmann::json to_json(const SimHost &host);
SimHost sim_host_from_json(const nlohmann::json &value);

void write_topology_file(std::ostream &out, const TopologySpec &spec, nlohmann::json header);
TopologySpec read_topology_file(std::istream &in);

} // namespace honeyttl
