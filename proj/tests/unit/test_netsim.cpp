#include "doctest.h"

#include <sstream>

#include "honeyttl/fingerprint_db.hpp"
#include "honeyttl/ndjson.hpp"
#include "honeyttl/netsim.hpp"

using namespace honeyttl;

namespace {

SimHost host(std::uint32_t addr, int ttl, int fwd, int ret) {
  SimHost h;
  h.address = Ipv4Address(addr);
  h.original_ttl = ttl;
  h.forward_depth = fwd;
  h.return_depth = ret;
  return h;
}

PopulationParams params(std::size_t count, std::uint64_t seed) {
  PopulationParams p;
  p.count = count;
  p.mix = PopulationMix::parse("device=0.5,os=0.5");
  p.depth_min = 1;
  p.depth_max = 40;
  p.asymmetry_min = -2;
  p.asymmetry_max = 2;
  p.seed = seed;
  return p;
}

} // namespace

TEST_CASE("probe semantics follow the hop model") {
  SimTransport net({{host(0x0A000001, 64, 5, 8)}, 0});
  const Ipv4Address t(0x0A000001);
  for (int ttl = 1; ttl < 5; ++ttl) {
    auto r = net.send_probe({t, ProbeMethod::Icmp, ttl, ttl}, {});
    REQUIRE(r);
    CHECK(r->kind == ReplyKind::TimeExceeded);
    CHECK(r->responder == SimTransport::router_address(t, ttl));
  }
  for (int ttl : {5, 6, 255}) {
    auto r = net.send_probe({t, ProbeMethod::Udp, ttl, ttl}, {});
    REQUIRE(r);
    CHECK(r->kind == ReplyKind::DestinationReply);
    CHECK(r->reply_ttl == 64 - 7);
  }
  CHECK_FALSE(net.send_probe({Ipv4Address(0x0A000002), ProbeMethod::Icmp, 64, 0}, {}));
  CHECK(net.probes_sent(t) == 7);
  CHECK(net.total_probes() == 8);
}

TEST_CASE("replies that expire on the way back are lost") {
  SimTransport net({{host(1, 30, 10, 31)}, 0});
  CHECK_FALSE(net.send_probe({Ipv4Address(1), ProbeMethod::Icmp, 255, 0}, {}));
  SimTransport edge({{host(1, 30, 10, 30)}, 0});
  auto r = edge.send_probe({Ipv4Address(1), ProbeMethod::Icmp, 255, 0}, {});
  REQUIRE(r);
  CHECK(r->reply_ttl == 1);
}

TEST_CASE("router addresses live in the shared address space") {
  for (std::uint32_t t : {0u, 0x01020304u, 0xFFFFFFFFu}) {
    auto r = SimTransport::router_address(Ipv4Address(t), 17);
    CHECK((r.value() >> 22) == ((100u << 2) | 1u)); // 100.64.0.0/10
  }
}

TEST_CASE("topology validation") {
  CHECK_THROWS_AS(SimTransport({{host(1, 64, 0, 1)}, 0}), TopologyError);
  CHECK_THROWS_AS(SimTransport({{host(1, 300, 1, 1)}, 0}), TopologyError);
  CHECK_THROWS_AS(SimTransport({{host(1, 64, 1, 1), host(1, 64, 2, 2)}, 0}), TopologyError);
}

TEST_CASE("population is deterministic per seed") {
  auto set = builtin_set();
  auto a = generate_population(params(300, 42), set);
  auto b = generate_population(params(300, 42), set);
  auto c = generate_population(params(300, 43), set);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("population respects ranges and ground truth") {
  auto set = builtin_set();
  auto spec = generate_population(params(2000, 9), set);
  REQUIRE(spec.hosts.size() == 2000);
  std::size_t honeypots = 0;
  for (std::size_t i = 0; i < spec.hosts.size(); ++i) {
    const auto &h = spec.hosts[i];
    CHECK(h.address == population_address(i));
    CHECK(h.forward_depth >= 1);
    CHECK(h.forward_depth <= 40);
    CHECK(h.asymmetry() >= -2);
    CHECK(h.asymmetry() <= 2);
    // Every generated host can answer a ping.
    CHECK(h.original_ttl - (h.return_depth - 1) >= 1);
    REQUIRE(h.model_label);
    bool found = false;
    for (const auto &f : set.entries())
      if (f.label == *h.model_label && f.ttl == h.original_ttl) {
        found = true;
        CHECK(h.is_honeypot_truth == (f.kind == FingerprintKind::OperatingSystem));
      }
    CHECK(found);
    honeypots += h.is_honeypot_truth;
  }
  // Binomial(2000, 0.5): well inside six standard deviations.
  CHECK(honeypots > 860);
  CHECK(honeypots < 1140);
}

TEST_CASE("mix selectors") {
  auto set = builtin_set();
  auto p = params(200, 1);
  p.mix = PopulationMix::parse("linux=1");
  for (const auto &h : generate_population(p, set).hosts)
    CHECK(h.original_ttl == 64);
  p.mix = PopulationMix::parse("DEVICE = 0.25, windows = 0.75");
  for (const auto &h : generate_population(p, set).hosts)
    CHECK((h.original_ttl == 128) == h.is_honeypot_truth);

  CHECK_THROWS_AS(PopulationMix::parse("device"), std::invalid_argument);
  CHECK_THROWS_AS(PopulationMix::parse("device=abc"), std::invalid_argument);
  p.mix = PopulationMix::parse("device=0.5");
  CHECK_THROWS_AS(generate_population(p, set), std::invalid_argument);
  p.mix = PopulationMix::parse("router=1");
  CHECK_THROWS_AS(generate_population(p, set), std::invalid_argument);
  p.mix = PopulationMix::parse("device=1");
  p.depth_min = 5;
  p.depth_max = 4;
  CHECK_THROWS_AS(generate_population(p, set), std::invalid_argument);
}

TEST_CASE("topology file round trip carries the seed") {
  auto spec = generate_population(params(50, 77), builtin_set());
  spec.hosts[3].silent_hops = {2, 4};
  spec.hosts[4].drops_icmp = true;
  std::stringstream ss;
  write_topology_file(ss, spec, make_header("topology", "x"));
  auto back = read_topology_file(ss);
  CHECK(back == spec);
  CHECK(back.seed == 77);
}

TEST_CASE("topology file rejects duplicates and bad hosts") {
  std::stringstream dup;
  write_ndjson_line(dup, to_json(host(1, 64, 1, 1)));
  write_ndjson_line(dup, to_json(host(1, 64, 1, 1)));
  CHECK_THROWS_AS(read_topology_file(dup), TopologyError);
  std::stringstream bad("{\"address\":\"1.2.3.4\",\"original_ttl\":64}\n");
  CHECK_THROWS_AS(read_topology_file(bad), TopologyError);
}
