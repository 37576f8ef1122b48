#include "honeyttl/netsim.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cmath>
#include <istream>
#include <random>
#include <set>

#include "honeyttl/ndjson.hpp"
#include "text_util.hpp"

namespace honeyttl {

using nlohmann::json;

namespace {

void validate_host(const SimHost &h) {
  const auto who = h.address.to_string();
  if (h.forward_depth < 1 || h.return_depth < 1)
    throw TopologyError("host " + who + ": depths must be >= 1");
  if (h.original_ttl < 1 || h.original_ttl > 255)
    throw TopologyError("host " + who + ": original_ttl out of range [1, 255]");
}

} // namespace

SimTransport::SimTransport(TopologySpec spec) : spec_(std::move(spec)) {
  for (std::size_t i = 0; i < spec_.hosts.size(); ++i) {
    validate_host(spec_.hosts[i]);
    if (!index_.emplace(spec_.hosts[i].address, i).second)
      throw TopologyError("duplicate address " + spec_.hosts[i].address.to_string());
  }
}

Ipv4Address SimTransport::router_address(Ipv4Address target, int position) {
  // 100.64.0.0/10, one /24-ish block per low target bits.
  const std::uint32_t t = target.value();
  return Ipv4Address((100u << 24) | ((64u + ((t >> 8) & 63u)) << 16) | ((t & 255u) << 8) |
                     static_cast<std::uint32_t>(position & 255));
}

std::optional<ProbeReply> SimTransport::send_probe(const ProbeRequest &request,
                                                   std::chrono::milliseconds) {
  ++total_probes_;
  {
    std::lock_guard lock(count_mutex_);
    ++probe_counts_[request.target];
  }

  auto it = index_.find(request.target);
  if (it == index_.end() || request.ttl < 1)
    return std::nullopt;
  const SimHost &host = spec_.hosts[it->second];

  if (request.ttl < host.forward_depth) {
    if (std::find(host.silent_hops.begin(), host.silent_hops.end(), request.ttl) !=
        host.silent_hops.end())
      return std::nullopt;
    return ProbeReply{ReplyKind::TimeExceeded, router_address(request.target, request.ttl),
                      255 - (request.ttl - 1), std::chrono::milliseconds(2 * request.ttl)};
  }

  const bool dropped = request.method == ProbeMethod::Icmp ? host.drops_icmp : host.drops_udp;
  if (dropped)
    return std::nullopt;
  const int reply_ttl = host.original_ttl - (host.return_depth - 1);
  if (reply_ttl < 1)
    return std::nullopt; // expired on the way back
  return ProbeReply{ReplyKind::DestinationReply, host.address, reply_ttl,
                    std::chrono::milliseconds(host.forward_depth + host.return_depth)};
}

std::size_t SimTransport::probes_sent(Ipv4Address target) const {
  std::lock_guard lock(count_mutex_);
  auto it = probe_counts_.find(target);
  return it == probe_counts_.end() ? 0 : it->second;
}

std::unique_ptr<SimTransport> build_topology(TopologySpec spec) {
  return std::make_unique<SimTransport>(std::move(spec));
}

// ---------------------------------------------------------------------------

PopulationMix PopulationMix::parse(std::string_view text) {
  PopulationMix mix;
  for (const auto &item : detail::split(text, ',')) {
    auto part = detail::trim(item);
    if (part.empty())
      continue;
    auto eq = part.rfind('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("mix entry '" + std::string(part) + "' lacks '='");
    auto key = std::string(detail::trim(part.substr(0, eq)));
    auto value_text = std::string(detail::trim(part.substr(eq + 1)));
    char *end = nullptr;
    double weight = std::strtod(value_text.c_str(), &end);
    if (key.empty() || value_text.empty() || end != value_text.c_str() + value_text.size())
      throw std::invalid_argument("mix entry '" + std::string(part) + "' is malformed");
    mix.weights.emplace_back(std::move(key), weight);
  }
  return mix;
}

Ipv4Address population_address(std::size_t index) {
  // 198.18.0.0/15, skipping the network address.
  return Ipv4Address(((198u << 24) | (18u << 16)) + static_cast<std::uint32_t>(index + 1));
}

TopologySpec generate_population(const PopulationParams &params, const FingerprintSet &set) {
  if (params.depth_min < 1 || params.depth_min > params.depth_max)
    throw std::invalid_argument("depth range must satisfy 1 <= min <= max");
  if (params.asymmetry_min > params.asymmetry_max)
    throw std::invalid_argument("asymmetry range is empty");
  if (params.count > (1u << 17) - 2)
    throw std::invalid_argument("population larger than 198.18.0.0/15");

  TopologySpec spec;
  spec.seed = params.seed;
  if (params.count == 0)
    return spec;

  // Resolve each selector to the fingerprints it stands for.
  std::vector<std::vector<const Fingerprint *>> groups;
  std::vector<double> cumulative;
  double sum = 0;
  for (const auto &[selector, weight] : params.mix.weights) {
    if (!(weight >= 0) || !std::isfinite(weight))
      throw std::invalid_argument("mix weight for '" + selector + "' is invalid");
    std::vector<const Fingerprint *> group;
    const auto key = detail::lower(selector);
    for (const auto &f : set.entries()) {
      const bool hit = (key == "device" && f.kind == FingerprintKind::Device) ||
                       (key == "os" && f.kind == FingerprintKind::OperatingSystem) ||
                       detail::lower(f.label) == key;
      if (hit)
        group.push_back(&f);
    }
    if (group.empty())
      throw std::invalid_argument("mix selector '" + selector + "' matches no fingerprint");
    sum += weight;
    groups.push_back(std::move(group));
    cumulative.push_back(sum);
  }
  if (groups.empty() || std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("mix proportions must sum to 1");

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> depth(params.depth_min, params.depth_max);
  std::uniform_int_distribution<int> asym(params.asymmetry_min, params.asymmetry_max);

  spec.hosts.reserve(params.count);
  for (std::size_t i = 0; i < params.count; ++i) {
    const double u = unit(rng) * sum;
    std::size_t g = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
    g = std::min(g, groups.size() - 1);
    const auto &group = groups[g];
    std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
    const Fingerprint &f = *group[pick(rng)];

    SimHost h;
    h.address = population_address(i);
    h.original_ttl = f.ttl;
    // A reply whose return path is longer than its initial TTL never arrives,
    // so depths are capped per host to keep every generated host answerable.
    const int a = asym(rng);
    const int cap = std::min(params.depth_max, f.ttl - std::max(0, a));
    h.forward_depth = cap >= params.depth_min
                          ? std::uniform_int_distribution<int>(params.depth_min, cap)(rng)
                          : depth(rng);
    h.return_depth = std::max(1, h.forward_depth + a);
    h.is_honeypot_truth = f.kind == FingerprintKind::OperatingSystem;
    h.model_label = f.label;
    spec.hosts.push_back(std::move(h));
  }
  return spec;
}

// ---------------------------------------------------------------------------

json to_json(const SimHost &h) {
  return json{{"address", h.address.to_string()},
              {"original_ttl", h.original_ttl},
              {"forward_depth", h.forward_depth},
              {"return_depth", h.return_depth},
              {"drops_icmp", h.drops_icmp},
              {"drops_udp", h.drops_udp},
              {"is_honeypot_truth", h.is_honeypot_truth},
              {"model_label", h.model_label ? json(*h.model_label) : json(nullptr)},
              {"silent_hops", h.silent_hops}};
}

SimHost sim_host_from_json(const json &j) {
  try {
    SimHost h;
    auto address = Ipv4Address::parse(j.at("address").get<std::string>());
    if (!address)
      throw TopologyError("host address is not IPv4");
    h.address = *address;
    h.original_ttl = j.at("original_ttl").get<int>();
    h.forward_depth = j.at("forward_depth").get<int>();
    h.return_depth = j.at("return_depth").get<int>();
    h.drops_icmp = j.value("drops_icmp", false);
    h.drops_udp = j.value("drops_udp", false);
    h.is_honeypot_truth = j.value("is_honeypot_truth", false);
    if (auto it = j.find("model_label"); it != j.end() && it->is_string())
      h.model_label = it->get<std::string>();
    h.silent_hops = j.value("silent_hops", std::vector<int>{});
    validate_host(h);
    return h;
  } catch (const json::exception &e) {
    throw TopologyError(std::string("malformed host: ") + e.what());
  }
}

void write_topology_file(std::ostream &out, const TopologySpec &spec, json header) {
  if (!header.is_null()) {
    header[std::string(kHeaderKey)]["seed"] = spec.seed;
    write_ndjson_line(out, header);
  }
  for (const auto &h : spec.hosts)
    write_ndjson_line(out, to_json(h));
}

TopologySpec read_topology_file(std::istream &in) {
  auto doc = read_ndjson(in);
  TopologySpec spec;
  if (doc.header.is_object())
    spec.seed = doc.header.value("seed", std::uint64_t{0});
  std::set<Ipv4Address> seen;
  for (const auto &line : doc.lines) {
    auto h = sim_host_from_json(line);
    if (!seen.insert(h.address).second)
      throw TopologyError("duplicate address " + h.address.to_string());
    spec.hosts.push_back(std::move(h));
  }
  return spec;
}

} // namespace honeyttl
