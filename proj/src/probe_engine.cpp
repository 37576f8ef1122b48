#include "honeyttl/probe_engine.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace honeyttl {

using nlohmann::json;

std::string_view to_string(ProbeMethod method) {
  return method == ProbeMethod::Icmp ? "ICMP" : "UDP";
}

std::optional<ProbeMethod> parse_probe_method(std::string_view text) {
  if (text == "ICMP" || text == "icmp")
    return ProbeMethod::Icmp;
  if (text == "UDP" || text == "udp")
    return ProbeMethod::Udp;
  return std::nullopt;
}

std::string_view to_string(ProbeError error) {
  switch (error) {
  case ProbeError::PingFailed:
    return "PingFailed";
  case ProbeError::TraceFailed:
    return "TraceFailed";
  case ProbeError::BothFailed:
    return "BothFailed";
  }
  return "?";
}

std::optional<ProbeError> parse_probe_error(std::string_view text) {
  for (auto e : {ProbeError::PingFailed, ProbeError::TraceFailed, ProbeError::BothFailed})
    if (to_string(e) == text)
      return e;
  return std::nullopt;
}

void ProbeOptions::validate() const {
  if (max_hops < 1 || max_hops > 255)
    throw std::invalid_argument("max_hops must be in [1, 255]");
  if (concurrency_limit < 1)
    throw std::invalid_argument("concurrency_limit must be >= 1");
  if (retries_per_method < 1)
    throw std::invalid_argument("retries_per_method must be >= 1");
  if (methods.empty())
    throw std::invalid_argument("at least one probe method is required");
  if (per_probe_timeout.count() < 0 || inter_probe_delay.count() < 0)
    throw std::invalid_argument("durations must be non-negative");
}

std::optional<PingResult> ping(Ipv4Address target, Transport &transport,
                               const ProbeOptions &options) {
  for (auto method : options.effective_ping_methods()) {
    for (int attempt = 0; attempt < options.retries_per_method; ++attempt) {
      ProbeRequest req{target, method, kPingOutgoingTtl, 0};
      auto reply = transport.send_probe(req, options.per_probe_timeout);
      if (reply && reply->kind == ReplyKind::DestinationReply && reply->responder == target)
        return PingResult{reply->reply_ttl, reply->rtt, method};
    }
  }
  return std::nullopt;
}

std::optional<TraceResult> traceroute(Ipv4Address target, Transport &transport,
                                      const ProbeOptions &options) {
  for (auto method : options.effective_trace_methods()) {
    TraceResult trace;
    trace.method = method;
    bool abandoned = false;
    for (int ttl = 1; ttl <= options.max_hops && !abandoned; ++ttl) {
      std::optional<ProbeReply> reply;
      for (int attempt = 0; attempt < options.retries_per_method && !reply; ++attempt)
        reply = transport.send_probe(ProbeRequest{target, method, ttl, ttl},
                                     options.per_probe_timeout);

      if (!reply) {
        trace.hops.push_back({ttl, std::nullopt});
        continue;
      }
      trace.hops.push_back({ttl, reply->responder});
      if (reply->kind == ReplyKind::DestinationReply && reply->responder == target) {
        trace.hop_count = ttl;
        trace.reached = true;
        return trace;
      }
      // Someone declared the target unreachable; further hops are pointless.
      if (reply->kind == ReplyKind::Unreachable)
        abandoned = true;
    }
  }
  return std::nullopt;
}

ProbeOutcome probe_target(Ipv4Address target, Transport &transport, const ProbeOptions &options) {
  ProbeOutcome outcome;
  outcome.target = target;
  outcome.ping = ping(target, transport, options);
  if (options.inter_probe_delay.count() > 0)
    std::this_thread::sleep_for(options.inter_probe_delay);
  outcome.trace = traceroute(target, transport, options);

  if (!outcome.ping && !outcome.trace)
    outcome.error = ProbeError::BothFailed;
  else if (!outcome.ping)
    outcome.error = ProbeError::PingFailed;
  else if (!outcome.trace)
    outcome.error = ProbeError::TraceFailed;
  return outcome;
}

BatchResult probe_batch(std::span<const Ipv4Address> targets, Transport &transport,
                        const ProbeOptions &options, const ProgressFn &progress) {
  options.validate();
  BatchResult result;
  result.outcomes.resize(targets.size());
  if (targets.empty())
    return result;

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> cancelled{false};
  std::mutex fault_mutex;
  std::mutex progress_mutex;

  auto worker = [&] {
    for (;;) {
      if (cancelled.load())
        return;
      const auto i = next.fetch_add(1);
      if (i >= targets.size())
        return;
      try {
        result.outcomes[i] = probe_target(targets[i], transport, options);
      } catch (const TransportFault &e) {
        std::lock_guard lock(fault_mutex);
        if (!result.fault)
          result.fault = e.what();
        cancelled = true;
        return;
      }
      const auto n = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(n, targets.size());
      }
    }
  };

  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(options.concurrency_limit), targets.size());
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(worker);
  }
  return result;
}

// ---------------------------------------------------------------------------

json to_json(const ProbeOutcome &o) {
  json j;
  j["target"] = o.target.to_string();
  if (o.ping)
    j["ping"] = {{"reply_ttl", o.ping->reply_ttl},
                 {"rtt_us", o.ping->rtt.count()},
                 {"method", to_string(o.ping->method)}};
  else
    j["ping"] = nullptr;
  if (o.trace) {
    json hops = json::array();
    for (const auto &h : o.trace->hops)
      hops.push_back(json::array(
          {h.position, h.responder ? json(h.responder->to_string()) : json(nullptr)}));
    j["trace"] = {{"hop_count", o.trace->hop_count},
                  {"reached", o.trace->reached},
                  {"method", to_string(o.trace->method)},
                  {"hops", std::move(hops)}};
  } else {
    j["trace"] = nullptr;
  }
  j["error"] = o.error ? json(to_string(*o.error)) : json(nullptr);
  return j;
}

ProbeOutcome probe_outcome_from_json(const json &j) {
  auto bad = [](const std::string &why) { return std::runtime_error("malformed probe outcome: " + why); };
  ProbeOutcome o;
  auto target = Ipv4Address::parse(j.at("target").get<std::string>());
  if (!target)
    throw bad("target is not IPv4");
  o.target = *target;

  if (const auto &p = j.at("ping"); !p.is_null()) {
    auto method = parse_probe_method(p.at("method").get<std::string>());
    if (!method)
      throw bad("unknown ping method");
    o.ping = PingResult{p.at("reply_ttl").get<int>(),
                        std::chrono::microseconds(p.value("rtt_us", 0LL)), *method};
    if (o.ping->reply_ttl < 1 || o.ping->reply_ttl > 255)
      throw bad("reply_ttl out of range");
  }
  if (const auto &t = j.at("trace"); !t.is_null()) {
    auto method = parse_probe_method(t.at("method").get<std::string>());
    if (!method)
      throw bad("unknown trace method");
    TraceResult trace;
    trace.hop_count = t.at("hop_count").get<int>();
    trace.reached = t.at("reached").get<bool>();
    trace.method = *method;
    for (const auto &h : t.value("hops", json::array())) {
      Hop hop{h.at(0).get<int>(), std::nullopt};
      if (!h.at(1).is_null())
        hop.responder = Ipv4Address::parse(h.at(1).get<std::string>());
      trace.hops.push_back(hop);
    }
    if (trace.hop_count < 1 || !trace.reached)
      throw bad("trace present but target not reached");
    o.trace = std::move(trace);
  }

  if (!j.at("error").is_null()) {
    o.error = parse_probe_error(j["error"].get<std::string>());
    if (!o.error)
      throw bad("unknown error class");
  }
  std::optional<ProbeError> expected;
  if (!o.ping && !o.trace)
    expected = ProbeError::BothFailed;
  else if (!o.ping)
    expected = ProbeError::PingFailed;
  else if (!o.trace)
    expected = ProbeError::TraceFailed;
  if (expected != o.error)
    throw bad("error field inconsistent with ping/trace presence");
  return o;
}

} // namespace honeyttl
