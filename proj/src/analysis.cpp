#include "honeyttl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "text_util.hpp"

namespace honeyttl {

using nlohmann::json;

ReconstructedTtl reconstruct_ttl(const PingResult &ping, const TraceResult &trace) {
  if (!trace.reached || trace.hop_count < 1)
    throw std::invalid_argument("reconstruct_ttl requires a trace that reached the target");
  return ReconstructedTtl{ping.reply_ttl + trace.hop_count - 1, ping.reply_ttl, trace.hop_count};
}

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
  case VerdictKind::Device:
    return "Device";
  case VerdictKind::Honeypot:
    return "Honeypot";
  case VerdictKind::Inconclusive:
    return "Inconclusive";
  }
  return "?";
}

LocalVerdict classify(const ReconstructedTtl &reconstructed, const FingerprintSet &set) {
  LocalVerdict v;
  v.reconstructed = reconstructed;
  v.matched = nearest_match(reconstructed.value, set);
  if (v.matched.tied_across_kinds)
    v.kind = VerdictKind::Inconclusive;
  else if (v.matched.best.front().kind == FingerprintKind::Device)
    v.kind = VerdictKind::Device;
  else
    v.kind = VerdictKind::Honeypot;
  return v;
}

std::string_view to_string(Category category) {
  switch (category) {
  case Category::ConsensusHoneypot:
    return "ConsensusHoneypot";
  case Category::ConsensusDevice:
    return "ConsensusDevice";
  case Category::ContentionLocalDevice:
    return "ContentionLocalDevice";
  case Category::ContentionLocalHoneypot:
    return "ContentionLocalHoneypot";
  case Category::Error:
    return "Error";
  case Category::Inconclusive:
    return "Inconclusive";
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view text) {
  for (auto c : kAllCategories)
    if (to_string(c) == text)
      return c;
  return std::nullopt;
}

CategorySet consensus_categories() {
  return {Category::ConsensusHoneypot, Category::ConsensusDevice};
}

CategorySet contention_categories() {
  return {Category::ContentionLocalDevice, Category::ContentionLocalHoneypot};
}

ComparisonOutcome compare(const DeviceRecord &record, const ProbeOutcome &outcome,
                          const std::optional<LocalVerdict> &verdict, CompareMode mode) {
  if (verdict.has_value() == outcome.error.has_value())
    throw std::invalid_argument("compare: verdict must be present exactly when the probe succeeded");

  ComparisonOutcome out;
  out.record = record;
  out.verdict = verdict;
  out.probe_error = outcome.error;
  if (outcome.error) {
    out.category = Category::Error;
    return out;
  }

  auto local = verdict->kind;
  if (local == VerdictKind::Inconclusive) {
    if (mode == CompareMode::Default) {
      out.category = Category::Inconclusive;
      return out;
    }
    local = VerdictKind::Honeypot;
  }
  const bool tagged = has_honeypot_tag(record);
  if (local == VerdictKind::Honeypot)
    out.category = tagged ? Category::ConsensusHoneypot : Category::ContentionLocalHoneypot;
  else
    out.category = tagged ? Category::ContentionLocalDevice : Category::ConsensusDevice;
  return out;
}

DatasetAnalysis analyze_dataset(const std::vector<DeviceRecord> &records,
                                const std::vector<ProbeOutcome> &probes,
                                const FingerprintSet &set, CompareMode mode) {
  std::unordered_map<std::uint32_t, const ProbeOutcome *> by_target;
  for (const auto &p : probes)
    by_target.try_emplace(p.target.value(), &p);

  DatasetAnalysis result;
  result.outcomes.reserve(records.size());
  for (const auto &record : records) {
    auto it = by_target.find(record.address.value());
    if (it == by_target.end()) {
      result.unprobed.push_back(record.address);
      continue;
    }
    const ProbeOutcome &probe = *it->second;
    std::optional<LocalVerdict> verdict;
    if (!probe.error)
      verdict = classify(reconstruct_ttl(*probe.ping, *probe.trace), set);
    result.outcomes.push_back(compare(record, probe, verdict, mode));
  }
  return result;
}

// ---------------------------------------------------------------------------

std::vector<double> percentage_shares(const std::vector<std::size_t> &counts) {
  const auto total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  std::vector<double> shares(counts.size(), 0.0);
  if (total == 0)
    return shares;

  // Work in hundredths of a percent.
  constexpr std::size_t kWhole = 10000;
  std::vector<std::size_t> units(counts.size());
  std::vector<std::size_t> remainder(counts.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    units[i] = counts[i] * kWhole / total;
    remainder[i] = counts[i] * kWhole % total;
    assigned += units[i];
  }
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < kWhole; ++k, ++assigned)
    ++units[order[k % order.size()]];
  for (std::size_t i = 0; i < counts.size(); ++i)
    shares[i] = static_cast<double>(units[i]) / 100.0;
  return shares;
}

std::vector<PortShare> port_distribution(const std::vector<ComparisonOutcome> &outcomes,
                                         const CategorySet &filter) {
  std::map<int, std::size_t> counts;
  for (const auto &o : outcomes)
    if (filter.contains(o.category))
      ++counts[o.record.matched_port];

  std::vector<PortShare> table;
  std::vector<std::size_t> raw;
  for (const auto &[port, n] : counts) {
    table.push_back({port, n, 0.0});
    raw.push_back(n);
  }
  auto shares = percentage_shares(raw);
  for (std::size_t i = 0; i < table.size(); ++i)
    table[i].percentage = shares[i];
  return table;
}

std::vector<ProviderRule> builtin_provider_rules() {
  return {
      {"amazon", "Amazon AWS"},
      {"digitalocean", "DigitalOcean"},
      {"google", "Google Cloud"},
      {"microsoft", "Microsoft Azure"},
      {"azure", "Microsoft Azure"},
      {"alibaba", "Alibaba Cloud"},
      {"tencent", "Tencent Cloud"},
      {"linode", "Linode Cloud"},
      {"vultr", "Vultr"},
      {"oracle", "Oracle"},
  };
}

std::vector<ProviderRule> load_provider_rules(std::istream &in) {
  std::vector<ProviderRule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (text.empty() || text.front() == '#')
      continue;
    auto comma = text.find(',');
    if (comma == std::string_view::npos)
      throw std::runtime_error("provider rules line " + std::to_string(line_no) +
                               ": expected needle,bucket");
    auto needle = detail::lower(detail::trim(text.substr(0, comma)));
    auto bucket = std::string(detail::trim(text.substr(comma + 1)));
    if (needle.empty() || bucket.empty())
      throw std::runtime_error("provider rules line " + std::to_string(line_no) +
                               ": empty needle or bucket");
    rules.push_back({std::move(needle), std::move(bucket)});
  }
  return rules;
}

std::string provider_bucket(std::string_view org, const std::vector<ProviderRule> &rules) {
  auto trimmed = detail::trim(org);
  if (trimmed.empty())
    return std::string(kUnknownProvider);
  const auto haystack = detail::lower(trimmed);
  for (const auto &rule : rules)
    if (haystack.find(rule.needle) != std::string::npos)
      return rule.bucket;
  return std::string(trimmed);
}

std::vector<ProviderShare> provider_distribution(const std::vector<ComparisonOutcome> &outcomes,
                                                 const CategorySet &filter,
                                                 const std::vector<ProviderRule> &rules) {
  std::map<std::string, std::size_t> counts;
  for (const auto &o : outcomes)
    if (filter.contains(o.category))
      ++counts[provider_bucket(o.record.org, rules)];

  std::vector<ProviderShare> table;
  std::vector<std::size_t> raw;
  for (const auto &[name, n] : counts) {
    table.push_back({name, n, 0.0});
    raw.push_back(n);
  }
  auto shares = percentage_shares(raw);
  for (std::size_t i = 0; i < table.size(); ++i)
    table[i].percentage = shares[i];
  return table;
}

std::vector<ModelTtl> average_ttl_by_model(const std::vector<ComparisonOutcome> &outcomes) {
  struct Acc {
    long long sum = 0;
    std::size_t n = 0;
  };
  std::map<std::pair<std::string, std::string>, Acc> acc;
  for (const auto &o : outcomes) {
    if (o.probe_error || !o.verdict)
      continue;
    for (const auto &m : o.record.hardware_models) {
      auto &a = acc[{m.vendor, m.model}];
      a.sum += o.verdict->reconstructed.value;
      ++a.n;
    }
  }
  std::vector<ModelTtl> table;
  for (const auto &[key, a] : acc) {
    const double mean = static_cast<double>(a.sum) / static_cast<double>(a.n);
    table.push_back({key.first, key.second, std::round(mean * 100.0) / 100.0, a.n});
  }
  return table;
}

// ---------------------------------------------------------------------------

json to_json(const Fingerprint &f) {
  return json{{"kind", to_string(f.kind)},
              {"label", f.label},
              {"ttl", f.ttl},
              {"range", f.range ? json(*f.range) : json(nullptr)}};
}

Fingerprint fingerprint_from_json(const json &j) {
  Fingerprint f;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "device")
    f.kind = FingerprintKind::Device;
  else if (kind == "os")
    f.kind = FingerprintKind::OperatingSystem;
  else
    throw std::runtime_error("unknown fingerprint kind '" + kind + "'");
  f.label = j.at("label").get<std::string>();
  f.ttl = j.at("ttl").get<int>();
  if (auto it = j.find("range"); it != j.end() && it->is_string())
    f.range = it->get<std::string>();
  return f;
}

json to_json(const ComparisonOutcome &o) {
  json j;
  j["category"] = to_string(o.category);
  j["record"] = to_json(o.record);
  j["probe_error"] = o.probe_error ? json(to_string(*o.probe_error)) : json(nullptr);
  if (o.verdict) {
    const auto &v = *o.verdict;
    json matches = json::array();
    for (const auto &f : v.matched.best)
      matches.push_back(to_json(f));
    j["verdict"] = {{"kind", to_string(v.kind)},
                    {"distance", v.matched.distance},
                    {"tied_across_kinds", v.matched.tied_across_kinds},
                    {"matches", std::move(matches)},
                    {"reconstructed",
                     {{"value", v.reconstructed.value},
                      {"ping_ttl", v.reconstructed.ping_ttl},
                      {"hop_count", v.reconstructed.hop_count}}},
                    {"anomalous", v.reconstructed.anomalous()}};
  } else {
    j["verdict"] = nullptr;
  }
  return j;
}

ComparisonOutcome comparison_from_json(const json &j) {
  ComparisonOutcome o;
  auto category = parse_category(j.at("category").get<std::string>());
  if (!category)
    throw std::runtime_error("unknown category");
  o.category = *category;
  o.record = record_from_json(j.at("record"));
  if (!j.at("probe_error").is_null()) {
    o.probe_error = parse_probe_error(j["probe_error"].get<std::string>());
    if (!o.probe_error)
      throw std::runtime_error("unknown probe error");
  }
  if (const auto &v = j.at("verdict"); !v.is_null()) {
    LocalVerdict verdict;
    const auto kind = v.at("kind").get<std::string>();
    if (kind == "Device")
      verdict.kind = VerdictKind::Device;
    else if (kind == "Honeypot")
      verdict.kind = VerdictKind::Honeypot;
    else if (kind == "Inconclusive")
      verdict.kind = VerdictKind::Inconclusive;
    else
      throw std::runtime_error("unknown verdict kind '" + kind + "'");
    verdict.matched.distance = v.at("distance").get<int>();
    verdict.matched.tied_across_kinds = v.at("tied_across_kinds").get<bool>();
    for (const auto &f : v.at("matches"))
      verdict.matched.best.push_back(fingerprint_from_json(f));
    const auto &r = v.at("reconstructed");
    verdict.reconstructed = {r.at("value").get<int>(), r.at("ping_ttl").get<int>(),
                             r.at("hop_count").get<int>()};
    o.verdict = std::move(verdict);
  }
  if ((o.category == Category::Error) != o.probe_error.has_value())
    throw std::runtime_error("category Error must coincide with a probe error");
  return o;
}

} // namespace honeyttl
