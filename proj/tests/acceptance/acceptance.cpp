// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "honeyttl/analysis.hpp"
#include "honeyttl/fingerprint_db.hpp"
#include "honeyttl/netsim.hpp"
#include "honeyttl/probe_engine.hpp"
#include "honeyttl/reporting.hpp"
#include "honeyttl/shodan_ingest.hpp"
#include "pipeline.hpp"
#include "sha256_ref.hpp"

using namespace honeyttl;
using testsupport::data_path;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string &what) {
    if (!cond) {
      if (ok)
        detail << "first failure: " << what;
      ok = false;
    }
  }
};

ProbeOptions sim_options(int max_hops = 64) {
  ProbeOptions o;
  o.max_hops = max_hops;
  o.inter_probe_delay = {};
  o.per_probe_timeout = std::chrono::milliseconds(1);
  o.concurrency_limit = 8;
  return o;
}

/// 500 hosts, depths 1-60, fingerprint TTLs {30, 60, 64, 128, 255}.
TopologySpec oracle_population(int asym) {
  PopulationParams p;
  p.count = 500;
  p.mix = PopulationMix::parse("device=0.5,os=0.5");
  p.depth_min = 1;
  p.depth_max = 60;
  p.asymmetry_min = -asym;
  p.asymmetry_max = asym;
  p.seed = 2023;
  return generate_population(p, builtin_set());
}

std::vector<ProbeOutcome> probe_all(const TopologySpec &spec, const ProbeOptions &options) {
  SimTransport net(spec);
  std::vector<Ipv4Address> targets;
  for (const auto &h : spec.hosts)
    targets.push_back(h.address);
  auto batch = probe_batch(targets, net, options);
  std::vector<ProbeOutcome> out;
  for (auto &o : batch.outcomes)
    out.push_back(*o);
  return out;
}

// ---------------------------------------------------------------------------

void ac1(Check &c) {
  auto set = builtin_set();
  c.expect(set == load_fingerprints_file(data_path("fingerprint_table.csv")),
           "builtin set differs from checked-in table");
  std::vector<int> dev, os;
  for (const auto &f : set.entries())
    (f.kind == FingerprintKind::Device ? dev : os).push_back(f.ttl);
  c.expect(dev == std::vector<int>{30, 60, 30, 30, 30, 255}, "device TTL column");
  c.expect(os == std::vector<int>{64, 128}, "Linux 64 / Windows 128");
  c.detail << "8 rows match";
}

void ac2(Check &c) {
  auto spec = oracle_population(0);
  std::set<int> ttls;
  int max_depth = 0;
  for (const auto &h : spec.hosts) {
    ttls.insert(h.original_ttl);
    max_depth = std::max(max_depth, h.forward_depth);
  }
  c.expect(ttls == std::set<int>{30, 60, 64, 128, 255}, "population TTL set");
  auto outcomes = probe_all(spec, sim_options());
  std::size_t exact = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto &o = outcomes[i];
    if (!o.error && reconstruct_ttl(*o.ping, *o.trace).value == spec.hosts[i].original_ttl)
      ++exact;
  }
  c.expect(exact == spec.hosts.size(), "reconstruction mismatch");
  c.detail << exact << "/" << spec.hosts.size() << " exact, max depth " << max_depth;
}

void ac3(Check &c) {
  auto set = builtin_set();
  for (int asym : {0, 1}) {
    auto spec = oracle_population(asym);
    auto outcomes = probe_all(spec, sim_options());
    std::size_t right = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto &o = outcomes[i];
      if (o.error)
        continue;
      auto v = classify(reconstruct_ttl(*o.ping, *o.trace), set).kind;
      const auto want = spec.hosts[i].is_honeypot_truth ? VerdictKind::Honeypot : VerdictKind::Device;
      right += v == want;
    }
    c.expect(right == spec.hosts.size(), "classification mismatch at asymmetry +-" + std::to_string(asym));
    c.detail << "asym+-" << asym << ": " << right << "/" << spec.hosts.size() << "; ";
  }

  // Brute-force sweep against the frozen oracle table.
  auto table = parse_csv(testsupport::read_file(data_path("asymmetry_sweep.csv")));
  std::size_t cells = 0, agree = 0, ties = 0, flips = 0;
  for (const auto &row : table.rows) {
    const int ttl = std::stoi(row[0]);
    const int asym = std::stoi(row[1]);
    const int value = ttl - asym;
    auto v = classify({value, value - 9, 10}, set).kind;
    const std::string name(to_string(v));
    ++cells;
    agree += name == row[3];
    ties += v == VerdictKind::Inconclusive;
    flips += row[3] != row[4];
  }
  c.expect(cells == 255 * 7 && agree == cells, "sweep disagrees with oracle");
  c.expect(ties == 7 && flips == 30, "sweep boundary counts");

  // Boundary for the fingerprint TTLs, end to end through the simulator.
  std::vector<std::string> boundary;
  for (int ttl : {30, 60, 64, 128, 255})
    for (int asym = -3; asym <= 3; ++asym) {
      SimHost h;
      h.address = population_address(0);
      h.original_ttl = ttl;
      h.forward_depth = 12;
      h.return_depth = 12 + asym;
      SimTransport net({{h}, 0});
      auto o = probe_target(h.address, net, sim_options());
      auto v = classify(reconstruct_ttl(*o.ping, *o.trace), set).kind;
      const auto base = (ttl == 64 || ttl == 128) ? VerdictKind::Honeypot : VerdictKind::Device;
      if (v != base)
        boundary.push_back(std::to_string(ttl) + "@" + std::to_string(asym) + "=" +
                           std::string(to_string(v)));
    }
  const std::vector<std::string> expected{"60@-3=Honeypot", "60@-2=Inconclusive",
                                          "64@2=Inconclusive", "64@3=Device"};
  c.expect(boundary == expected, "fingerprint boundary");
  c.detail << "sweep " << agree << "/" << cells << ", boundary {60:-2 tie,-3 flip; 64:+2 tie,+3 flip}";
}

void ac4(Check &c) {
  TopologySpec spec;
  for (int d = 1; d <= 60; ++d) {
    SimHost h;
    h.address = population_address(static_cast<std::size_t>(d));
    h.original_ttl = d % 2 ? 128 : 255;
    h.forward_depth = h.return_depth = d;
    spec.hosts.push_back(h);
  }
  auto short_walk = probe_all(spec, sim_options(30));
  auto long_walk = probe_all(spec, sim_options(64));
  std::size_t plateau = 0;
  for (std::size_t i = 0; i < spec.hosts.size(); ++i) {
    const int d = spec.hosts[i].forward_depth;
    if (d > 30) {
      c.expect(short_walk[i].error == ProbeError::TraceFailed, "deep host not TraceFailed at 30");
      plateau += short_walk[i].error == ProbeError::TraceFailed;
    } else {
      c.expect(!short_walk[i].error, "shallow host failed at 30");
    }
    c.expect(!long_walk[i].error && long_walk[i].trace->hop_count == d, "failed at 64");
  }
  c.detail << plateau << " hosts beyond 30 hops TraceFailed at max_hops 30, all 60 succeed at 64";
}

void ac5(Check &c) {
  TopologySpec spec;
  std::vector<DeviceRecord> records;
  for (std::size_t i = 0; i < 30; ++i) {
    SimHost h;
    h.address = population_address(i);
    h.original_ttl = 64;
    h.forward_depth = h.return_depth = 10;
    switch (i / 6) {
    case 1: h.drops_icmp = true; break;
    case 2: h.drops_udp = true; break;
    case 3: h.drops_icmp = h.drops_udp = true; break;
    case 4: h.forward_depth = h.return_depth = 40; break; // beyond max_hops
    default: break;
    }
    spec.hosts.push_back(h);
    DeviceRecord r;
    r.address = h.address;
    r.matched_port = 102;
    r.origin_query = "fixture";
    records.push_back(r);
  }
  auto options = sim_options(30);
  options.ping_methods = {ProbeMethod::Icmp};
  options.trace_methods = {ProbeMethod::Udp};
  auto outcomes = probe_all(spec, options);
  std::map<std::string, int> counts;
  for (const auto &o : outcomes)
    ++counts[o.error ? std::string(to_string(*o.error)) : "ok"];
  c.expect(counts == std::map<std::string, int>{{"BothFailed", 6}, {"PingFailed", 6},
                                                {"TraceFailed", 12}, {"ok", 6}},
           "partition counts");
  auto analysis = analyze_dataset(records, outcomes, builtin_set(), CompareMode::Default);
  std::size_t compared = 0, errors = 0;
  for (const auto &o : analysis.outcomes) {
    compared += consensus_categories().contains(o.category) || contention_categories().contains(o.category);
    errors += o.category == Category::Error;
  }
  c.expect(compared == 6 && errors == 24, "errors leaked into consensus/contention");
  c.detail << "ok 6, PingFailed " << counts["PingFailed"] << ", TraceFailed " << counts["TraceFailed"]
           << ", BothFailed " << counts["BothFailed"] << "; " << errors << " excluded";
}

void ac6(Check &c) {
  auto parse = [](const char *name) {
    std::ifstream in(data_path(name), std::ios::binary);
    return parse_export(in, "fixture");
  };
  auto gz = parse("shodan_export.ndjson.gz");
  auto plain = parse("shodan_export.ndjson");
  c.expect(gz.records.size() == 23, "gzip record count");
  c.expect(gz.records == plain.records, "gzip and plain differ");
  auto d = deduplicate(gz.records);
  c.expect(d.records.size() == 19 && d.stats.removed == 4, "dedup counts");
  c.detail << gz.records.size() << " parsed, " << gz.skipped_lines << " corrupt, "
           << d.records.size() << " unique, removed " << d.stats.removed;
}

void ac7(Check &c) {
  auto set = builtin_set();
  std::vector<ComparisonOutcome> outcomes;
  std::uint32_t next = 1;
  auto add = [&](int port, const char *org, const char *vendor, const char *model, int ttl,
                 Category cat) {
    DeviceRecord r;
    r.address = Ipv4Address(next++);
    r.matched_port = port;
    r.origin_query = "q";
    r.org = org;
    if (model)
      r.hardware_models = {{model, vendor}};
    outcomes.push_back(testsupport::outcome_with_ttl(r, ttl, cat, set));
  };
  const auto cd = Category::ConsensusDevice;
  const auto clh = Category::ContentionLocalHoneypot;
  add(102, "Amazon.com", nullptr, nullptr, 30, cd);
  add(102, "Amazon.com", nullptr, nullptr, 30, cd);
  add(102, "Example ISP", nullptr, nullptr, 60, cd);
  add(502, "DigitalOcean", nullptr, nullptr, 255, cd);
  add(102, "Amazon", "INSEVIS", "6ES7 315-2EH14-0AB0", 64, clh);
  add(102, "Amazon", "INSEVIS", "6ES7 315-2EH14-0AB0", 65, clh);
  add(161, "Vultr", "INSEVIS", "6ES7 315-2EH14-0AB0", 64, clh);
  add(102, "Vultr", "VIPA", "6ES7 315-4NE12-0AB0", 65, clh);

  auto ports = port_distribution(outcomes, consensus_categories());
  c.expect(ports == std::vector<PortShare>{{102, 3, 75.0}, {502, 1, 25.0}}, "port table");
  auto providers = provider_distribution(outcomes, contention_categories(), builtin_provider_rules());
  c.expect(providers == std::vector<ProviderShare>{{"Amazon AWS", 2, 50.0}, {"Vultr", 2, 50.0}},
           "provider table");
  auto models = average_ttl_by_model(outcomes);
  c.expect(models.size() == 2, "model rows");
  if (models.size() == 2) {
    c.expect(std::abs(models[0].mean_ttl - 64.33) <= 0.01 && models[0].vendor == "INSEVIS",
             "INSEVIS mean");
    c.expect(std::abs(models[1].mean_ttl - 65.00) <= 0.01 && models[1].vendor == "VIPA",
             "VIPA mean");
    c.detail << "ports 75/25, providers 50/50, means " << format_fixed2(models[0].mean_ttl)
             << " and " << format_fixed2(models[1].mean_ttl);
  }
}

void ac8(Check &c) {
  auto table = parse_csv(testsupport::read_file(data_path("address_hashes.csv")));
  std::size_t matched = 0;
  for (const auto &row : table.rows) {
    auto a = Ipv4Address::parse(row[0]);
    matched += a && address_hash(*a) == row[1] && testsupport::sha256_ref(row[0]) == row[1];
  }
  c.expect(table.rows.size() == 100 && matched == 100, "hash mismatch");

  testsupport::TempDir dir;
  auto files = testsupport::run_sim_pipeline(dir.path(), "8", "100");
  const auto &dataset = files.at("report/dataset.jsonl");
  std::size_t leaks = 0;
  std::istringstream in(dataset);
  for (std::string line; std::getline(in, line);)
    leaks += contains_dotted_quad(line);
  c.expect(leaks == 0, "anonymized dataset contains dotted quads");
  c.detail << matched << "/100 digests agree, " << leaks << " dotted quads in anonymized output";
}

void ac9(Check &c) {
  testsupport::TempDir dir;
  auto files = testsupport::run_sim_pipeline(dir.path(), "9", "300");
  std::istringstream in(files.at("analysis/results.jsonl"));
  auto doc = read_ndjson(in);
  std::size_t sum = 0;
  for (const auto &[name, n] : doc.header["categories"].items())
    sum += n.get<std::size_t>();
  c.expect(sum == doc.lines.size() && sum == 300, "category counts do not sum to dataset size");
  auto summary = parse_csv(files.at("report/category_summary.csv"));
  c.expect(!summary.rows.empty() && summary.rows.back().back() == "300", "summary total");
  c.detail << "partition sums to " << sum
           << "; live-internet population statistics are out of scope offline";
}

void ac10(Check &c) {
  testsupport::TempDir a, b;
  auto first = testsupport::run_sim_pipeline(a.path(), "10", "300");
  auto second = testsupport::run_sim_pipeline(b.path(), "10", "300");
  c.expect(first.size() == second.size(), "file sets differ");
  std::size_t identical = 0;
  for (const auto &[name, text] : first) {
    auto it = second.find(name);
    const bool same = it != second.end() &&
                      testsupport::without_timestamp(text) == testsupport::without_timestamp(it->second);
    c.expect(same, name + " differs");
    identical += same;
  }
  c.detail << identical << "/" << first.size() << " files identical";
}

} // namespace

int main() {
  struct Criterion {
    const char *id;
    const char *name;
    std::function<void(Check &)> run;
    double budget_s;
  };
  const std::vector<Criterion> criteria{
      {"AC1", "fingerprint fidelity", ac1, 1},
      {"AC2", "reconstruction oracle", ac2, 5},
      {"AC3", "classification oracle and asymmetry boundary", ac3, 10},
      {"AC4", "max-hops plateau", ac4, 5},
      {"AC5", "error taxonomy", ac5, 5},
      {"AC6", "ingestion and dedup", ac6, 5},
      {"AC7", "table reproduction", ac7, 5},
      {"AC8", "anonymization", ac8, 10},
      {"AC9", "partition invariant", ac9, 10},
      {"AC10", "end-to-end determinism", ac10, 30},
  };

  int failed = 0;
  for (const auto &cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception &e) {
      check.ok = false;
      check.detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > cr.budget_s) {
      check.ok = false;
      check.detail << " (over time budget)";
    }
    failed += !check.ok;
    std::cout << (check.ok ? "PASS " : "FAIL ") << cr.id << " " << cr.name << ": "
              << check.detail.str() << " [" << static_cast<int>(secs * 1000) << " ms]\n";
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << '\n';
  return failed == 0 ? 0 : 1;
}
