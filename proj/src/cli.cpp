#include "honeyttl/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "honeyttl/analysis.hpp"
#include "honeyttl/digest.hpp"
#include "honeyttl/fingerprint_db.hpp"
#include "honeyttl/ndjson.hpp"
#include "honeyttl/netsim.hpp"
#include "honeyttl/probe_engine.hpp"
#include "honeyttl/raw_transport.hpp"
#include "honeyttl/reporting.hpp"
#include "honeyttl/shodan_ingest.hpp"
#include "text_util.hpp"

namespace honeyttl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Failure carrying its exit code and machine-readable class.
struct CliFailure {
  int code;
  std::string error_class;
  std::string message;
};

[[noreturn]] void fail(int code, std::string error_class, std::string message) {
  throw CliFailure{code, std::move(error_class), std::move(message)};
}

void require_file(const std::string &path, std::string_view what) {
  if (path.empty() || !fs::is_regular_file(path))
    fail(kExitMissingInput, "missing_input", std::string(what) + " not found: " + path);
}

std::ifstream open_in(const std::string &path, std::string_view what) {
  require_file(path, what);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(kExitMissingInput, "missing_input", "cannot open " + std::string(what) + ": " + path);
  return in;
}

std::ofstream open_out(const fs::path &path) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    fail(kExitFailure, "io", "cannot write " + path.string());
  return out;
}

void write_text(const fs::path &path, const std::string &text) {
  auto out = open_out(path);
  out << text;
}

std::string digest_of(const json &config) { return sha256_hex(config.dump()); }

std::vector<DeviceRecord> load_records(const std::string &path) {
  auto in = open_in(path, "record file");
  try {
    return read_record_file(in);
  } catch (const std::exception &e) {
    fail(kExitFailure, "invalid_input", path + ": " + e.what());
  }
}

std::vector<ProbeMethod> parse_methods(const std::string &text, std::string_view flag) {
  std::vector<ProbeMethod> methods;
  if (text.empty())
    return methods;
  for (const auto &part : detail::split(text, ',')) {
    auto m = parse_probe_method(detail::trim(part));
    if (!m)
      fail(kExitUsage, "usage", std::string(flag) + ": unknown method '" + part + "'");
    methods.push_back(*m);
  }
  return methods;
}

json methods_json(const std::vector<ProbeMethod> &methods) {
  json j = json::array();
  for (auto m : methods)
    j.push_back(to_string(m));
  return j;
}

FingerprintSet load_set(const std::string &path) {
  if (path.empty())
    return builtin_set();
  require_file(path, "fingerprint file");
  try {
    return load_fingerprints_file(path);
  } catch (const FingerprintError &e) {
    fail(kExitFailure, "invalid_input", path + ": " + e.what());
  }
}

std::vector<ProviderRule> load_rules(const std::string &path) {
  if (path.empty())
    return builtin_provider_rules();
  auto in = open_in(path, "provider rules file");
  try {
    return load_provider_rules(in);
  } catch (const std::exception &e) {
    fail(kExitFailure, "invalid_input", path + ": " + e.what());
  }
}

json rules_json(const std::vector<ProviderRule> &rules) {
  json j = json::array();
  for (const auto &r : rules)
    j.push_back({r.needle, r.bucket});
  return j;
}

// ---------------------------------------------------------------------------
// Subcommand state. CLI11 binds options into these before the handlers run.

struct FetchArgs {
  std::vector<std::string> queries;
  std::string api_key;
  std::string cache_dir = ".shodan-cache";
  int page_limit = 0;
  std::string base_url = "https://api.shodan.io";
  std::string out;
};

struct ParseArgs {
  std::string in;
  std::string query;
  std::string out;
};

struct DedupArgs {
  std::string in;
  std::string out;
};

struct ProbeArgs {
  std::string records;
  std::string out;
  std::string transport = "real";
  std::string topology;
  int max_hops = 64;
  int timeout_ms = 2000;
  int retries = 1;
  std::string methods = "icmp,udp";
  std::string ping_methods;
  std::string trace_methods;
  int inter_probe_delay_ms = 100;
  int concurrency = 16;
  bool quiet = false;
};

struct AnalyzeArgs {
  std::string records;
  std::string probes;
  std::string out_dir;
  std::string fingerprints;
  std::string provider_rules;
  bool strict = false;
};

struct ReportArgs {
  std::string results;
  std::string out_dir;
  std::string salt;
  bool no_anonymize = false;
};

struct SimGenerateArgs {
  std::size_t count = 100;
  std::string mix = "device=0.5,os=0.5";
  int depth_min = 1;
  int depth_max = 30;
  int asym_min = 0;
  int asym_max = 0;
  std::uint64_t seed = 1;
  std::string fingerprints;
  std::string out;
  std::string records_out;
  bool tag_honeypots = false;
  int port = 102;
  std::string query = "sim";
};

// ---------------------------------------------------------------------------

int cmd_fetch(const FetchArgs &a, std::ostream &out, std::ostream &err) {
  if (a.api_key.empty())
    fail(kExitShodanAccess, "shodan_auth", "no API key (set SHODAN_API_KEY or pass --api-key)");
  FetchOptions options;
  options.base_url = a.base_url;
  options.cache_dir = a.cache_dir;
  if (a.page_limit > 0)
    options.page_limit = a.page_limit;
  options.log = [&err](std::string_view line) { err << "fetch: " << line << '\n'; };

  const auto queries = a.queries.empty() ? default_queries() : a.queries;
  std::vector<DeviceRecord> all;
  json per_query = json::object();
  for (const auto &q : queries) {
    FetchResult r;
    try {
      r = fetch_query(q, a.api_key, options);
    } catch (const ShodanAuthError &e) {
      fail(kExitShodanAccess, "shodan_auth", e.what());
    } catch (const ShodanQuotaError &e) {
      fail(kExitShodanAccess, "shodan_quota", e.what());
    } catch (const ShodanError &e) {
      fail(kExitFailure, "shodan", e.what());
    }
    per_query[q] = {{"records", r.records.size()},
                    {"pages_fetched", r.pages_fetched},
                    {"pages_from_cache", r.pages_from_cache},
                    {"malformed_pages", r.malformed_pages},
                    {"skipped_banners", r.skipped_banners}};
    all.insert(all.end(), std::make_move_iterator(r.records.begin()),
               std::make_move_iterator(r.records.end()));
  }
  json config{{"stage", "fetch"}, {"queries", queries}, {"page_limit", a.page_limit}};
  auto header = make_header("records", digest_of(config), {{"fetch", per_query}});
  auto file = open_out(a.out);
  write_record_file(file, all, header);
  out << per_query.dump() << '\n';
  return kExitOk;
}

int cmd_parse(const ParseArgs &a, std::ostream &out, std::ostream &) {
  auto in = open_in(a.in, "export file");
  const auto query = a.query.empty() ? fs::path(a.in).stem().string() : a.query;
  ExportParseResult r;
  try {
    r = parse_export(in, query);
  } catch (const ExportError &e) {
    fail(kExitFailure, "invalid_input", a.in + ": " + e.what());
  }
  json stats{{"records", r.records.size()},
             {"skipped_lines", r.skipped_lines},
             {"ipv6_rejected", r.ipv6_rejected},
             {"truncated_stream", r.truncated_stream}};
  json config{{"stage", "parse"}, {"origin_query", query}};
  auto file = open_out(a.out);
  write_record_file(file, r.records, make_header("records", digest_of(config), {{"parse", stats}}));
  out << stats.dump() << '\n';
  return kExitOk;
}

int cmd_dedup(const DedupArgs &a, std::ostream &out, std::ostream &) {
  auto result = deduplicate(load_records(a.in));
  auto stats = to_json(result.stats);
  json config{{"stage", "dedup"}, {"key", "address"}};
  auto file = open_out(a.out);
  write_record_file(file, result.records,
                    make_header("records", digest_of(config), {{"dedup", stats}}));
  out << stats.dump() << '\n';
  return kExitOk;
}

int cmd_probe(const ProbeArgs &a, std::ostream &out, std::ostream &err, const Hooks &hooks) {
  ProbeOptions options;
  options.max_hops = a.max_hops;
  options.per_probe_timeout = std::chrono::milliseconds(a.timeout_ms);
  options.retries_per_method = a.retries;
  options.methods = parse_methods(a.methods, "--methods");
  options.ping_methods = parse_methods(a.ping_methods, "--ping-methods");
  options.trace_methods = parse_methods(a.trace_methods, "--trace-methods");
  options.inter_probe_delay = std::chrono::milliseconds(a.inter_probe_delay_ms);
  options.concurrency_limit = a.concurrency;
  try {
    options.validate();
  } catch (const std::invalid_argument &e) {
    fail(kExitUsage, "usage", e.what());
  }

  const auto records = load_records(a.records);
  std::vector<Ipv4Address> targets;
  targets.reserve(records.size());
  for (const auto &r : records)
    targets.push_back(r.address);

  json config{{"stage", "probe"},
              {"transport", a.transport},
              {"max_hops", options.max_hops},
              {"per_probe_timeout_ms", a.timeout_ms},
              {"retries_per_method", options.retries_per_method},
              {"methods", methods_json(options.methods)},
              {"ping_methods", methods_json(options.effective_ping_methods())},
              {"trace_methods", methods_json(options.effective_trace_methods())},
              {"inter_probe_delay_ms", a.inter_probe_delay_ms},
              {"concurrency_limit", options.concurrency_limit}};

  std::unique_ptr<Transport> transport;
  if (a.transport == "sim") {
    if (a.topology.empty())
      fail(kExitUsage, "usage", "--transport sim requires --topology");
    auto in = open_in(a.topology, "topology file");
    try {
      auto spec = read_topology_file(in);
      config["topology_digest"] = sha256_hex([&] {
        std::ostringstream ss;
        write_topology_file(ss, spec, nullptr);
        return ss.str();
      }());
      transport = build_topology(std::move(spec));
    } catch (const std::exception &e) {
      fail(kExitFailure, "invalid_input", a.topology + ": " + e.what());
    }
  } else if (a.transport == "real") {
    try {
      transport = hooks.real_transport_factory ? hooks.real_transport_factory()
                                               : std::make_unique<RawSocketTransport>();
    } catch (const TransportFault &e) {
      fail(kExitTransportFault, "transport_fault", e.what());
    }
  } else {
    fail(kExitUsage, "usage", "--transport must be 'real' or 'sim'");
  }

  ProgressFn progress;
  if (!a.quiet) {
    progress = [&err, step = std::max<std::size_t>(1, targets.size() / 10)](std::size_t done,
                                                                           std::size_t total) {
      if (done % step == 0 || done == total)
        err << "probe: " << done << "/" << total << '\n';
    };
  }
  auto batch = probe_batch(targets, *transport, options, progress);

  std::size_t completed = 0;
  std::map<std::string, std::size_t> errors;
  for (const auto &o : batch.outcomes) {
    if (!o)
      continue;
    ++completed;
    if (o->error)
      ++errors[std::string(to_string(*o->error))];
  }
  json summary{{"targets", targets.size()}, {"completed", completed}, {"errors", errors}};
  json extra{{"probe", summary}, {"complete", !batch.fault.has_value()}, {"config", config}};
  if (batch.fault)
    extra["fault"] = *batch.fault;

  auto file = open_out(a.out);
  write_ndjson_line(file, make_header("probes", digest_of(config), extra));
  for (const auto &o : batch.outcomes)
    if (o)
      write_ndjson_line(file, to_json(*o));
  file.close();
  out << summary.dump() << '\n';

  if (batch.fault)
    fail(kExitTransportFault, "transport_fault",
         *batch.fault + " (" + std::to_string(completed) + " partial outcomes written)");
  return kExitOk;
}

int cmd_analyze(const AnalyzeArgs &a, std::ostream &out, std::ostream &err) {
  const auto set = load_set(a.fingerprints);
  const auto rules = load_rules(a.provider_rules);
  const auto records = load_records(a.records);

  std::vector<ProbeOutcome> probes;
  {
    auto in = open_in(a.probes, "probe file");
    try {
      for (const auto &line : read_ndjson(in).lines)
        probes.push_back(probe_outcome_from_json(line));
    } catch (const std::exception &e) {
      fail(kExitFailure, "invalid_input", a.probes + ": " + e.what());
    }
  }

  const auto mode = a.strict ? CompareMode::Strict : CompareMode::Default;
  auto analysis = analyze_dataset(records, probes, set, mode);
  if (!analysis.unprobed.empty())
    err << "analyze: " << analysis.unprobed.size() << " records have no probe outcome; skipped\n";

  json config{{"stage", "analyze"},
              {"fingerprints", serialize_fingerprints(set)},
              {"provider_rules", rules_json(rules)},
              {"strict_mode", a.strict}};
  std::map<std::string, std::size_t> counts;
  for (auto c : kAllCategories)
    counts[std::string(to_string(c))] = 0;
  std::size_t anomalous = 0;
  for (const auto &o : analysis.outcomes) {
    ++counts[std::string(to_string(o.category))];
    if (o.verdict && o.verdict->reconstructed.anomalous())
      ++anomalous;
  }
  json extra{{"strict_mode", a.strict},
             {"categories", counts},
             {"records", records.size()},
             {"unprobed", analysis.unprobed.size()},
             {"anomalous_reconstructions", anomalous}};

  const fs::path dir(a.out_dir);
  {
    auto file = open_out(dir / "results.jsonl");
    write_ndjson_line(file, make_header("results", digest_of(config), extra));
    for (const auto &o : analysis.outcomes)
      write_ndjson_line(file, to_json(o));
  }

  std::vector<ComparisonOutcome> contention;
  for (const auto &o : analysis.outcomes)
    if (contention_categories().contains(o.category))
      contention.push_back(o);

  const auto &outcomes = analysis.outcomes;
  write_text(dir / "ports_consensus.csv",
             to_csv(to_csv_table(port_distribution(outcomes, consensus_categories()))));
  write_text(dir / "providers_consensus.csv",
             to_csv(to_csv_table(provider_distribution(outcomes, consensus_categories(), rules))));
  write_text(dir / "providers_contention.csv",
             to_csv(to_csv_table(provider_distribution(outcomes, contention_categories(), rules))));
  write_text(dir / "ttl_by_model_contention.csv",
             to_csv(to_csv_table(average_ttl_by_model(contention))));

  out << extra.dump() << '\n';
  return kExitOk;
}

int cmd_report(const ReportArgs &a, std::ostream &out, std::ostream &) {
  std::vector<ComparisonOutcome> outcomes;
  json source_header;
  {
    auto in = open_in(a.results, "results file");
    try {
      auto doc = read_ndjson(in);
      source_header = doc.header;
      for (const auto &line : doc.lines)
        outcomes.push_back(comparison_from_json(line));
    } catch (const std::exception &e) {
      fail(kExitFailure, "invalid_input", a.results + ": " + e.what());
    }
  }

  std::optional<std::string_view> salt;
  if (!a.salt.empty())
    salt = a.salt;
  const bool anonymized = !a.no_anonymize;

  // The salt itself never reaches the output; only whether one was used.
  json config{{"stage", "report"}, {"anonymize", anonymized}, {"salted", salt.has_value()}};
  if (salt)
    config["salt_digest"] = sha256_hex(*salt);
  json extra{{"anonymized", anonymized}, {"salted", salt.has_value()}, {"records", outcomes.size()}};
  if (source_header.is_object())
    extra["source_config_digest"] = source_header.value("config_digest", "");

  const fs::path dir(a.out_dir);
  {
    auto file = open_out(dir / "dataset.jsonl");
    write_ndjson_line(file, make_header("dataset", digest_of(config), extra));
    for (const auto &o : outcomes)
      write_ndjson_line(file, anonymized ? anonymize(o, salt) : to_json(o));
  }
  write_text(dir / "ttl_series_consensus.csv",
             to_csv(to_csv_table(emit_sorted_ttl_series(outcomes, consensus_categories()))));
  write_text(dir / "category_summary.csv", to_csv(to_csv_table(emit_category_summary(outcomes))));

  out << extra.dump() << '\n';
  return kExitOk;
}

int cmd_sim_generate(const SimGenerateArgs &a, std::ostream &out, std::ostream &) {
  const auto set = load_set(a.fingerprints);
  PopulationParams params;
  params.count = a.count;
  params.depth_min = a.depth_min;
  params.depth_max = a.depth_max;
  params.asymmetry_min = a.asym_min;
  params.asymmetry_max = a.asym_max;
  params.seed = a.seed;
  TopologySpec spec;
  try {
    params.mix = PopulationMix::parse(a.mix);
    spec = generate_population(params, set);
  } catch (const std::invalid_argument &e) {
    fail(kExitUsage, "usage", e.what());
  }

  json config{{"stage", "sim-generate"},
              {"count", a.count},
              {"mix", a.mix},
              {"depth", {a.depth_min, a.depth_max}},
              {"asymmetry", {a.asym_min, a.asym_max}},
              {"seed", a.seed},
              {"fingerprints", serialize_fingerprints(set)}};
  const auto digest = digest_of(config);
  {
    auto file = open_out(a.out);
    write_topology_file(file, spec, make_header("topology", digest));
  }

  if (!a.records_out.empty()) {
    if (a.port < 1 || a.port > 65535)
      fail(kExitUsage, "usage", "--port out of range");
    std::vector<DeviceRecord> records;
    for (const auto &h : spec.hosts) {
      DeviceRecord r;
      r.address = h.address;
      r.matched_port = a.port;
      r.origin_query = a.query;
      if (a.tag_honeypots && h.is_honeypot_truth)
        r.tags.insert("honeypot");
      if (h.model_label && !h.is_honeypot_truth)
        r.raw_banner = "Module: " + *h.model_label;
      r.hardware_models = extract_hardware_strings(r.raw_banner);
      records.push_back(std::move(r));
    }
    auto file = open_out(a.records_out);
    write_record_file(file, records,
                      make_header("records", digest, {{"tag_honeypots", a.tag_honeypots}}));
  }

  std::size_t honeypots = 0;
  for (const auto &h : spec.hosts)
    honeypots += h.is_honeypot_truth;
  out << json{{"hosts", spec.hosts.size()}, {"honeypot_truth", honeypots}}.dump() << '\n';
  return kExitOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
        const Hooks &hooks) {
  CLI::App app{"honeyttl: TTL-based ICS honeypot identification"};
  app.name("honeyttl");
  app.set_config("--config", "", "flat key=value configuration file");
  app.require_subcommand(1);

  FetchArgs fetch_args;
  auto *fetch = app.add_subcommand("fetch", "Harvest Shodan search results into a record file");
  fetch->add_option("--query", fetch_args.queries, "Search string (repeatable; default: built-in list)");
  fetch->add_option("--api-key", fetch_args.api_key, "Shodan API key")->envname("SHODAN_API_KEY");
  fetch->add_option("--cache-dir", fetch_args.cache_dir, "Raw page cache directory");
  fetch->add_option("--page-limit", fetch_args.page_limit, "Max pages per query (0 = all)");
  fetch->add_option("--base-url", fetch_args.base_url, "API base URL");
  fetch->add_option("--out", fetch_args.out, "Output record file")->required();

  ParseArgs parse_args;
  auto *parse = app.add_subcommand("parse", "Convert a Shodan export (optionally gzip) into a record file");
  parse->add_option("--in", parse_args.in, "Export file")->required();
  parse->add_option("--query", parse_args.query, "Origin query label (default: file stem)");
  parse->add_option("--out", parse_args.out, "Output record file")->required();

  DedupArgs dedup_args;
  auto *dedup = app.add_subcommand("dedup", "Remove duplicate addresses");
  dedup->add_option("--in", dedup_args.in, "Input record file")->required();
  dedup->add_option("--out", dedup_args.out, "Output record file")->required();

  ProbeArgs probe_args;
  auto *probe = app.add_subcommand("probe", "Ping and traceroute every record address");
  probe->add_option("--records", probe_args.records, "Input record file")->required();
  probe->add_option("--out", probe_args.out, "Output probe file")->required();
  probe->add_option("--transport", probe_args.transport, "real | sim");
  probe->add_option("--topology", probe_args.topology, "Topology file for --transport sim");
  probe->add_option("--max-hops", probe_args.max_hops, "Traceroute TTL cap");
  probe->add_option("--timeout-ms", probe_args.timeout_ms, "Per-probe timeout");
  probe->add_option("--retries", probe_args.retries, "Attempts per method");
  probe->add_option("--methods", probe_args.methods, "Method order, e.g. icmp,udp");
  probe->add_option("--ping-methods", probe_args.ping_methods, "Override methods for ping");
  probe->add_option("--trace-methods", probe_args.trace_methods, "Override methods for traceroute");
  probe->add_option("--inter-probe-delay-ms", probe_args.inter_probe_delay_ms,
                    "Pause between ping and traceroute of one target");
  probe->add_option("--concurrency", probe_args.concurrency, "Targets probed in parallel");
  probe->add_flag("--quiet", probe_args.quiet, "No progress output");

  AnalyzeArgs analyze_args;
  auto *analyze = app.add_subcommand("analyze", "Reconstruct TTLs, classify, compare with Shodan tags");
  analyze->add_option("--records", analyze_args.records, "Record file")->required();
  analyze->add_option("--probes", analyze_args.probes, "Probe file")->required();
  analyze->add_option("--out-dir", analyze_args.out_dir, "Output directory")->required();
  analyze->add_option("--fingerprints", analyze_args.fingerprints, "Fingerprint file (default: built-in)");
  analyze->add_option("--provider-rules", analyze_args.provider_rules, "Provider rules file");
  analyze->add_flag("--strict", analyze_args.strict, "Treat Inconclusive verdicts as honeypot");

  ReportArgs report_args;
  auto *report = app.add_subcommand("report", "Anonymized dataset and plot-ready CSV series");
  report->add_option("--results", report_args.results, "Results file")->required();
  report->add_option("--out-dir", report_args.out_dir, "Output directory")->required();
  report->add_option("--salt", report_args.salt, "Prefix mixed into address hashes");
  report->add_flag("--no-anonymize", report_args.no_anonymize, "Keep raw addresses");

  SimGenerateArgs sim_args;
  auto *sim = app.add_subcommand("sim", "Simulated network utilities");
  sim->require_subcommand(1);
  auto *generate = sim->add_subcommand("generate", "Generate a seeded topology");
  generate->add_option("--count", sim_args.count, "Number of hosts");
  generate->add_option("--mix", sim_args.mix, "Selector proportions, e.g. device=0.5,os=0.5");
  generate->add_option("--depth-min", sim_args.depth_min);
  generate->add_option("--depth-max", sim_args.depth_max);
  generate->add_option("--asym-min", sim_args.asym_min, "Min return-forward depth delta");
  generate->add_option("--asym-max", sim_args.asym_max, "Max return-forward depth delta");
  generate->add_option("--seed", sim_args.seed);
  generate->add_option("--fingerprints", sim_args.fingerprints, "Fingerprint file (default: built-in)");
  generate->add_option("--out", sim_args.out, "Output topology file")->required();
  generate->add_option("--records-out", sim_args.records_out, "Also write a matching record file");
  generate->add_flag("--tag-honeypots", sim_args.tag_honeypots,
                     "Give ground-truth honeypots a 'honeypot' tag in --records-out");
  generate->add_option("--port", sim_args.port, "matched_port for --records-out");
  generate->add_option("--query", sim_args.query, "origin_query for --records-out");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: class=usage message=" << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*fetch)
      return cmd_fetch(fetch_args, out, err);
    if (*parse)
      return cmd_parse(parse_args, out, err);
    if (*dedup)
      return cmd_dedup(dedup_args, out, err);
    if (*probe)
      return cmd_probe(probe_args, out, err, hooks);
    if (*analyze)
      return cmd_analyze(analyze_args, out, err);
    if (*report)
      return cmd_report(report_args, out, err);
    if (*generate)
      return cmd_sim_generate(sim_args, out, err);
  } catch (const CliFailure &f) {
    err << "error: class=" << f.error_class << " message=" << f.message << '\n';
    return f.code;
  } catch (const TransportFault &e) {
    err << "error: class=transport_fault message=" << e.what() << '\n';
    return kExitTransportFault;
  } catch (const std::exception &e) {
    err << "error: class=internal message=" << e.what() << '\n';
    return kExitFailure;
  }
  err << "error: class=usage message=no subcommand\n";
  return kExitUsage;
}

} // namespace honeyttl::cli
