#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <fstream>
#include <sstream>
#include <thread>

#include "honeyttl/digest.hpp"
#include "honeyttl/shodan_ingest.hpp"
#include "text_util.hpp"

namespace honeyttl {

using nlohmann::json;

namespace {

void log_line(const FetchOptions &options, const std::string &message) {
  if (options.log)
    options.log(message);
}

std::optional<std::string> read_cache(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_cache(const std::filesystem::path &path, const std::string &body) {
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out)
      throw ShodanError("cannot write cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

bool mentions_quota(std::string_view body) {
  auto text = detail::lower(body);
  return text.find("credit") != std::string::npos || text.find("quota") != std::string::npos;
}

std::string error_text(const std::string &body) {
  auto j = json::parse(body, nullptr, false);
  if (j.is_object() && j.contains("error") && j["error"].is_string())
    return j["error"].get<std::string>();
  return body.substr(0, 200);
}

/// One page over HTTP with retry on transient failures.
std::string download_page(httplib::Client &client, std::string_view query,
                          std::string_view api_key, int page, const FetchOptions &options) {
  httplib::Params params{{"key", std::string(api_key)},
                         {"query", std::string(query)},
                         {"page", std::to_string(page)}};
  auto delay = options.initial_backoff;
  std::string last_problem;
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    auto res = client.Get("/shodan/host/search", params, httplib::Headers{});
    if (!res) {
      last_problem = "transport error: " + httplib::to_string(res.error());
    } else {
      const int status = res->status;
      if (status == 200)
        return res->body;
      if (status == 401 || status == 403)
        throw ShodanAuthError("authentication failed (HTTP " + std::to_string(status) +
                              "): " + error_text(res->body));
      if (status == 402 || (status != 429 && status < 500 && mentions_quota(res->body)))
        throw ShodanQuotaError("query credits exhausted (HTTP " + std::to_string(status) +
                               "): " + error_text(res->body));
      if (status != 429 && status < 500)
        throw ShodanError("request rejected (HTTP " + std::to_string(status) +
                          "): " + error_text(res->body));
      last_problem = "HTTP " + std::to_string(status);
    }
    log_line(options, "page " + std::to_string(page) + " attempt " + std::to_string(attempt) +
                          " failed: " + last_problem);
    if (attempt < options.max_attempts) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
  throw ShodanTransientError("giving up on page " + std::to_string(page) + " after " +
                             std::to_string(options.max_attempts) + " attempts: " +
                             last_problem);
}

} // namespace

std::filesystem::path cache_path(const std::filesystem::path &cache_dir, std::string_view query,
                                 int page) {
  return cache_dir / (sha256_hex(query) + "-" + std::to_string(page) + ".json");
}

FetchResult fetch_query(std::string_view query, std::string_view api_key,
                        const FetchOptions &options) {
  if (query.empty())
    throw ShodanError("query is empty");
  if (api_key.empty())
    throw ShodanAuthError("API key is empty");

  std::unique_ptr<httplib::Client> client; // created on first cache miss
  FetchResult result;
  int consecutive_malformed = 0;

  for (int page = 1; !options.page_limit || page <= *options.page_limit; ++page) {
    const auto path = cache_path(options.cache_dir, query, page);
    auto body = read_cache(path);
    const bool from_cache = body.has_value();
    if (!from_cache) {
      if (!client) {
        client = std::make_unique<httplib::Client>(options.base_url);
        client->set_connection_timeout(options.request_timeout);
        client->set_read_timeout(options.request_timeout);
        client->set_follow_location(true);
      }
      body = download_page(*client, query, api_key, page, options);
    }

    auto doc = json::parse(*body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("matches") ||
        !doc["matches"].is_array()) {
      if (doc.is_object() && doc.contains("error") && mentions_quota(error_text(*body)))
        throw ShodanQuotaError("query credits exhausted: " + error_text(*body));
      ++result.malformed_pages;
      log_line(options, "page " + std::to_string(page) + " malformed, skipped");
      if (++consecutive_malformed >= options.max_attempts)
        break;
      continue;
    }
    consecutive_malformed = 0;
    from_cache ? ++result.pages_from_cache : ++result.pages_fetched;
    if (!from_cache)
      write_cache(path, *body);

    const auto &matches = doc["matches"];
    if (matches.empty())
      break;
    ExportParseResult counts;
    for (const auto &banner : matches)
      if (auto r = record_from_banner(banner, query, counts)) {
        r->origin_query = std::string(query);
        result.records.push_back(std::move(*r));
      }
    result.skipped_banners += counts.skipped_lines + counts.ipv6_rejected;

    if (auto t = doc.find("total"); t != doc.end() && t->is_number_integer()) {
      if (static_cast<long long>(page) * kShodanPageSize >= t->get<long long>())
        break;
    }
  }
  return result;
}

} // namespace honeyttl
