#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "doctest.h"

#include <atomic>
#include <thread>

#include "honeyttl/shodan_ingest.hpp"
#include "test_support.hpp"

using namespace honeyttl;
using nlohmann::json;

namespace {

/// Local stand-in for the search endpoint. `handler` decides each response.
class FakeShodan {
public:
  using Handler = std::function<void(int page, const httplib::Request &, httplib::Response &)>;

  explicit FakeShodan(Handler handler) : handler_(std::move(handler)) {
    server_.Get("/shodan/host/search", [this](const httplib::Request &req, httplib::Response &res) {
      ++requests;
      last_query = req.get_param_value("query");
      last_key = req.get_param_value("key");
      handler_(std::stoi(req.get_param_value("page")), req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeShodan() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> requests{0};
  std::string last_query;
  std::string last_key;

private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string page_body(int page, int total) {
  json matches = json::array();
  const int first = (page - 1) * kShodanPageSize;
  for (int i = first; i < std::min(total, first + kShodanPageSize); ++i)
    matches.push_back({{"ip_str", "10.1." + std::to_string(i / 256) + "." + std::to_string(i % 256)},
                       {"port", 102},
                       {"org", "Org"},
                       {"data", "Module: 6ES7 315-2EH14-0AB0"}});
  return json{{"matches", matches}, {"total", total}}.dump();
}

FetchOptions fast_options(const FakeShodan &server, const testsupport::TempDir &dir) {
  FetchOptions o;
  o.base_url = server.url();
  o.cache_dir = dir / "cache";
  o.initial_backoff = std::chrono::milliseconds(1);
  o.max_attempts = 3;
  o.request_timeout = std::chrono::seconds(5);
  return o;
}

} // namespace

TEST_CASE("pages until the total is covered and replays from cache") {
  FakeShodan server([](int page, const httplib::Request &, httplib::Response &res) {
    res.set_content(page_body(page, 250), "application/json");
  });
  testsupport::TempDir dir;
  auto options = fast_options(server, dir);

  auto first = fetch_query("6ES7", "KEY", options);
  CHECK(first.records.size() == 250);
  CHECK(first.pages_fetched == 3);
  CHECK(first.pages_from_cache == 0);
  CHECK(server.requests == 3);
  CHECK(server.last_query == "6ES7");
  CHECK(server.last_key == "KEY");
  for (const auto &r : first.records)
    CHECK(r.origin_query == "6ES7");
  CHECK(std::filesystem::exists(cache_path(options.cache_dir, "6ES7", 1)));

  auto replay = fetch_query("6ES7", "KEY", options);
  CHECK(server.requests == 3); // no network traffic on replay
  CHECK(replay.pages_from_cache == 3);
  CHECK(replay.records == first.records);
}

TEST_CASE("page limit stops early") {
  FakeShodan server([](int page, const httplib::Request &, httplib::Response &res) {
    res.set_content(page_body(page, 1000), "application/json");
  });
  testsupport::TempDir dir;
  auto options = fast_options(server, dir);
  options.page_limit = 2;
  auto r = fetch_query("q", "KEY", options);
  CHECK(r.records.size() == 200);
  CHECK(server.requests == 2);
}

TEST_CASE("bad key surfaces as an auth error without retries") {
  FakeShodan server([](int, const httplib::Request &, httplib::Response &res) {
    res.status = 401;
    res.set_content(R"({"error":"Invalid API key"})", "application/json");
  });
  testsupport::TempDir dir;
  CHECK_THROWS_AS(fetch_query("q", "BAD", fast_options(server, dir)), ShodanAuthError);
  CHECK(server.requests == 1);
}

TEST_CASE("exhausted credits surface as a quota error") {
  FakeShodan server([](int, const httplib::Request &, httplib::Response &res) {
    res.status = 402;
    res.set_content(R"({"error":"Insufficient query credits"})", "application/json");
  });
  testsupport::TempDir dir;
  CHECK_THROWS_AS(fetch_query("q", "KEY", fast_options(server, dir)), ShodanQuotaError);
}

TEST_CASE("transient failures are retried") {
  std::atomic<int> failures{0};
  FakeShodan server([&](int page, const httplib::Request &, httplib::Response &res) {
    if (failures++ < 2) {
      res.status = failures == 1 ? 503 : 429;
      return;
    }
    res.set_content(page_body(page, 5), "application/json");
  });
  testsupport::TempDir dir;
  std::vector<std::string> log;
  auto options = fast_options(server, dir);
  options.log = [&](std::string_view line) { log.emplace_back(line); };
  auto r = fetch_query("q", "KEY", options);
  CHECK(r.records.size() == 5);
  CHECK(server.requests == 3);
  CHECK(log.size() == 2);
}

TEST_CASE("persistent server errors give up after max attempts") {
  FakeShodan server([](int, const httplib::Request &, httplib::Response &res) { res.status = 500; });
  testsupport::TempDir dir;
  CHECK_THROWS_AS(fetch_query("q", "KEY", fast_options(server, dir)), ShodanTransientError);
  CHECK(server.requests == 3);
}

TEST_CASE("malformed page is skipped and not cached") {
  FakeShodan server([](int page, const httplib::Request &, httplib::Response &res) {
    if (page == 2)
      res.set_content("{\"matches\": [", "application/json");
    else
      res.set_content(page_body(page, 300), "application/json");
  });
  testsupport::TempDir dir;
  auto options = fast_options(server, dir);
  auto r = fetch_query("q", "KEY", options);
  CHECK(r.malformed_pages == 1);
  CHECK(r.records.size() == 200);
  CHECK_FALSE(std::filesystem::exists(cache_path(options.cache_dir, "q", 2)));
  CHECK(std::filesystem::exists(cache_path(options.cache_dir, "q", 3)));
}

TEST_CASE("cache file name is derived from the query digest") {
  auto p = cache_path("c", "6ES7", 4);
  CHECK(p.parent_path() == "c");
  CHECK(p.filename().string().size() == 64 + 7);
  CHECK(p.filename().string().ends_with("-4.json"));
  CHECK(cache_path("c", "6ES7", 4) != cache_path("c", "6ES8", 4));
}

TEST_CASE("empty key or query are rejected up front") {
  FetchOptions o;
  CHECK_THROWS_AS(fetch_query("q", "", o), ShodanAuthError);
  CHECK_THROWS_AS(fetch_query("", "k", o), ShodanError);
}
