#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "libexpert/errors.hpp"
#include "libexpert/remote.hpp"

using namespace libexpert;

namespace {

// Local HTTP fixture: register routes, then start(); stops on destruction.
struct TestServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }

  ~TestServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

RemoteOptions fast_options(const std::string& base_url) {
  RemoteOptions opts;
  opts.base_url = base_url;
  opts.retry_delay_ms = 1;
  return opts;
}

std::string items_page(const std::vector<std::string>& names) {
  std::string body = "{\"items\":[";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) body += ",";
    body += "{\"full_name\":\"" + names[i] + "\"}";
  }
  return body + "]}";
}

}  // namespace

TEST_CASE("repository search paginates until the requested count") {
  TestServer ts;
  std::atomic<int> requests{0};
  std::string seen_query, seen_sort, seen_order, seen_per_page, seen_auth;
  ts.server.Get("/search/repositories", [&](const httplib::Request& req, httplib::Response& res) {
    const int n = ++requests;
    if (n == 1) {
      seen_query = req.get_param_value("q");
      seen_sort = req.get_param_value("sort");
      seen_order = req.get_param_value("order");
      seen_per_page = req.get_param_value("per_page");
      seen_auth = req.get_header_value("Authorization");
    }
    const std::string page = req.get_param_value("page");
    if (page == "1") {
      res.set_content(items_page({"octo/alpha", "octo/beta", "octo/gamma"}), "application/json");
    } else if (page == "2") {
      res.set_content(items_page({"octo/delta", "octo/epsilon"}), "application/json");
    } else {
      res.set_content(items_page({}), "application/json");
    }
  });
  ts.start();

  auto opts = fast_options(ts.url());
  opts.per_page = 3;
  opts.token = "sekret";
  const auto repos = fetch_top_repos(opts, "language:JavaScript stars:>100", 5);
  CHECK(repos == std::vector<std::string>{"octo/alpha", "octo/beta", "octo/gamma", "octo/delta",
                                          "octo/epsilon"});
  CHECK(requests == 2);  // the count was reached before the empty page
  CHECK(seen_query == "language:JavaScript stars:>100");
  CHECK(seen_sort == "stars");
  CHECK(seen_order == "desc");
  CHECK(seen_per_page == "3");
  CHECK(seen_auth == "Bearer sekret");

  // Asking beyond the corpus stops at the empty page with what exists.
  requests = 0;
  CHECK(fetch_top_repos(opts, "anything", 9).size() == 5);
  CHECK(requests == 3);

  CHECK(fetch_top_repos(opts, "anything", 0).empty());
  CHECK_THROWS_AS(fetch_top_repos(fast_options(""), "q", 1), Error);
}

TEST_CASE("bearer token falls back to the environment") {
  TestServer ts;
  std::string seen_auth = "unset";
  ts.server.Get("/search/repositories", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    res.set_content(items_page({"octo/alpha"}), "application/json");
  });
  ts.start();

  setenv("LIBEXPERT_API_TOKEN", "from-env", 1);
  CHECK(api_token_from_env() == "from-env");
  auto opts = fast_options(ts.url());
  fetch_top_repos(opts, "q", 1);
  CHECK(seen_auth == "Bearer from-env");

  opts.token = "explicit-wins";
  fetch_top_repos(opts, "q", 1);
  CHECK(seen_auth == "Bearer explicit-wins");

  unsetenv("LIBEXPERT_API_TOKEN");
  CHECK(api_token_from_env().empty());
  fetch_top_repos(opts, "q", 1);  // explicit token still present
  CHECK(seen_auth == "Bearer explicit-wins");
}

TEST_CASE("throttled responses are retried, hard failures are not") {
  TestServer ts;
  std::atomic<int> throttled_hits{0};
  std::atomic<int> flaky_hits{0};
  std::atomic<int> missing_hits{0};
  ts.server.Get("/search/repositories", [&](const httplib::Request&, httplib::Response& res) {
    if (++throttled_hits == 1) {
      res.status = 429;
      res.set_header("Retry-After", "0");
      return;
    }
    res.set_content(items_page({"octo/alpha"}), "application/json");
  });
  ts.server.Get("/flaky/search/repositories",
                [&](const httplib::Request&, httplib::Response& res) {
                  ++flaky_hits;
                  res.status = 500;
                });
  ts.server.Get("/missing/search/repositories",
                [&](const httplib::Request&, httplib::Response& res) {
                  ++missing_hits;
                  res.status = 404;
                });
  ts.start();

  const auto opts = fast_options(ts.url());
  CHECK(fetch_top_repos(opts, "q", 1) == std::vector<std::string>{"octo/alpha"});
  CHECK(throttled_hits == 2);  // one 429, one success

  auto flaky = fast_options(ts.url() + "/flaky");
  flaky.max_attempts = 2;
  CHECK_THROWS_AS(fetch_top_repos(flaky, "q", 1), IoError);
  CHECK(flaky_hits == 2);  // retried up to the attempt budget

  CHECK_THROWS_AS(fetch_top_repos(fast_options(ts.url() + "/missing"), "q", 1), IoError);
  CHECK(missing_hits == 1);  // 404 is final
}

TEST_CASE("malformed listing payloads are reported") {
  TestServer ts;
  ts.server.Get("/search/repositories", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"items\": \"not an array\"}", "application/json");
  });
  ts.server.Get("/garbled/search/repositories",
                [&](const httplib::Request&, httplib::Response& res) {
                  res.set_content("{ nope", "application/json");
                });
  ts.start();
  CHECK_THROWS_AS(fetch_top_repos(fast_options(ts.url()), "q", 1), IoError);
  CHECK_THROWS_AS(fetch_top_repos(fast_options(ts.url() + "/garbled"), "q", 1), IoError);
}

TEST_CASE("account lookups merge emails and cache per email") {
  TestServer ts;
  std::atomic<int> commit_hits{0};
  ts.server.Get(R"(/repos/acme/web/commits/(.+))",
                [&](const httplib::Request& req, httplib::Response& res) {
                  ++commit_hits;
                  const std::string sha = req.matches[1];
                  if (sha == "sha_missing") {
                    res.status = 404;
                  } else if (sha == "sha_anon") {
                    res.set_content("{\"author\": null}", "application/json");
                  } else {
                    res.set_content("{\"author\":{\"login\":\"octo\"}}", "application/json");
                  }
                });
  ts.start();

  RemoteIdentityResolver resolver(fast_options(ts.url()));

  const auto first = resolver.resolve({"Alice", "a@x.test", "sha_a", "acme/web"});
  CHECK(first.account_id == "octo");
  CHECK_FALSE(first.fallback);
  CHECK(resolver.lookups() == 1);

  // Same email again: served from the cache, even for another commit.
  const auto cached = resolver.resolve({"Alice A.", "a@x.test", "sha_z", "acme/web"});
  CHECK(cached.account_id == "octo");
  CHECK(resolver.lookups() == 1);

  // A second email mapping to the same account merges identities.
  const auto second = resolver.resolve({"Bob", "b@x.test", "sha_b", "acme/web"});
  CHECK(second.account_id == "octo");
  CHECK(resolver.lookups() == 2);

  const auto identities = resolver.identities();
  REQUIRE(identities.count("octo") == 1);
  CHECK(identities.at("octo").display_name == "Alice");  // first name seen wins
  CHECK(identities.at("octo").emails == std::set<std::string>{"a@x.test", "b@x.test"});

  // Lookup failure: email-equality fallback, flagged and counted.
  const auto missing = resolver.resolve({"Carol", "c@x.test", "sha_missing", "acme/web"});
  CHECK(missing.account_id == "c@x.test");
  CHECK(missing.fallback);
  CHECK(resolver.fallbacks() == 1);
  CHECK(resolver.lookups() == 3);

  // Commit metadata without an account: also a fallback.
  const auto anon = resolver.resolve({"Dana", "d@x.test", "sha_anon", "acme/web"});
  CHECK(anon.account_id == "d@x.test");
  CHECK(anon.fallback);

  // No commit context at all: fallback without a network round trip.
  const auto bare = resolver.resolve({"Eve", "e@x.test", "", ""});
  CHECK(bare.account_id == "e@x.test");
  CHECK(bare.fallback);
  CHECK(resolver.lookups() == 4);
  CHECK(resolver.fallbacks() == 3);
  CHECK(resolver.identities().size() == 4);  // octo + three fallback emails

  CHECK(commit_hits == 4);
  CHECK_THROWS_AS(RemoteIdentityResolver(fast_options("")), Error);
}
