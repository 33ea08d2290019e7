#include "libexpert/remote.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "libexpert/errors.hpp"

#include "httplib.h"
#include "json.hpp"

namespace libexpert {

namespace {

std::string percent_encode(const std::string& value) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : value) {
    const bool unreserved = std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~';
    if (unreserved) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xf]);
    }
  }
  return out;
}

httplib::Headers make_headers(const RemoteOptions& opts) {
  httplib::Headers headers{{"Accept", "application/json"}};
  const std::string token = opts.token.empty() ? api_token_from_env() : opts.token;
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
  return headers;
}

// GET with bounded retries on connection errors, 429, and 5xx. Honours a
// numeric Retry-After header when present, otherwise exponential backoff.
nlohmann::json get_json(httplib::Client& client, const std::string& path,
                        const RemoteOptions& opts) {
  const httplib::Headers headers = make_headers(opts);
  int delay_ms = opts.retry_delay_ms;
  const int attempts = std::max(1, opts.max_attempts);
  for (int attempt = 1;; ++attempt) {
    httplib::Result res = client.Get(path, headers);
    if (res && res->status == 200) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw IoError("GET " + path + ": malformed JSON response: " + e.what());
      }
    }
    const bool retryable = !res || res->status == 429 || res->status >= 500;
    if (!retryable || attempt >= attempts) {
      throw IoError("GET " + path + " failed: " +
                    (res ? "status " + std::to_string(res->status) : "connection error"));
    }
    int wait_ms = delay_ms;
    if (res) {
      const std::string retry_after = res->get_header_value("Retry-After");
      if (!retry_after.empty()) {
        char* end = nullptr;
        const long seconds = std::strtol(retry_after.c_str(), &end, 10);
        if (end && *end == '\0' && seconds >= 0) wait_ms = static_cast<int>(seconds) * 1000;
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(wait_ms));
    delay_ms *= 2;
  }
}

httplib::Client make_client(const RemoteOptions& opts) {
  if (opts.base_url.empty()) throw Error("remote mode requires a base URL");
  httplib::Client client(opts.base_url);
  client.set_connection_timeout(opts.timeout_seconds, 0);
  client.set_read_timeout(opts.timeout_seconds, 0);
  client.set_follow_location(true);
  return client;
}

}  // namespace

std::string api_token_from_env() {
  const char* token = std::getenv("LIBEXPERT_API_TOKEN");
  return token ? token : "";
}

std::vector<std::string> fetch_top_repos(const RemoteOptions& opts, const std::string& query,
                                         int count) {
  if (count <= 0) return {};
  httplib::Client client = make_client(opts);
  std::vector<std::string> repos;
  const int per_page = std::max(1, opts.per_page);
  for (int page = 1; static_cast<int>(repos.size()) < count; ++page) {
    const std::string path = "/search/repositories?q=" + percent_encode(query) +
                             "&sort=stars&order=desc&per_page=" + std::to_string(per_page) +
                             "&page=" + std::to_string(page);
    const nlohmann::json doc = get_json(client, path, opts);
    if (!doc.contains("items") || !doc["items"].is_array())
      throw IoError("repository listing lacks an items array");
    const auto& items = doc["items"];
    if (items.empty()) break;  // ran out of results
    for (const auto& item : items) {
      if (!item.contains("full_name") || !item["full_name"].is_string())
        throw IoError("repository listing item lacks full_name");
      repos.push_back(item["full_name"].get<std::string>());
      if (static_cast<int>(repos.size()) == count) break;
    }
  }
  return repos;
}

RemoteIdentityResolver::RemoteIdentityResolver(RemoteOptions opts) : opts_(std::move(opts)) {
  if (opts_.base_url.empty()) throw Error("remote identity resolver requires a base URL");
}

std::optional<std::string> RemoteIdentityResolver::lookup_account(const AuthorSig& author) {
  if (author.repo_id.empty() || author.commit_id.empty()) return std::nullopt;
  try {
    httplib::Client client = make_client(opts_);
    const std::string path = "/repos/" + author.repo_id + "/commits/" + author.commit_id;
    const nlohmann::json doc = get_json(client, path, opts_);
    if (!doc.contains("author") || !doc["author"].is_object()) return std::nullopt;
    const auto& account = doc["author"];
    if (!account.contains("login") || !account["login"].is_string()) return std::nullopt;
    std::string login = account["login"].get<std::string>();
    if (login.empty()) return std::nullopt;
    return login;
  } catch (const IoError&) {
    return std::nullopt;  // lookup failure -> caller falls back to email
  }
}

Resolution RemoteIdentityResolver::resolve(const AuthorSig& author) {
  {
    std::lock_guard lock(mutex_);
    auto it = by_email_.find(author.email);
    if (it != by_email_.end()) return {it->second.first, it->second.second};
  }

  // Network round trip outside the lock so parallel scans do not serialize.
  std::int64_t attempted = 0;
  std::optional<std::string> account;
  if (!author.repo_id.empty() && !author.commit_id.empty()) {
    attempted = 1;
    account = lookup_account(author);
  }
  const bool fallback = !account.has_value();
  const std::string resolved = account.value_or(author.email);

  std::lock_guard lock(mutex_);
  lookups_ += attempted;
  auto [it, inserted] = by_email_.try_emplace(author.email, resolved, fallback);
  if (inserted && fallback) ++fallbacks_;
  const auto& [account_id, used_fallback] = it->second;
  DeveloperIdentity& identity = accounts_[account_id];
  if (identity.account_id.empty()) {
    identity.account_id = account_id;
    identity.display_name = author.name;
  }
  identity.emails.insert(author.email);
  return {account_id, used_fallback};
}

std::map<std::string, DeveloperIdentity> RemoteIdentityResolver::identities() const {
  std::lock_guard lock(mutex_);
  return accounts_;
}

std::int64_t RemoteIdentityResolver::lookups() const {
  std::lock_guard lock(mutex_);
  return lookups_;
}

std::int64_t RemoteIdentityResolver::fallbacks() const {
  std::lock_guard lock(mutex_);
  return fallbacks_;
}

}  // namespace libexpert
