#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "libexpert/identity.hpp"

namespace libexpert {

struct RemoteOptions {
  std::string base_url;         // e.g. http://127.0.0.1:8099 or https://api.example.com
  std::string token;            // bearer token; read LIBEXPERT_API_TOKEN when empty
  int per_page = 100;           // page size for list endpoints
  int max_attempts = 3;         // per request, counting the first try
  int retry_delay_ms = 250;     // base delay between attempts (doubles each retry)
  int timeout_seconds = 30;
};

// Reads LIBEXPERT_API_TOKEN; empty string when unset.
std::string api_token_from_env();

// Lists the `count` most-starred repositories matching `query` as owner/name
// ids. Calls GET {base}/search/repositories?q=...&sort=stars&order=desc with
// page/per_page pagination until `count` ids are collected or the results run
// out. Expects {"items":[{"full_name":"owner/name"},...]} pages. Retries on
// 429 and 5xx with backoff (honouring Retry-After); other failures throw.
std::vector<std::string> fetch_top_repos(const RemoteOptions& opts,
                                         const std::string& query,
                                         int count);

// Resolves commit authors to hosting-platform accounts via
// GET {base}/repos/{repo_id}/commits/{sha} -> {"author":{"login":...}}.
// Results are cached per email (first resolution wins, keeping the
// email -> account mapping stable within a run). Lookup failures fall back
// to email-equality identity for that author, flagged in the Resolution.
class RemoteIdentityResolver final : public IdentityResolver {
 public:
  explicit RemoteIdentityResolver(RemoteOptions opts);

  Resolution resolve(const AuthorSig& author) override;
  std::map<std::string, DeveloperIdentity> identities() const override;

  std::int64_t lookups() const;    // network round trips attempted
  std::int64_t fallbacks() const;  // authors resolved by email fallback

 private:
  std::optional<std::string> lookup_account(const AuthorSig& author);

  RemoteOptions opts_;
  mutable std::mutex mutex_;
  std::map<std::string, std::pair<std::string, bool>> by_email_;  // email -> (account, fallback)
  std::map<std::string, DeveloperIdentity> accounts_;
  std::int64_t lookups_ = 0;
  std::int64_t fallbacks_ = 0;
};

}  // namespace libexpert
