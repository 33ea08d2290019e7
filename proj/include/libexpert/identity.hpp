#pragma once

#include <map>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace libexpert {

// One developer across all of their author emails.
struct DeveloperIdentity {
  std::string account_id;     // canonical key
  std::set<std::string> emails;
  std::string display_name;   // first name seen for the account
};

struct AuthorSig {
  std::string name;
  std::string email;
  std::string commit_id;  // lets account-based resolvers look the commit up
  std::string repo_id;
};

struct Resolution {
  std::string account_id;
  bool fallback = false;  // a remote lookup failed; email equality was used
};

// Maps commit authors to canonical developer identities. Implementations
// must be safe to call from multiple mining threads.
class IdentityResolver {
 public:
  virtual ~IdentityResolver() = default;

  virtual Resolution resolve(const AuthorSig& author) = 0;

  // All identities seen so far, keyed by account_id.
  virtual std::map<std::string, DeveloperIdentity> identities() const = 0;
};

// Offline rule: two authors are the same developer iff their emails are
// byte-identical. The email itself is the account id.
class EmailIdentityResolver : public IdentityResolver {
 public:
  Resolution resolve(const AuthorSig& author) override;
  std::map<std::string, DeveloperIdentity> identities() const override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, DeveloperIdentity> by_account_;
};

// Resolves every input author and returns the identity for each email.
// |identities| ≤ |distinct emails|: merging never splits an email.
std::map<std::string, DeveloperIdentity> resolve_identities(
    const std::vector<std::pair<std::string, std::string>>& authors,
    IdentityResolver& resolver);

}  // namespace libexpert
