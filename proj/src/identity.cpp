#include "libexpert/identity.hpp"

#include <vector>

namespace libexpert {

Resolution EmailIdentityResolver::resolve(const AuthorSig& author) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = by_account_.try_emplace(author.email);
  if (inserted) {
    it->second.account_id = author.email;
    it->second.display_name = author.name;
  }
  it->second.emails.insert(author.email);
  return {author.email, false};
}

std::map<std::string, DeveloperIdentity> EmailIdentityResolver::identities() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return by_account_;
}

std::map<std::string, DeveloperIdentity> resolve_identities(
    const std::vector<std::pair<std::string, std::string>>& authors,
    IdentityResolver& resolver) {
  std::map<std::string, std::string> account_by_email;
  for (const auto& [name, email] : authors) {
    account_by_email[email] = resolver.resolve({name, email, "", ""}).account_id;
  }
  const auto accounts = resolver.identities();
  std::map<std::string, DeveloperIdentity> by_email;
  for (const auto& [email, account_id] : account_by_email) {
    by_email[email] = accounts.at(account_id);
  }
  return by_email;
}

}  // namespace libexpert
