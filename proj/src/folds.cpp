#include "libexpert/folds.hpp"

#include <algorithm>
#include <map>

#include "libexpert/errors.hpp"

namespace libexpert {

std::vector<int> stratified_folds(const std::vector<int>& labels, int k, Rng& rng,
                                  const std::vector<std::string>& class_names) {
  if (k < 2) throw Error("stratified folds need k >= 2");
  if (labels.empty()) throw Error("stratified folds: empty label list");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  for (const auto& [cls, members] : by_class) {
    if (members.size() < static_cast<std::size_t>(k)) {
      const std::string name = cls >= 0 && cls < static_cast<int>(class_names.size())
                                   ? class_names[cls]
                                   : std::to_string(cls);
      throw Error("class '" + name + "' has " + std::to_string(members.size()) +
                  " members, fewer than k=" + std::to_string(k));
    }
  }

  std::vector<int> assignment(labels.size(), -1);
  for (auto& [cls, members] : by_class) {
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      assignment[members[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
  }
  return assignment;
}

}  // namespace libexpert
