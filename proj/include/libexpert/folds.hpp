#pragma once

#include <string>
#include <vector>

#include "libexpert/rng.hpp"

namespace libexpert {

// Stratified k-fold assignment: returns fold index (0..k-1) per sample.
// Within every class the per-fold counts differ by at most one. Errors when
// a class has fewer than k members, naming the class (class_names optional,
// ids used otherwise).
std::vector<int> stratified_folds(const std::vector<int>& labels, int k, Rng& rng,
                                  const std::vector<std::string>& class_names = {});

}  // namespace libexpert
