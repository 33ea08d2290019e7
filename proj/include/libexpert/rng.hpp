#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace libexpert {

// Seeded generator shared by every stochastic stage. Uniform and normal
// draws are sampled by hand (not through std distributions) so the same
// seed produces the same stream on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  // Box-Muller normal draw.
  double normal(double mean = 0.0, double stddev = 1.0);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent substream seed from a root seed and a stage label.
std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view label);

inline Rng derive_stream(std::uint64_t root_seed, std::string_view label) {
  return Rng(derive_seed(root_seed, label));
}

}  // namespace libexpert
