#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace libexpert {

// FNV-1a. Used for artifact fingerprints and fold audit hashes; fast and
// stable, not cryptographic.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h);

// Hash of a file's raw bytes, formatted as 16 hex digits.
std::string hash_file(const std::filesystem::path& path);

// Hash of an in-memory buffer, formatted as 16 hex digits.
std::string hash_bytes(std::string_view bytes);

}  // namespace libexpert
