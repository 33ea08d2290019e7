#include "libexpert/manifest.hpp"

#include <array>

#include <json.hpp>

#include "libexpert/errors.hpp"

namespace libexpert {

std::string manifest_kind_name(ManifestKind kind) {
  switch (kind) {
    case ManifestKind::npm_package:
      return "package.json";
    case ManifestKind::bower:
      return "bower.json";
  }
  return "unknown";
}

namespace {

std::string_view basename_of(std::string_view path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string_view::npos ? path : path.substr(slash + 1);
}

}  // namespace

std::optional<ManifestKind> manifest_kind_for_path(std::string_view path) {
  const std::string_view base = basename_of(path);
  if (base == "package.json") return ManifestKind::npm_package;
  if (base == "bower.json") return ManifestKind::bower;
  return std::nullopt;
}

ManifestKind require_manifest_kind(std::string_view path) {
  if (auto kind = manifest_kind_for_path(path)) return *kind;
  throw Error("unsupported manifest format: '" + std::string(basename_of(path)) +
              "' (supported: package.json, bower.json)");
}

std::optional<DependencyEvidence> parse_manifest(std::string_view content,
                                                 ManifestKind kind,
                                                 const LibrarySpec& lib) {
  lib.validate();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based position of the error.
    throw ParseError(std::string("malformed ") + manifest_kind_name(kind) + ": " + e.what(),
                     e.byte > 0 ? e.byte - 1 : 0);
  }
  if (!doc.is_object()) {
    throw ParseError("malformed " + manifest_kind_name(kind) + ": top-level value is not an object", 0);
  }

  // Both package managers use the same section names.
  static constexpr std::array<const char*, 2> kSections = {"dependencies", "devDependencies"};
  for (const char* section : kSections) {
    auto it = doc.find(section);
    if (it == doc.end() || !it->is_object()) continue;
    if (it->contains(lib.manifest_name)) {
      DependencyEvidence evidence;
      evidence.kind = kind;
      evidence.section = section;
      return evidence;
    }
  }
  return std::nullopt;
}

}  // namespace libexpert
