#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "libexpert/library_spec.hpp"

namespace libexpert {

enum class ManifestKind { npm_package, bower };

std::string manifest_kind_name(ManifestKind kind);

// Maps a repo path to the manifest format it declares, by file name.
// Returns nullopt for files that are not dependency manifests at all;
// use require_manifest_kind when an unsupported manifest must be an error.
std::optional<ManifestKind> manifest_kind_for_path(std::string_view path);

// Like manifest_kind_for_path but throws Error for unsupported formats.
ManifestKind require_manifest_kind(std::string_view path);

// Which manifest file and dependency section named the library.
struct DependencyEvidence {
  std::string manifest_path;  // repo-relative; filled by the corpus scanner
  ManifestKind kind = ManifestKind::npm_package;
  std::string section;  // e.g. "dependencies" or "devDependencies"
};

// Returns evidence iff lib.manifest_name appears as a dependency key in a
// dependency section (runtime and development sections both count).
// Malformed JSON raises ParseError carrying the byte offset; it is never
// treated as "no dependency".
std::optional<DependencyEvidence> parse_manifest(std::string_view content,
                                                 ManifestKind kind,
                                                 const LibrarySpec& lib);

}  // namespace libexpert
