#pragma once

#include <string_view>

#include "libexpert/library_spec.hpp"

namespace libexpert {

// True when `module_path` names the library: equal to an import pattern, or
// an import pattern followed by '/' and a subpath ("react/addons" imports
// react; "preact" does not).
bool module_path_matches(std::string_view module_path, const LibrarySpec& lib);

// Lexical scan of one source line for an import of the library. Recognizes
// require('<p>') calls and `import ... from '<p>'` / bare `import '<p>'`
// statements, single- or double-quoted. Commented-out lines are not
// filtered; this is a documented approximation.
bool line_imports_library(std::string_view line, const LibrarySpec& lib);

// True iff any line of the file imports the library. Pure predicate.
bool detect_client_files(std::string_view file_content, const LibrarySpec& lib);

// git's text heuristic: a NUL byte in the first 8000 bytes marks a binary.
bool looks_binary(std::string_view content);

// True for paths with a JavaScript-family source extension. Client-file
// detection only considers source code, so an import statement quoted in a
// README does not make the README a client file.
bool is_source_path(std::string_view path);

}  // namespace libexpert
