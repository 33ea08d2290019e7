#include "libexpert/imports.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace libexpert {

bool module_path_matches(std::string_view module_path, const LibrarySpec& lib) {
  for (const auto& pattern : lib.import_patterns) {
    if (module_path == pattern) return true;
    if (module_path.size() > pattern.size() &&
        module_path.compare(0, pattern.size(), pattern) == 0 &&
        module_path[pattern.size()] == '/') {
      return true;
    }
  }
  return false;
}

namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

void skip_ws(std::string_view s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

// Reads a quoted string starting at s[i]; returns its body and advances i
// past the closing quote. No escape handling: module specifiers in practice
// never contain quotes.
std::optional<std::string_view> read_quoted(std::string_view s, std::size_t& i) {
  if (i >= s.size() || (s[i] != '\'' && s[i] != '"')) return std::nullopt;
  const char quote = s[i];
  const std::size_t start = i + 1;
  const std::size_t end = s.find(quote, start);
  if (end == std::string_view::npos) return std::nullopt;
  i = end + 1;
  return s.substr(start, end - start);
}

// Finds the next occurrence of `word` at an identifier boundary.
std::size_t find_word(std::string_view s, std::string_view word, std::size_t from) {
  std::size_t pos = s.find(word, from);
  while (pos != std::string_view::npos) {
    const bool left_ok = pos == 0 || !is_ident_char(s[pos - 1]);
    const std::size_t after = pos + word.size();
    const bool right_ok = after >= s.size() || !is_ident_char(s[after]);
    if (left_ok && right_ok) return pos;
    pos = s.find(word, pos + 1);
  }
  return std::string_view::npos;
}

bool require_call_matches(std::string_view line, const LibrarySpec& lib) {
  std::size_t pos = 0;
  while ((pos = find_word(line, "require", pos)) != std::string_view::npos) {
    std::size_t i = pos + 7;
    skip_ws(line, i);
    if (i < line.size() && line[i] == '(') {
      ++i;
      skip_ws(line, i);
      if (auto spec = read_quoted(line, i); spec && module_path_matches(*spec, lib)) {
        return true;
      }
    }
    pos += 7;
  }
  return false;
}

bool import_statement_matches(std::string_view line, const LibrarySpec& lib) {
  std::size_t pos = 0;
  while ((pos = find_word(line, "import", pos)) != std::string_view::npos) {
    std::size_t i = pos + 6;
    skip_ws(line, i);
    // Bare `import '<p>'`.
    if (i < line.size() && (line[i] == '\'' || line[i] == '"')) {
      if (auto spec = read_quoted(line, i); spec && module_path_matches(*spec, lib)) {
        return true;
      }
    } else {
      // `import <bindings> from '<p>'`.
      const std::size_t from_pos = find_word(line, "from", i);
      if (from_pos != std::string_view::npos) {
        std::size_t j = from_pos + 4;
        skip_ws(line, j);
        if (auto spec = read_quoted(line, j); spec && module_path_matches(*spec, lib)) {
          return true;
        }
      }
    }
    pos += 6;
  }
  return false;
}

}  // namespace

bool line_imports_library(std::string_view line, const LibrarySpec& lib) {
  return require_call_matches(line, lib) || import_statement_matches(line, lib);
}

bool detect_client_files(std::string_view file_content, const LibrarySpec& lib) {
  std::size_t start = 0;
  while (start <= file_content.size()) {
    std::size_t end = file_content.find('\n', start);
    if (end == std::string_view::npos) end = file_content.size();
    std::string_view line = file_content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_imports_library(line, lib)) return true;
    if (end == file_content.size()) break;
    start = end + 1;
  }
  return false;
}

bool looks_binary(std::string_view content) {
  const std::size_t probe = std::min<std::size_t>(content.size(), 8000);
  return content.substr(0, probe).find('\0') != std::string_view::npos;
}

bool is_source_path(std::string_view path) {
  static constexpr std::string_view kExtensions[] = {
      ".js", ".jsx", ".mjs", ".cjs", ".es6", ".ts", ".tsx", ".vue", ".coffee",
  };
  const std::size_t dot = path.rfind('.');
  if (dot == std::string_view::npos) return false;
  const std::string_view ext = path.substr(dot);
  for (const auto candidate : kExtensions) {
    if (ext == candidate) return true;
  }
  return false;
}

}  // namespace libexpert
