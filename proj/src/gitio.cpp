#include "libexpert/gitio.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "libexpert/errors.hpp"
#include "libexpert/timeutil.hpp"

namespace libexpert {

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

std::string read_file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path temp_file(const char* suffix) {
  static std::atomic<std::uint64_t> counter{0};
  const auto n = counter.fetch_add(1);
  return std::filesystem::temp_directory_path() /
         ("libexpert-" + std::to_string(::getpid()) + "-" + std::to_string(n) + suffix);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = s.find(sep, start);
    if (end == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, end - start));
    start = end + 1;
  }
}

// Commit records in log output are introduced by a \x01 header line with
// \x1f-separated fields: id, author name, author email, author time, parents.
constexpr char kRecordMark = '\x01';
constexpr char kFieldSep = '\x1f';
constexpr const char* kLogFormat = "%x01%H%x1f%an%x1f%ae%x1f%at%x1f%P";

}  // namespace

CommandResult run_command(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd,
                          const std::optional<std::filesystem::path>& stdin_file) {
  if (argv.empty()) throw Error("run_command: empty argv");
  const auto out_path = temp_file(".out");
  const auto err_path = temp_file(".err");

  std::string cmd = "cd " + shell_quote(cwd.string()) + " && ";
  for (std::size_t i = 0; i < argv.size(); ++i) {
    if (i > 0) cmd.push_back(' ');
    cmd += shell_quote(argv[i]);
  }
  if (stdin_file) {
    cmd += " < " + shell_quote(stdin_file->string());
  } else {
    cmd += " < /dev/null";
  }
  cmd += " > " + shell_quote(out_path.string());
  cmd += " 2> " + shell_quote(err_path.string());

  const int status = std::system(cmd.c_str());
  CommandResult result;
  if (status == -1) {
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    throw Error("failed to launch command: " + argv[0]);
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
  result.out = read_file_bytes(out_path);
  result.err = read_file_bytes(err_path);
  std::filesystem::remove(out_path);
  std::filesystem::remove(err_path);
  return result;
}

CommandResult GitRepo::git(const std::vector<std::string>& args,
                           const std::optional<std::filesystem::path>& stdin_file) const {
  std::vector<std::string> argv = {"git", "-c", "core.quotePath=false"};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_command(argv, path_, stdin_file);
}

bool GitRepo::is_repository() const {
  std::error_code ec;
  if (!std::filesystem::exists(path_, ec) || ec) return false;
  const auto r = git({"rev-parse", "--git-dir"});
  return r.exit_code == 0;
}

std::optional<std::string> GitRepo::resolve_snapshot(std::optional<std::int64_t> before) const {
  std::vector<std::string> args = {"rev-list", "-1"};
  if (before) args.push_back("--before=" + format_iso8601(*before));
  args.push_back("HEAD");
  const auto r = git(args);
  if (r.exit_code != 0) throw Error("git rev-list failed in " + path_.string() + ": " + r.err);
  std::string id = r.out;
  while (!id.empty() && (id.back() == '\n' || id.back() == '\r')) id.pop_back();
  if (id.empty()) return std::nullopt;
  return id;
}

std::pair<std::string, std::int64_t> GitRepo::commit_id_and_time(const std::string& rev) const {
  const auto r = git({"show", "-s", "--format=%H %ct", rev});
  if (r.exit_code != 0) throw Error("git show failed for " + rev + ": " + r.err);
  std::istringstream in(r.out);
  std::string id;
  std::int64_t when = 0;
  in >> id >> when;
  if (id.empty()) throw Error("cannot parse commit header for " + rev);
  return {id, when};
}

std::vector<RawCommit> GitRepo::log_commits(const std::string& tip) const {
  const auto r = git({"log", "--no-merges", "--no-renames", "--no-abbrev", "--raw",
                      "--numstat", std::string("--pretty=format:") + kLogFormat, tip});
  if (r.exit_code != 0) throw Error("git log failed in " + path_.string() + ": " + r.err);

  std::vector<RawCommit> commits;
  RawCommit* current = nullptr;
  for (const auto& line : split_lines(r.out)) {
    if (line.empty()) continue;
    if (line[0] == kRecordMark) {
      const auto fields = split_on(line.substr(1), kFieldSep);
      if (fields.size() < 5) throw Error("unexpected git log header: " + line);
      RawCommit c;
      c.id = fields[0];
      c.author_name = fields[1];
      c.author_email = fields[2];
      c.authored_at = std::stoll(fields[3]);
      c.parent_count = fields[4].empty() ? 0 : static_cast<int>(split_on(fields[4], ' ').size());
      commits.push_back(std::move(c));
      current = &commits.back();
      continue;
    }
    if (!current) continue;
    if (line[0] == ':') {
      // :100644 100644 <old> <new> <status>\t<path>
      const auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      const auto meta = split_on(line.substr(1, tab - 1), ' ');
      if (meta.size() < 5) continue;
      ChangedFile f;
      f.old_oid = meta[2];
      f.new_oid = meta[3];
      f.status = meta[4].empty() ? 'M' : meta[4][0];
      f.path = line.substr(tab + 1);
      current->files.push_back(std::move(f));
    } else {
      // <added>\t<deleted>\t<path>, '-' marks binary
      const auto parts = split_on(line, '\t');
      if (parts.size() < 3) continue;
      const std::string& path = parts[2];
      for (auto& f : current->files) {
        if (f.path != path) continue;
        if (parts[0] == "-" || parts[1] == "-") {
          f.binary = true;
          f.lines_added = 0;
          f.lines_deleted = 0;
        } else {
          f.lines_added = std::stoll(parts[0]);
          f.lines_deleted = std::stoll(parts[1]);
        }
        break;
      }
    }
  }
  return commits;
}

std::vector<TreeEntry> GitRepo::list_tree(const std::string& rev) const {
  const auto r = git({"ls-tree", "-r", "-z", rev});
  if (r.exit_code != 0) throw Error("git ls-tree failed for " + rev + ": " + r.err);
  std::vector<TreeEntry> entries;
  std::size_t start = 0;
  while (start < r.out.size()) {
    const std::size_t end = r.out.find('\0', start);
    const std::string record =
        r.out.substr(start, end == std::string::npos ? std::string::npos : end - start);
    start = end == std::string::npos ? r.out.size() : end + 1;
    if (record.empty()) continue;
    // <mode> <type> <oid>\t<path>
    const auto tab = record.find('\t');
    if (tab == std::string::npos) continue;
    const auto meta = split_on(record.substr(0, tab), ' ');
    if (meta.size() < 3 || meta[1] != "blob") continue;
    entries.push_back({meta[2], record.substr(tab + 1)});
  }
  return entries;
}

std::map<std::string, std::string> GitRepo::read_blobs(const std::vector<std::string>& oids) const {
  std::map<std::string, std::string> blobs;
  if (oids.empty()) return blobs;

  const auto req_path = temp_file(".req");
  {
    std::ofstream req(req_path, std::ios::binary);
    for (const auto& oid : oids) req << oid << '\n';
  }
  const auto r = git({"cat-file", "--batch"}, req_path);
  std::filesystem::remove(req_path);
  if (r.exit_code != 0) throw Error("git cat-file failed in " + path_.string() + ": " + r.err);

  std::size_t pos = 0;
  const std::string& out = r.out;
  while (pos < out.size()) {
    const std::size_t eol = out.find('\n', pos);
    if (eol == std::string::npos) break;
    const std::string header = out.substr(pos, eol - pos);
    pos = eol + 1;
    const auto fields = split_on(header, ' ');
    if (fields.size() >= 2 && fields[1] == "missing") continue;
    if (fields.size() < 3) continue;
    const std::size_t size = static_cast<std::size_t>(std::stoull(fields[2]));
    if (pos + size > out.size()) break;
    if (fields[1] == "blob") blobs.emplace(fields[0], out.substr(pos, size));
    pos += size + 1;  // content plus trailing newline
  }
  return blobs;
}

void GitRepo::scan_added_lines(
    const std::string& tip,
    const std::function<void(const std::string&, const std::string&, std::string_view)>& fn) const {
  const auto r = git({"log", "--no-merges", "--no-renames", "--unified=0",
                      std::string("--pretty=format:") + std::string(1, kRecordMark) + "%H", "-p", tip});
  if (r.exit_code != 0) throw Error("git log -p failed in " + path_.string() + ": " + r.err);

  std::string commit;
  std::string file;
  bool in_hunks = false;
  for (const auto& line : split_lines(r.out)) {
    if (!line.empty() && line[0] == kRecordMark) {
      commit = line.substr(1);
      file.clear();
      in_hunks = false;
      continue;
    }
    if (line.rfind("diff --git ", 0) == 0) {
      file.clear();
      in_hunks = false;
      continue;
    }
    if (line.rfind("+++ ", 0) == 0) {
      const std::string target = line.substr(4);
      file = (target == "/dev/null") ? std::string() : target.substr(target.find('/') + 1);
      continue;
    }
    if (line.rfind("@@", 0) == 0) {
      in_hunks = true;
      continue;
    }
    if (in_hunks && !line.empty() && line[0] == '+') {
      std::string_view added(line);
      added.remove_prefix(1);
      fn(commit, file, added);
    }
  }
}

}  // namespace libexpert
