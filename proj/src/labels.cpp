#include "libexpert/labels.hpp"

#include <fstream>
#include <sstream>

#include "libexpert/csv.hpp"
#include "libexpert/errors.hpp"
#include "libexpert/numfmt.hpp"

namespace libexpert {

const char* ternary_name(Ternary t) {
  switch (t) {
    case Ternary::novice: return "novice";
    case Ternary::intermediate: return "intermediate";
    case Ternary::expert: return "expert";
  }
  return "unknown";
}

Ternary ternary_from_score(int score) {
  if (score < 1 || score > 5) {
    throw Error("survey score must be 1..5, got " + std::to_string(score));
  }
  if (score <= 2) return Ternary::novice;
  if (score == 3) return Ternary::intermediate;
  return Ternary::expert;
}

GroundTruthLabel make_label(std::string developer, std::string library, int score) {
  GroundTruthLabel label;
  label.developer = std::move(developer);
  label.library = std::move(library);
  label.score = score;
  label.ternary = ternary_from_score(score);
  return label;
}

LabelScheme ternary_scheme() {
  return {"ternary", {"novice", "intermediate", "expert"}};
}

LabelScheme five_class_scheme() {
  return {"five", {"1", "2", "3", "4", "5"}};
}

int class_id(const GroundTruthLabel& label, const LabelScheme& scheme) {
  if (scheme.name == "five") return label.score - 1;
  return static_cast<int>(label.ternary);
}

namespace {
const std::vector<std::string> kHeader = {"developer", "library", "score"};
}

std::string labels_to_csv(const std::vector<GroundTruthLabel>& labels) {
  std::string out = csv_write_row(kHeader);
  for (const auto& label : labels) {
    out += csv_write_row({label.developer, label.library, std::to_string(label.score)});
  }
  return out;
}

std::vector<GroundTruthLabel> labels_from_csv(const std::string& text) {
  const auto rows = csv_parse(text);
  if (rows.empty() || rows[0] != kHeader) {
    throw ParseError("ground_truth.csv: missing or wrong header row", 0);
  }
  std::vector<GroundTruthLabel> labels;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 3) {
      throw ParseError("ground_truth.csv: row " + std::to_string(i + 1) + " needs 3 fields", 0);
    }
    labels.push_back(make_label(row[0], row[1], static_cast<int>(parse_int(row[2]))));
  }
  return labels;
}

void write_labels(const std::filesystem::path& path, const std::vector<GroundTruthLabel>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << labels_to_csv(labels);
}

std::vector<GroundTruthLabel> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return labels_from_csv(buf.str());
}

}  // namespace libexpert
