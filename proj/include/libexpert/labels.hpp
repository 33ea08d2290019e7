#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace libexpert {

// Survey scores 1-5 collapse into three classes: novice (1-2),
// intermediate (3), expert (4-5).
enum class Ternary { novice = 0, intermediate = 1, expert = 2 };

const char* ternary_name(Ternary t);
Ternary ternary_from_score(int score);  // throws unless score in 1..5

struct GroundTruthLabel {
  std::string developer;
  std::string library;
  int score = 0;          // 1..5
  Ternary ternary = Ternary::novice;
};

GroundTruthLabel make_label(std::string developer, std::string library, int score);

// Class schemes give integer class ids and their display names; the id
// order is also the tie-break order (lower wins ties).
struct LabelScheme {
  std::string name;                      // "ternary" or "five"
  std::vector<std::string> class_names;  // index = class id
  int n_classes() const { return static_cast<int>(class_names.size()); }
};

LabelScheme ternary_scheme();
LabelScheme five_class_scheme();

int class_id(const GroundTruthLabel& label, const LabelScheme& scheme);

// ground_truth.csv: developer,library,score
std::string labels_to_csv(const std::vector<GroundTruthLabel>& labels);
std::vector<GroundTruthLabel> labels_from_csv(const std::string& text);
void write_labels(const std::filesystem::path& path, const std::vector<GroundTruthLabel>& labels);
std::vector<GroundTruthLabel> read_labels(const std::filesystem::path& path);

}  // namespace libexpert
