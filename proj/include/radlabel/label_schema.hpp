#ifndef RADLABEL_LABEL_SCHEMA_HPP
#define RADLABEL_LABEL_SCHEMA_HPP

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radlabel/errors.hpp"

namespace radlabel {

// The 14 observations, in canonical (alphabetical) column order. This order
// is fixed: it defines CSV column layout and classifier head indices.
enum class Condition : int {
  kAtelectasis = 0,
  kCardiomegaly,
  kConsolidation,
  kEdema,
  kEnlargedCardiomediastinum,
  kFracture,
  kLungLesion,
  kLungOpacity,
  kNoFinding,
  kPleuralEffusion,
  kPleuralOther,
  kPneumonia,
  kPneumothorax,
  kSupportDevices,
};

inline constexpr std::size_t kNumConditions = 14;

// Per-observation label. Blank means the condition is not mentioned.
// The numeric order is also the argmax tie-break order.
enum class LabelClass : int {
  kBlank = 0,
  kPositive = 1,
  kNegative = 2,
  kUncertain = 3,
};

inline constexpr std::size_t kNumLabelClasses = 4;

const std::array<Condition, kNumConditions>& all_conditions();
std::string_view condition_name(Condition c);
std::optional<Condition> condition_from_name(std::string_view name);
inline int condition_index(Condition c) { return static_cast<int>(c); }

std::string_view label_class_name(LabelClass c);

// No Finding is binary (blank/positive); everything else has 4 classes.
inline int class_count(Condition c) {
  return c == Condition::kNoFinding ? 2 : 4;
}

// Total label assignment for one report. Always total over the 14
// conditions; absence is encoded as Blank.
class LabelVector {
 public:
  LabelVector() { labels_.fill(LabelClass::kBlank); }

  LabelClass at(Condition c) const { return labels_[condition_index(c)]; }
  void set(Condition c, LabelClass v) { labels_[condition_index(c)] = v; }

  // Builds from named entries; missing or unknown condition names are
  // SchemaErrors (this is where totality violations surface).
  static LabelVector from_map(const std::map<std::string, LabelClass>& m);

  bool operator==(const LabelVector& other) const = default;

 private:
  std::array<LabelClass, kNumConditions> labels_;
};

// Throws SchemaError listing every violated constraint; currently the only
// dynamic constraint is No Finding being blank or positive.
void validate(const LabelVector& vec);
bool is_valid(const LabelVector& vec);

// On-disk cell convention: "" = Blank, "1.0" = Positive, "0.0" = Negative,
// "-1.0" = Uncertain. Integer forms ("1", "0", "-1") are accepted on input;
// output always uses the one-decimal form. `context` names the column (and
// row) in error messages.
LabelClass parse_label_value(const std::optional<std::string>& raw,
                             std::string_view context = {});

std::string encode_label_value(LabelClass c);

// The 14 cells of one CSV row, in canonical condition order.
std::array<std::string, kNumConditions> encode_label_row(
    const LabelVector& vec);

}  // namespace radlabel

#endif  // RADLABEL_LABEL_SCHEMA_HPP
