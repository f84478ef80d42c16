#include "radlabel/label_schema.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace radlabel {

namespace {

constexpr std::array<std::string_view, kNumConditions> kConditionNames = {
    "Atelectasis",
    "Cardiomegaly",
    "Consolidation",
    "Edema",
    "Enlarged Cardiomediastinum",
    "Fracture",
    "Lung Lesion",
    "Lung Opacity",
    "No Finding",
    "Pleural Effusion",
    "Pleural Other",
    "Pneumonia",
    "Pneumothorax",
    "Support Devices",
};

constexpr std::array<std::string_view, kNumLabelClasses> kClassNames = {
    "Blank",
    "Positive",
    "Negative",
    "Uncertain",
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

const std::array<Condition, kNumConditions>& all_conditions() {
  static const std::array<Condition, kNumConditions> conditions = [] {
    std::array<Condition, kNumConditions> a{};
    for (std::size_t i = 0; i < kNumConditions; ++i) {
      a[i] = static_cast<Condition>(i);
    }
    return a;
  }();
  return conditions;
}

std::string_view condition_name(Condition c) {
  return kConditionNames[condition_index(c)];
}

std::optional<Condition> condition_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumConditions; ++i) {
    if (kConditionNames[i] == name) return static_cast<Condition>(i);
  }
  return std::nullopt;
}

std::string_view label_class_name(LabelClass c) {
  return kClassNames[static_cast<int>(c)];
}

LabelVector LabelVector::from_map(const std::map<std::string, LabelClass>& m) {
  std::vector<std::string> problems;
  LabelVector vec;
  std::array<bool, kNumConditions> seen{};
  for (const auto& [name, value] : m) {
    const auto cond = condition_from_name(name);
    if (!cond) {
      problems.push_back("unknown condition '" + name + "'");
      continue;
    }
    vec.set(*cond, value);
    seen[condition_index(*cond)] = true;
  }
  for (std::size_t i = 0; i < kNumConditions; ++i) {
    if (!seen[i]) {
      problems.push_back("missing condition '" +
                         std::string(kConditionNames[i]) + "'");
    }
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid label assignment:";
    for (const auto& p : problems) msg << " " << p << ";";
    throw SchemaError(msg.str());
  }
  return vec;
}

void validate(const LabelVector& vec) {
  const LabelClass nf = vec.at(Condition::kNoFinding);
  if (nf != LabelClass::kBlank && nf != LabelClass::kPositive) {
    throw SchemaError(
        "No Finding must be Blank or Positive, got " +
        std::string(label_class_name(nf)));
  }
}

bool is_valid(const LabelVector& vec) {
  const LabelClass nf = vec.at(Condition::kNoFinding);
  return nf == LabelClass::kBlank || nf == LabelClass::kPositive;
}

LabelClass parse_label_value(const std::optional<std::string>& raw,
                             std::string_view context) {
  const std::string s = raw ? trim(*raw) : std::string();
  if (s.empty()) return LabelClass::kBlank;
  if (s == "1" || s == "1.0") return LabelClass::kPositive;
  if (s == "0" || s == "0.0") return LabelClass::kNegative;
  if (s == "-1" || s == "-1.0") return LabelClass::kUncertain;
  std::string where = context.empty() ? std::string()
                                      : " in column '" + std::string(context) +
                                            "'";
  throw FormatError("unrecognized label value '" + s + "'" + where +
                    " (expected empty, 1.0, 0.0 or -1.0)");
}

std::string encode_label_value(LabelClass c) {
  switch (c) {
    case LabelClass::kBlank:
      return "";
    case LabelClass::kPositive:
      return "1.0";
    case LabelClass::kNegative:
      return "0.0";
    case LabelClass::kUncertain:
      return "-1.0";
  }
  return "";
}

std::array<std::string, kNumConditions> encode_label_row(
    const LabelVector& vec) {
  validate(vec);
  std::array<std::string, kNumConditions> row;
  for (const Condition c : all_conditions()) {
    row[condition_index(c)] = encode_label_value(vec.at(c));
  }
  return row;
}

}  // namespace radlabel
