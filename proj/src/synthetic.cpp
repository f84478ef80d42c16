#include "radlabel/synthetic.hpp"

#include <cstdio>

#include "radlabel/errors.hpp"
#include "radlabel/rng.hpp"

namespace radlabel {

namespace {

constexpr std::array<const char*, kNumConditions> kSlugs = {
    "atel", "cardio", "consol", "edema", "encm", "fract", "lesion",
    "opac", "noftrig", "pleff", "plo", "pna", "ptx", "dev"};

constexpr std::array<const char*, 10> kFillers = {
    "the",  "chest",    "xray",  "views",   "stable",
    "seen", "portable", "again", "frontal", "lateral"};

}  // namespace

std::string synthetic_trigger(Condition c, LabelClass k) {
  if (c == Condition::kNoFinding) return "allclear";
  switch (k) {
    case LabelClass::kPositive:
      return std::string(kSlugs[condition_index(c)]) + "pos";
    case LabelClass::kNegative:
      return std::string(kSlugs[condition_index(c)]) + "neg";
    case LabelClass::kUncertain:
      return std::string(kSlugs[condition_index(c)]) + "unc";
    case LabelClass::kBlank:
      break;
  }
  throw ConfigError("Blank has no trigger token");
}

Dataset make_synthetic_corpus(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  Dataset ds;
  ds.seed = static_cast<std::int64_t>(spec.seed);
  ds.items.reserve(spec.n_reports);

  for (std::size_t i = 0; i < spec.n_reports; ++i) {
    LabeledReport item;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s-%05zu", spec.id_prefix.c_str(), i);
    item.report.report_id = buf;
    std::snprintf(buf, sizeof(buf), "%s-pat-%05zu", spec.id_prefix.c_str(), i);
    item.report.patient_id = buf;
    item.provenance = spec.provenance;

    std::vector<std::string> tokens;
    const std::size_t n_fillers =
        spec.min_fillers +
        static_cast<std::size_t>(
            rng.uniform_below(spec.max_fillers - spec.min_fillers + 1));
    for (std::size_t f = 0; f < n_fillers; ++f) {
      tokens.emplace_back(
          kFillers[rng.uniform_below(kFillers.size())]);
    }

    if (rng.uniform() < spec.p_no_finding) {
      item.labels.set(Condition::kNoFinding, LabelClass::kPositive);
      tokens.push_back(
          synthetic_trigger(Condition::kNoFinding, LabelClass::kPositive));
    }
    for (const Condition c : all_conditions()) {
      if (c == Condition::kNoFinding) continue;
      const double u = rng.uniform();
      LabelClass k = LabelClass::kBlank;
      if (u < spec.p_positive) {
        k = LabelClass::kPositive;
      } else if (u < spec.p_positive + spec.p_negative) {
        k = LabelClass::kNegative;
      } else if (u < spec.p_positive + spec.p_negative + spec.p_uncertain) {
        k = LabelClass::kUncertain;
      }
      if (k != LabelClass::kBlank) {
        item.labels.set(c, k);
        tokens.push_back(synthetic_trigger(c, k));
      }
    }
    rng.shuffle(tokens);

    std::string text;
    for (const auto& t : tokens) {
      if (!text.empty()) text.push_back(' ');
      text += t;
    }
    item.report.text = std::move(text);
    ds.items.push_back(std::move(item));
  }
  return ds;
}

}  // namespace radlabel
