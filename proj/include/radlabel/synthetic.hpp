#ifndef RADLABEL_SYNTHETIC_HPP
#define RADLABEL_SYNTHETIC_HPP

#include <cstdint>
#include <string>

#include "radlabel/corpus.hpp"

namespace radlabel {

// Seeded generator for a separable demo corpus: every (condition, class)
// pair has a unique trigger token, so labels are a deterministic function
// of the text. Ships the repo's demo data and drives the training smoke
// tests without restricted datasets.
// Class priors default to balanced (25/25/25/25 per condition, 50/50 for
// No Finding) so no head starts with a majority-class advantage.
struct SyntheticSpec {
  std::size_t n_reports = 960;
  std::uint64_t seed = 7;
  double p_no_finding = 0.5;   // No Finding positive (all-clear trigger)
  double p_positive = 0.25;    // per condition; remainder is Blank
  double p_negative = 0.25;
  double p_uncertain = 0.25;
  std::size_t min_fillers = 1;
  std::size_t max_fillers = 3;
  Provenance provenance = Provenance::kExpert;
  std::string id_prefix = "synth";
};

Dataset make_synthetic_corpus(const SyntheticSpec& spec);

// The trigger token injected for (condition, class); class must not be
// Blank. No Finding positive uses a dedicated all-clear trigger.
std::string synthetic_trigger(Condition c, LabelClass k);

}  // namespace radlabel

#endif  // RADLABEL_SYNTHETIC_HPP
