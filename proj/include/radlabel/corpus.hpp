#ifndef RADLABEL_CORPUS_HPP
#define RADLABEL_CORPUS_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radlabel/label_schema.hpp"

namespace radlabel {

struct Report {
  std::string report_id;
  std::string patient_id;
  std::string text;  // whitespace-normalized

  bool operator==(const Report&) const = default;
};

enum class Provenance { kExpert, kAutomatic, kBacktranslated };

std::string_view provenance_name(Provenance p);
std::optional<Provenance> provenance_from_name(std::string_view name);

struct LabeledReport {
  Report report;
  LabelVector labels;
  Provenance provenance = Provenance::kExpert;

  bool operator==(const LabeledReport&) const = default;
};

enum class Split { kTrain, kDev };

// Ordered, immutable-by-convention snapshot of labeled reports. The split,
// when assigned, is total over items and keyed by report_id.
struct Dataset {
  std::vector<LabeledReport> items;
  std::map<std::string, Split> split;  // empty = unsplit
  std::int64_t seed = 0;               // seed used for the split assignment

  bool has_split() const { return !split.empty(); }
  std::vector<std::size_t> split_indices(Split s) const;
};

// Replaces newlines by spaces, collapses whitespace runs to a single space
// and strips leading/trailing whitespace. Idempotent.
std::string normalize_text(const std::string& raw);

// Keeps the first occurrence per (patient_id, normalized text), preserving
// order otherwise. Idempotent; never increases size. Split assignments of
// surviving items are kept.
Dataset dedup_reports(const Dataset& ds);

// Assigns every item to train or dev. |train| = round-half-up of
// fraction*N. Deterministic in (item ids, fraction, seed); independent of
// item order (ids are sorted before the seeded shuffle).
Dataset split_random(const Dataset& ds, double train_fraction,
                     std::int64_t seed);

struct PrevalenceCell {
  std::int64_t count = 0;
  double fraction = 0.0;
};

using PrevalenceTable =
    std::array<std::array<PrevalenceCell, kNumLabelClasses>, kNumConditions>;

// Per-condition class counts and fractions. Fractions are 0 on an empty
// dataset, otherwise they sum to 1 per condition.
PrevalenceTable class_prevalence(const Dataset& ds);

struct LoadResult {
  Dataset dataset;
  // 1-based CSV row numbers whose text was empty after normalization; the
  // rows are retained.
  std::vector<std::size_t> empty_text_rows;
  bool labeled = false;
};

// Columns: report_id, patient_id, text, then (labeled files) the 14
// condition columns in canonical order, then optional provenance and split
// columns. Text is normalized on load; label rows are validated.
LoadResult load_reports_csv(const std::string& path,
                            Provenance default_provenance =
                                Provenance::kExpert);

struct CsvWriteOptions {
  bool labels = true;
  bool provenance = false;
  bool split = false;
};

void write_reports_csv(const Dataset& ds, const std::string& path,
                       const CsvWriteOptions& options = {});

}  // namespace radlabel

#endif  // RADLABEL_CORPUS_HPP
