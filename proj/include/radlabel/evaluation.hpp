#ifndef RADLABEL_EVALUATION_HPP
#define RADLABEL_EVALUATION_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radlabel/label_schema.hpp"

namespace radlabel {

struct EvalConfig {
  int n_bootstrap = 1000;
  double alpha = 0.05;  // two-sided: quantiles alpha/2 and 1 - alpha/2
  std::int64_t seed = 0;
};

struct TaskScore {
  std::optional<double> f1;  // undefined iff 2TP+FP+FN = 0
  std::int64_t support = 0;  // count of gold == class of interest
};

using ConfidenceInterval = std::pair<double, double>;

struct ConditionScore {
  TaskScore positive, negative, uncertain;
  std::optional<double> weighted_f1;
  std::optional<ConfidenceInterval> ci;

  const TaskScore& task(LabelClass c) const;
};

struct EvalReport {
  std::array<ConditionScore, kNumConditions> per_condition;
  double macro_f1 = 0.0;
  std::optional<ConfidenceInterval> macro_ci;
  int undefined_conditions = 0;  // excluded from the macro average
  EvalConfig config;
};

struct ConditionDiff {
  std::optional<double> diff;  // a - b on the full sample
  std::optional<ConfidenceInterval> ci;
};

struct Comparison {
  double mean_diff = 0.0;  // mean of the replicate paired differences
  ConfidenceInterval ci{0.0, 0.0};
  double p_value_two_sided = 1.0;
  std::array<ConditionDiff, kNumConditions> per_condition_diffs;
  // By gold class: #(a correct) - #(b correct); rows sum to `total`.
  std::array<std::int64_t, kNumLabelClasses> correct_count_diffs{};
  std::int64_t correct_count_total = 0;
  EvalConfig config;
};

// F1 of retrieving `class_of_interest` (all other classes pooled as
// negative): f1 = 2TP / (2TP + FP + FN), undefined when the denominator is
// zero. Returns (f1, support). Throws LengthError.
TaskScore binary_f1(std::span<const LabelClass> preds,
                    std::span<const LabelClass> gold,
                    LabelClass class_of_interest);

// Support-weighted average of the positive/negative/uncertain retrieval
// F1s for one condition (no CI attached).
ConditionScore weighted_f1_condition(const std::vector<LabelVector>& preds,
                                     const std::vector<LabelVector>& gold,
                                     Condition condition);

// Unweighted mean over conditions with a defined weighted F1. Throws
// AllUndefinedError when none is defined. `undefined_count`, when given,
// receives the number of excluded conditions.
double macro_f1(const std::array<ConditionScore, kNumConditions>& scores,
                int* undefined_count = nullptr);

struct BootstrapCi {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> replicates;
};

// Percentile bootstrap over report indices. The statistic receives a
// resampled index multiset (the identity permutation for the point
// estimate). Replicate r draws from a stream seeded by (cfg.seed, r), so
// parallel and serial execution agree bit-for-bit. Quantiles are
// nearest-rank order statistics of the replicates.
BootstrapCi bootstrap_ci(
    const std::function<double(std::span<const std::size_t>)>& statistic,
    std::size_t n_items, const EvalConfig& cfg, int n_threads = 1);

// Point scores plus bootstrap CIs for the 14 conditions and the macro
// average; per-condition CIs share replicates with the macro CI.
EvalReport evaluate_predictions(const std::vector<LabelVector>& preds,
                                const std::vector<LabelVector>& gold,
                                const EvalConfig& cfg, bool with_ci = true,
                                int n_threads = 1);

// Paired bootstrap comparison of two prediction sets on shared resamples.
Comparison compare_models(const std::vector<LabelVector>& preds_a,
                          const std::vector<LabelVector>& preds_b,
                          const std::vector<LabelVector>& gold,
                          const EvalConfig& cfg, int n_threads = 1);

// --- formatted per-condition table ---------------------------------------

struct ReportRow {
  std::string label;  // condition name or "Average"
  std::optional<double> f1;
  std::optional<ConfidenceInterval> ci;
  std::optional<double> improvement;
  std::optional<ConfidenceInterval> improvement_ci;
};

struct ReportTable {
  bool has_improvement = false;
  std::vector<ReportRow> rows;  // conditions then the Average row
};

// Rows in canonical order, or in descending order of improvement when a
// comparison is supplied (undefined improvements last).
ReportTable per_condition_report(const EvalReport& eval,
                                 const Comparison* comparison = nullptr);

// Machine-readable rendering (full double precision; empty cell =
// undefined) and its parser; parse(render(t)) preserves every value.
std::string render_table_csv(const ReportTable& table);
ReportTable parse_table_csv(const std::string& text);

// Fixed-width human rendering.
std::string render_table_text(const ReportTable& table);

std::string to_json_string(const EvalReport& report);
std::string to_json_string(const Comparison& comparison);

namespace detail {

// Scores one condition over a resampled index multiset.
ConditionScore score_condition(const std::vector<LabelVector>& preds,
                               const std::vector<LabelVector>& gold,
                               Condition condition,
                               std::span<const std::size_t> idx);

// Resample for replicate r: n_items draws with replacement, seeded from
// (seed, r).
std::vector<std::size_t> replicate_indices(std::int64_t seed, int replicate,
                                           std::size_t n_items);

// Nearest-rank quantile of ascending `sorted` (no interpolation).
double nearest_rank_quantile(const std::vector<double>& sorted, double q);

}  // namespace detail

}  // namespace radlabel

#endif  // RADLABEL_EVALUATION_HPP
