#include "radlabel/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "radlabel/csv.hpp"
#include "radlabel/errors.hpp"
#include "radlabel/rng.hpp"

namespace radlabel {

namespace {

constexpr std::array<LabelClass, 3> kTasks = {
    LabelClass::kPositive, LabelClass::kNegative, LabelClass::kUncertain};

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw LengthError(std::string(what) + ": " + std::to_string(a) + " vs " +
                      std::to_string(b));
  }
}

std::vector<std::size_t> identity_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

std::optional<double> macro_over(
    const std::vector<LabelVector>& preds, const std::vector<LabelVector>& gold,
    std::span<const std::size_t> idx,
    std::array<ConditionScore, kNumConditions>* per_condition) {
  double sum = 0.0;
  int defined = 0;
  for (const Condition c : all_conditions()) {
    ConditionScore score = detail::score_condition(preds, gold, c, idx);
    if (score.weighted_f1) {
      sum += *score.weighted_f1;
      ++defined;
    }
    if (per_condition) (*per_condition)[condition_index(c)] = std::move(score);
  }
  if (defined == 0) return std::nullopt;
  return sum / defined;
}

// Runs `fn(r)` for every replicate, split over threads; results land in a
// preallocated slot per replicate so the schedule cannot affect values.
template <typename Fn>
void for_each_replicate(int n_replicates, int n_threads, const Fn& fn) {
  if (n_threads <= 1) {
    for (int r = 0; r < n_replicates; ++r) fn(r);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < n_replicates;
           r = next.fetch_add(1)) {
        fn(r);
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::optional<ConfidenceInterval> percentile_ci(std::vector<double> values,
                                                double alpha) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  return ConfidenceInterval{
      detail::nearest_rank_quantile(values, alpha / 2.0),
      detail::nearest_rank_quantile(values, 1.0 - alpha / 2.0)};
}

void check_eval_config(const EvalConfig& cfg) {
  if (cfg.n_bootstrap <= 0) {
    throw ConfigError("n_bootstrap must be positive");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1)");
  }
}

}  // namespace

const TaskScore& ConditionScore::task(LabelClass c) const {
  switch (c) {
    case LabelClass::kNegative:
      return negative;
    case LabelClass::kUncertain:
      return uncertain;
    default:
      return positive;
  }
}

TaskScore binary_f1(std::span<const LabelClass> preds,
                    std::span<const LabelClass> gold,
                    LabelClass class_of_interest) {
  check_lengths(preds.size(), gold.size(), "preds/gold length mismatch");
  std::int64_t tp = 0, fp = 0, fn = 0, support = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == class_of_interest;
    const bool g = gold[i] == class_of_interest;
    if (g) ++support;
    if (p && g) ++tp;
    else if (p) ++fp;
    else if (g) ++fn;
  }
  TaskScore score;
  score.support = support;
  const std::int64_t denom = 2 * tp + fp + fn;
  if (denom > 0) {
    score.f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
  return score;
}

namespace detail {

ConditionScore score_condition(const std::vector<LabelVector>& preds,
                               const std::vector<LabelVector>& gold,
                               Condition condition,
                               std::span<const std::size_t> idx) {
  std::vector<LabelClass> p(idx.size()), g(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    p[i] = preds[idx[i]].at(condition);
    g[i] = gold[idx[i]].at(condition);
  }
  ConditionScore score;
  score.positive = binary_f1(p, g, LabelClass::kPositive);
  score.negative = binary_f1(p, g, LabelClass::kNegative);
  score.uncertain = binary_f1(p, g, LabelClass::kUncertain);

  double weighted_sum = 0.0;
  std::int64_t support_sum = 0;
  for (const LabelClass task : kTasks) {
    const TaskScore& ts = score.task(task);
    if (ts.support > 0 && ts.f1) {
      weighted_sum += static_cast<double>(ts.support) * *ts.f1;
      support_sum += ts.support;
    }
  }
  if (support_sum > 0) score.weighted_f1 = weighted_sum / support_sum;
  return score;
}

std::vector<std::size_t> replicate_indices(std::int64_t seed, int replicate,
                                           std::size_t n_items) {
  Rng rng(mix_seed(static_cast<std::uint64_t>(seed),
                   static_cast<std::uint64_t>(replicate)));
  std::vector<std::size_t> idx(n_items);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_below(n_items));
  return idx;
}

double nearest_rank_quantile(const std::vector<double>& sorted, double q) {
  const auto n = static_cast<double>(sorted.size());
  // Smallest k with k >= q*n; the epsilon absorbs representation error in
  // q*n (e.g. 0.025*1000).
  auto k = static_cast<std::ptrdiff_t>(std::ceil(q * n - 1e-9));
  k = std::clamp<std::ptrdiff_t>(k, 1, static_cast<std::ptrdiff_t>(n));
  return sorted[static_cast<std::size_t>(k - 1)];
}

}  // namespace detail

ConditionScore weighted_f1_condition(const std::vector<LabelVector>& preds,
                                     const std::vector<LabelVector>& gold,
                                     Condition condition) {
  check_lengths(preds.size(), gold.size(), "preds/gold length mismatch");
  return detail::score_condition(preds, gold, condition,
                                 identity_indices(preds.size()));
}

double macro_f1(const std::array<ConditionScore, kNumConditions>& scores,
                int* undefined_count) {
  double sum = 0.0;
  int defined = 0;
  for (const auto& s : scores) {
    if (s.weighted_f1) {
      sum += *s.weighted_f1;
      ++defined;
    }
  }
  if (undefined_count) {
    *undefined_count = static_cast<int>(kNumConditions) - defined;
  }
  if (defined == 0) {
    throw AllUndefinedError("every condition score is undefined");
  }
  return sum / defined;
}

BootstrapCi bootstrap_ci(
    const std::function<double(std::span<const std::size_t>)>& statistic,
    std::size_t n_items, const EvalConfig& cfg, int n_threads) {
  check_eval_config(cfg);
  if (n_items < 2) {
    throw SizeError("bootstrap needs at least 2 items, got " +
                    std::to_string(n_items));
  }
  BootstrapCi result;
  result.point = statistic(identity_indices(n_items));
  result.replicates.resize(cfg.n_bootstrap);
  for_each_replicate(cfg.n_bootstrap, n_threads, [&](int r) {
    result.replicates[r] =
        statistic(detail::replicate_indices(cfg.seed, r, n_items));
  });
  const auto ci = percentile_ci(result.replicates, cfg.alpha);
  result.lo = ci->first;
  result.hi = ci->second;
  return result;
}

EvalReport evaluate_predictions(const std::vector<LabelVector>& preds,
                                const std::vector<LabelVector>& gold,
                                const EvalConfig& cfg, bool with_ci,
                                int n_threads) {
  check_lengths(preds.size(), gold.size(), "preds/gold length mismatch");
  EvalReport report;
  report.config = cfg;
  const auto idx = identity_indices(preds.size());
  const auto macro = macro_over(preds, gold, idx, &report.per_condition);
  if (!macro) throw AllUndefinedError("every condition score is undefined");
  report.macro_f1 = *macro;
  report.undefined_conditions =
      static_cast<int>(std::count_if(report.per_condition.begin(),
                                     report.per_condition.end(),
                                     [](const ConditionScore& s) {
                                       return !s.weighted_f1.has_value();
                                     }));
  if (!with_ci) return report;

  check_eval_config(cfg);
  if (preds.size() < 2) {
    throw SizeError("bootstrap needs at least 2 reports");
  }
  // Shared resamples: one series per condition plus one for the macro.
  std::vector<std::array<std::optional<double>, kNumConditions + 1>>
      replicates(cfg.n_bootstrap);
  for_each_replicate(cfg.n_bootstrap, n_threads, [&](int r) {
    const auto ridx = detail::replicate_indices(cfg.seed, r, preds.size());
    std::array<ConditionScore, kNumConditions> scores;
    const auto m = macro_over(preds, gold, ridx, &scores);
    for (std::size_t c = 0; c < kNumConditions; ++c) {
      replicates[r][c] = scores[c].weighted_f1;
    }
    replicates[r][kNumConditions] = m;
  });

  auto series_ci = [&](std::size_t slot) {
    std::vector<double> values;
    values.reserve(replicates.size());
    for (const auto& rep : replicates) {
      if (rep[slot]) values.push_back(*rep[slot]);
    }
    return percentile_ci(std::move(values), cfg.alpha);
  };
  for (std::size_t c = 0; c < kNumConditions; ++c) {
    report.per_condition[c].ci = series_ci(c);
  }
  report.macro_ci = series_ci(kNumConditions);
  return report;
}

Comparison compare_models(const std::vector<LabelVector>& preds_a,
                          const std::vector<LabelVector>& preds_b,
                          const std::vector<LabelVector>& gold,
                          const EvalConfig& cfg, int n_threads) {
  if (preds_a.size() != gold.size() || preds_b.size() != gold.size()) {
    throw AlignmentError("compared models must cover the same reports (" +
                         std::to_string(preds_a.size()) + ", " +
                         std::to_string(preds_b.size()) + ", " +
                         std::to_string(gold.size()) + ")");
  }
  check_eval_config(cfg);
  if (gold.size() < 2) {
    throw SizeError("comparison bootstrap needs at least 2 reports");
  }

  Comparison cmp;
  cmp.config = cfg;

  // Point estimates per condition on the full sample.
  const auto idx = identity_indices(gold.size());
  for (const Condition c : all_conditions()) {
    const auto sa = detail::score_condition(preds_a, gold, c, idx).weighted_f1;
    const auto sb = detail::score_condition(preds_b, gold, c, idx).weighted_f1;
    if (sa && sb) {
      cmp.per_condition_diffs[condition_index(c)].diff = *sa - *sb;
    }
  }

  // Paired replicates on shared resamples: macro diff + per-condition diffs.
  std::vector<std::optional<double>> macro_diffs(cfg.n_bootstrap);
  std::vector<std::array<std::optional<double>, kNumConditions>> cond_diffs(
      cfg.n_bootstrap);
  for_each_replicate(cfg.n_bootstrap, n_threads, [&](int r) {
    const auto ridx = detail::replicate_indices(cfg.seed, r, gold.size());
    std::array<ConditionScore, kNumConditions> sa, sb;
    const auto ma = macro_over(preds_a, gold, ridx, &sa);
    const auto mb = macro_over(preds_b, gold, ridx, &sb);
    if (ma && mb) macro_diffs[r] = *ma - *mb;
    for (std::size_t c = 0; c < kNumConditions; ++c) {
      if (sa[c].weighted_f1 && sb[c].weighted_f1) {
        cond_diffs[r][c] = *sa[c].weighted_f1 - *sb[c].weighted_f1;
      }
    }
  });

  std::vector<double> diffs;
  diffs.reserve(macro_diffs.size());
  for (const auto& d : macro_diffs) {
    if (d) diffs.push_back(*d);
  }
  if (diffs.empty()) {
    throw AllUndefinedError("no bootstrap replicate had a defined macro F1");
  }
  cmp.mean_diff =
      std::accumulate(diffs.begin(), diffs.end(), 0.0) /
      static_cast<double>(diffs.size());
  cmp.ci = *percentile_ci(diffs, cfg.alpha);

  // Two-sided sign p-value over the replicate distribution, clipped below
  // at 1/n_bootstrap.
  const auto n = static_cast<double>(diffs.size());
  const double frac_below =
      static_cast<double>(std::count_if(diffs.begin(), diffs.end(),
                                        [](double d) { return d < 0.0; })) /
      n;
  const double frac_above =
      static_cast<double>(std::count_if(diffs.begin(), diffs.end(),
                                        [](double d) { return d > 0.0; })) /
      n;
  cmp.p_value_two_sided =
      std::clamp(2.0 * std::min(frac_below, frac_above),
                 1.0 / static_cast<double>(cfg.n_bootstrap), 1.0);

  for (std::size_t c = 0; c < kNumConditions; ++c) {
    std::vector<double> values;
    for (const auto& rep : cond_diffs) {
      if (rep[c]) values.push_back(*rep[c]);
    }
    cmp.per_condition_diffs[c].ci = percentile_ci(std::move(values), cfg.alpha);
  }

  // Correct-assignment count differences by gold class.
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (const Condition c : all_conditions()) {
      const LabelClass g = gold[i].at(c);
      const int a_correct = preds_a[i].at(c) == g ? 1 : 0;
      const int b_correct = preds_b[i].at(c) == g ? 1 : 0;
      cmp.correct_count_diffs[static_cast<int>(g)] += a_correct - b_correct;
    }
  }
  cmp.correct_count_total =
      std::accumulate(cmp.correct_count_diffs.begin(),
                      cmp.correct_count_diffs.end(), std::int64_t{0});
  return cmp;
}

ReportTable per_condition_report(const EvalReport& eval,
                                 const Comparison* comparison) {
  ReportTable table;
  table.has_improvement = comparison != nullptr;
  for (const Condition c : all_conditions()) {
    const auto& score = eval.per_condition[condition_index(c)];
    ReportRow row;
    row.label = std::string(condition_name(c));
    row.f1 = score.weighted_f1;
    row.ci = score.ci;
    if (comparison) {
      const auto& d = comparison->per_condition_diffs[condition_index(c)];
      row.improvement = d.diff;
      row.improvement_ci = d.ci;
    }
    table.rows.push_back(std::move(row));
  }
  if (comparison) {
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const ReportRow& a, const ReportRow& b) {
                       if (a.improvement.has_value() !=
                           b.improvement.has_value()) {
                         return a.improvement.has_value();
                       }
                       if (!a.improvement) return false;
                       return *a.improvement > *b.improvement;
                     });
  }
  ReportRow avg;
  avg.label = "Average";
  avg.f1 = eval.macro_f1;
  avg.ci = eval.macro_ci;
  if (comparison) {
    avg.improvement = comparison->mean_diff;
    avg.improvement_ci = comparison->ci;
  }
  table.rows.push_back(std::move(avg));
  return table;
}

namespace {

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? full_precision(*v) : std::string();
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw FormatError("bad numeric cell '" + s + "'");
  return v;
}

std::optional<ConfidenceInterval> zip_ci(const std::optional<double>& lo,
                                         const std::optional<double>& hi) {
  if (lo && hi) return ConfidenceInterval{*lo, *hi};
  return std::nullopt;
}

}  // namespace

std::string render_table_csv(const ReportTable& table) {
  std::ostringstream out;
  std::vector<std::string> header = {"condition", "weighted_f1", "ci_lo",
                                     "ci_hi"};
  if (table.has_improvement) {
    header.insert(header.end(),
                  {"improvement", "improvement_ci_lo", "improvement_ci_hi"});
  }
  csv::write_row(out, header);
  for (const auto& row : table.rows) {
    std::vector<std::string> cells = {
        row.label, opt_cell(row.f1),
        row.ci ? full_precision(row.ci->first) : "",
        row.ci ? full_precision(row.ci->second) : ""};
    if (table.has_improvement) {
      cells.push_back(opt_cell(row.improvement));
      cells.push_back(row.improvement_ci
                          ? full_precision(row.improvement_ci->first)
                          : "");
      cells.push_back(row.improvement_ci
                          ? full_precision(row.improvement_ci->second)
                          : "");
    }
    csv::write_row(out, cells);
  }
  return out.str();
}

ReportTable parse_table_csv(const std::string& text) {
  std::istringstream in(text);
  const auto rows = csv::read_all(in);
  if (rows.empty()) throw FormatError("empty report table");
  ReportTable table;
  table.has_improvement = rows[0].size() > 4;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != rows[0].size()) {
      throw FormatError("report table row " + std::to_string(r + 1) +
                        " has wrong arity");
    }
    ReportRow row;
    row.label = cells[0];
    row.f1 = parse_opt(cells[1]);
    row.ci = zip_ci(parse_opt(cells[2]), parse_opt(cells[3]));
    if (table.has_improvement) {
      row.improvement = parse_opt(cells[4]);
      row.improvement_ci = zip_ci(parse_opt(cells[5]), parse_opt(cells[6]));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string render_table_text(const ReportTable& table) {
  std::ostringstream out;
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("   -  ");
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%6.3f", *v);
    return std::string(buf);
  };
  auto fmt_ci = [](const std::optional<ConfidenceInterval>& ci) {
    if (!ci) return std::string("(  -  ,   -  )");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "(%.3f, %.3f)", ci->first, ci->second);
    return std::string(buf);
  };
  for (const auto& row : table.rows) {
    out << (row.label == "Average" ? "-----\n" : "");
    out << std::string(28 - std::min<std::size_t>(row.label.size(), 27), ' ')
        << row.label << "  " << fmt(row.f1) << " " << fmt_ci(row.ci);
    if (table.has_improvement) {
      out << "  " << fmt(row.improvement) << " " << fmt_ci(row.improvement_ci);
    }
    out << '\n';
  }
  return out.str();
}

namespace {

using nlohmann::json;

json ci_json(const std::optional<ConfidenceInterval>& ci) {
  if (!ci) return nullptr;
  return json::array({ci->first, ci->second});
}

json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

json task_json(const TaskScore& t) {
  return json{{"f1", opt_json(t.f1)}, {"support", t.support}};
}

json config_json(const EvalConfig& cfg) {
  return json{{"n_bootstrap", cfg.n_bootstrap},
              {"alpha", cfg.alpha},
              {"seed", cfg.seed}};
}

}  // namespace

std::string to_json_string(const EvalReport& report) {
  json per_condition = json::array();
  for (const Condition c : all_conditions()) {
    const auto& s = report.per_condition[condition_index(c)];
    per_condition.push_back(json{
        {"condition", std::string(condition_name(c))},
        {"weighted_f1", opt_json(s.weighted_f1)},
        {"ci", ci_json(s.ci)},
        {"tasks",
         {{"positive", task_json(s.positive)},
          {"negative", task_json(s.negative)},
          {"uncertain", task_json(s.uncertain)}}},
    });
  }
  const json doc{{"config", config_json(report.config)},
                 {"macro_f1", report.macro_f1},
                 {"macro_ci", ci_json(report.macro_ci)},
                 {"undefined_conditions", report.undefined_conditions},
                 {"per_condition", per_condition}};
  return doc.dump(2);
}

std::string to_json_string(const Comparison& cmp) {
  json per_condition = json::array();
  for (const Condition c : all_conditions()) {
    const auto& d = cmp.per_condition_diffs[condition_index(c)];
    per_condition.push_back(json{
        {"condition", std::string(condition_name(c))},
        {"diff", opt_json(d.diff)},
        {"ci", ci_json(d.ci)},
    });
  }
  json counts;
  for (std::size_t k = 0; k < kNumLabelClasses; ++k) {
    counts[std::string(label_class_name(static_cast<LabelClass>(k)))] =
        cmp.correct_count_diffs[k];
  }
  counts["Total"] = cmp.correct_count_total;
  const json doc{{"config", config_json(cmp.config)},
                 {"mean_diff", cmp.mean_diff},
                 {"ci", json::array({cmp.ci.first, cmp.ci.second})},
                 {"p_value_two_sided", cmp.p_value_two_sided},
                 {"per_condition", per_condition},
                 {"correct_count_diffs", counts}};
  return doc.dump(2);
}

}  // namespace radlabel
