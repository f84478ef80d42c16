#ifndef RADLABEL_TRAINING_HPP
#define RADLABEL_TRAINING_HPP

#include <optional>
#include <string>
#include <vector>

#include "radlabel/corpus.hpp"
#include "radlabel/model.hpp"

namespace radlabel {

enum class StrategyKind { kRad, kAuto, kHybrid };

std::string_view strategy_name(StrategyKind k);
std::optional<StrategyKind> strategy_from_name(std::string_view name);

// rad: finetune on expert labels. auto: train on rule-labeler outputs.
// hybrid: auto phase first (or weights from init_checkpoint), then a fresh
// optimizer and an expert finetune.
struct TrainStrategy {
  StrategyKind kind = StrategyKind::kRad;
  std::optional<Dataset> rad_data;
  std::optional<Dataset> auto_data;
  std::optional<std::string> init_checkpoint;
};

// Frozen-encoder baselines; full leaves the model untouched.
enum class FreezeBaseline { kFull, kTCls, kTToken };

std::optional<FreezeBaseline> freeze_baseline_from_name(std::string_view name);

void apply_freeze(MultiHeadClassifier& model, FreezeBaseline baseline);

struct EvalPoint {
  std::string phase;  // "auto" or "rad"
  std::int64_t step = 0;
  int epoch = 0;
  double train_loss = 0.0;    // mean batch loss since the previous eval
  double dev_macro_f1 = 0.0;  // NaN when undefined on the dev split
  std::array<std::optional<double>, kNumConditions> per_condition_f1;
};

struct TrainRun {
  // Final phase only (the phase whose dev split selects best_checkpoint);
  // for hybrid, the auto phase history is in auto_history.
  std::vector<EvalPoint> history;
  std::vector<EvalPoint> auto_history;
  std::string best_checkpoint;
  double best_dev_f1 = 0.0;
  std::optional<std::string> auto_best_checkpoint;
};

// Runs the strategy, evaluating macro weighted-F1 on the dev split every
// eval_every steps and at each epoch end, checkpointing on improvement.
// Returns the best checkpoint, never the last. Writes history.jsonl and
// checkpoints under out_dir.
TrainRun train(MultiHeadClassifier& model, const TrainStrategy& strategy,
               const HyperParams& hp, const std::string& out_dir);

}  // namespace radlabel

#endif  // RADLABEL_TRAINING_HPP
