#include "radlabel/training.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "radlabel/checkpoint.hpp"
#include "radlabel/evaluation.hpp"
#include "radlabel/optimizer.hpp"
#include "radlabel/rng.hpp"

namespace radlabel {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::kRad:
      return "rad";
    case StrategyKind::kAuto:
      return "auto";
    case StrategyKind::kHybrid:
      return "hybrid";
  }
  return "rad";
}

std::optional<StrategyKind> strategy_from_name(std::string_view name) {
  if (name == "rad") return StrategyKind::kRad;
  if (name == "auto") return StrategyKind::kAuto;
  if (name == "hybrid") return StrategyKind::kHybrid;
  return std::nullopt;
}

std::optional<FreezeBaseline> freeze_baseline_from_name(
    std::string_view name) {
  if (name == "full") return FreezeBaseline::kFull;
  if (name == "t_cls") return FreezeBaseline::kTCls;
  if (name == "t_token") return FreezeBaseline::kTToken;
  return std::nullopt;
}

void apply_freeze(MultiHeadClassifier& model, FreezeBaseline baseline) {
  switch (baseline) {
    case FreezeBaseline::kFull:
      model.set_freeze_mode(FreezeMode::kNone);
      break;
    case FreezeBaseline::kTCls:
      model.set_freeze_mode(FreezeMode::kEncoderFrozen);
      model.set_head_input_mode(HeadInputMode::kCls);
      break;
    case FreezeBaseline::kTToken:
      model.set_freeze_mode(FreezeMode::kEncoderFrozen);
      model.set_head_input_mode(HeadInputMode::kTokenAverage);
      break;
  }
}

namespace {

struct PhaseData {
  std::vector<TokenSequence> train_tokens;
  std::vector<LabelVector> train_labels;
  std::vector<TokenSequence> dev_tokens;
  std::vector<LabelVector> dev_labels;
};

PhaseData prepare_phase(const MultiHeadClassifier& model, const Dataset& ds,
                        const char* phase) {
  if (!ds.has_split()) {
    throw ConfigError(std::string(phase) +
                      " dataset carries no train/dev split");
  }
  PhaseData data;
  for (const auto& item : ds.items) {
    const auto it = ds.split.find(item.report.report_id);
    const bool is_train = it->second == Split::kTrain;
    auto tokens = model.encoder().tokenize(item.report.text);
    if (is_train) {
      data.train_tokens.push_back(std::move(tokens));
      data.train_labels.push_back(item.labels);
    } else {
      data.dev_tokens.push_back(std::move(tokens));
      data.dev_labels.push_back(item.labels);
    }
  }
  if (data.train_tokens.empty()) {
    throw DataError(std::string(phase) + " train split is empty");
  }
  if (data.dev_tokens.empty()) {
    throw DataError(std::string(phase) + " dev split is empty");
  }
  return data;
}

void append_history(const std::string& out_dir, const EvalPoint& pt) {
  std::ofstream out(fs::path(out_dir) / "history.jsonl", std::ios::app);
  if (!out) throw IOError("cannot append history in '" + out_dir + "'");
  json per_condition;
  for (const Condition c : all_conditions()) {
    const auto& v = pt.per_condition_f1[condition_index(c)];
    per_condition[std::string(condition_name(c))] =
        v ? json(*v) : json(nullptr);
  }
  const json rec{{"phase", pt.phase},
                 {"step", pt.step},
                 {"epoch", pt.epoch},
                 {"train_loss", pt.train_loss},
                 {"dev_macro_f1",
                  std::isnan(pt.dev_macro_f1) ? json(nullptr)
                                              : json(pt.dev_macro_f1)},
                 {"per_condition_f1", per_condition}};
  out << rec.dump() << '\n';
}

struct PhaseResult {
  std::vector<EvalPoint> history;
  std::string best_checkpoint;
  double best_dev_f1 = -1.0;
};

// One training phase: epochs of seeded-shuffle minibatches with periodic
// dev evaluation and best-checkpoint selection. `early_stop` enables the
// patience rule (rad phases); the auto phase always runs its full epoch
// budget.
PhaseResult run_phase(MultiHeadClassifier& model, const PhaseData& data,
                      const HyperParams& hp, int max_epochs, bool early_stop,
                      const std::string& phase, const std::string& out_dir,
                      const std::string& ckpt_name) {
  AdamOptimizer opt(model.trainable_parameters(), hp.learning_rate);

  PhaseResult result;
  result.best_checkpoint = (fs::path(out_dir) / ckpt_name).string();

  const std::size_t n = data.train_tokens.size();
  const auto batch_size = static_cast<std::size_t>(hp.batch_size);
  std::int64_t step = 0;
  int evals_since_improvement = 0;
  double loss_accum = 0.0;
  std::int64_t loss_batches = 0;
  std::int64_t last_eval_step = -1;
  bool stop = false;

  auto evaluate = [&](int epoch) {
    if (step == last_eval_step) return;
    last_eval_step = step;

    EvalPoint pt;
    pt.phase = phase;
    pt.step = step;
    pt.epoch = epoch;
    pt.train_loss = loss_batches > 0
                        ? loss_accum / static_cast<double>(loss_batches)
                        : std::numeric_limits<double>::quiet_NaN();
    loss_accum = 0.0;
    loss_batches = 0;

    std::vector<LabelVector> preds;
    preds.reserve(data.dev_tokens.size());
    for (std::size_t i = 0; i < data.dev_tokens.size(); i += batch_size) {
      const auto end = std::min(i + batch_size, data.dev_tokens.size());
      std::vector<TokenSequence> batch(data.dev_tokens.begin() + i,
                                       data.dev_tokens.begin() + end);
      auto batch_preds = model.predict(batch, hp.threads);
      preds.insert(preds.end(), batch_preds.begin(), batch_preds.end());
    }
    double macro = std::numeric_limits<double>::quiet_NaN();
    try {
      std::array<ConditionScore, kNumConditions> scores;
      for (const Condition c : all_conditions()) {
        scores[condition_index(c)] =
            weighted_f1_condition(preds, data.dev_labels, c);
        pt.per_condition_f1[condition_index(c)] =
            scores[condition_index(c)].weighted_f1;
      }
      macro = macro_f1(scores);
    } catch (const AllUndefinedError&) {
      // keep NaN; counts as no improvement
    }
    pt.dev_macro_f1 = macro;
    result.history.push_back(pt);
    append_history(out_dir, pt);

    if (!std::isnan(macro) && macro > result.best_dev_f1) {
      result.best_dev_f1 = macro;
      save_checkpoint(model, result.best_checkpoint);
      evals_since_improvement = 0;
    } else {
      ++evals_since_improvement;
      if (early_stop && evals_since_improvement >= hp.patience) stop = true;
    }
  };

  for (int epoch = 1; epoch <= max_epochs && !stop; ++epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(mix_seed(static_cast<std::uint64_t>(hp.seed),
                             mix_seed(phase == "auto" ? 1 : 2,
                                      static_cast<std::uint64_t>(epoch))));
    shuffle_rng.shuffle(order);

    for (std::size_t start = 0; start < n && !stop; start += batch_size) {
      const auto end = std::min(start + batch_size, n);
      std::vector<TokenSequence> batch;
      std::vector<LabelVector> gold;
      batch.reserve(end - start);
      gold.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(data.train_tokens[order[i]]);
        gold.push_back(data.train_labels[order[i]]);
      }
      model.zero_grads();
      const double loss = model.loss_and_gradients(batch, gold, hp.threads);
      opt.step();
      ++step;
      loss_accum += loss;
      ++loss_batches;
      if (hp.eval_every > 0 && step % hp.eval_every == 0) evaluate(epoch);
    }
    if (!stop) evaluate(epoch);
  }

  if (result.best_dev_f1 < 0.0) {
    throw DataError("no checkpoint was selected in phase " + phase +
                    " (dev F1 never defined)");
  }
  return result;
}

void check_strategy(const TrainStrategy& strategy) {
  switch (strategy.kind) {
    case StrategyKind::kRad:
      if (!strategy.rad_data) {
        throw ConfigError("strategy 'rad' requires rad_data");
      }
      break;
    case StrategyKind::kAuto:
      if (!strategy.auto_data) {
        throw ConfigError("strategy 'auto' requires auto_data");
      }
      break;
    case StrategyKind::kHybrid:
      if (!strategy.rad_data) {
        throw ConfigError("strategy 'hybrid' requires rad_data");
      }
      if (!strategy.auto_data && !strategy.init_checkpoint) {
        throw ConfigError(
            "strategy 'hybrid' requires auto_data or init_checkpoint");
      }
      break;
  }
}

}  // namespace

TrainRun train(MultiHeadClassifier& model, const TrainStrategy& strategy,
               const HyperParams& hp, const std::string& out_dir) {
  check_strategy(strategy);
  if (hp.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(hp.learning_rate > 0.0)) {
    throw ConfigError("learning_rate must be positive");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IOError("cannot create run directory '" + out_dir + "'");

  TrainRun run;

  if (strategy.kind == StrategyKind::kAuto ||
      strategy.kind == StrategyKind::kHybrid) {
    if (strategy.kind == StrategyKind::kHybrid && strategy.init_checkpoint) {
      // Auto phase already trained elsewhere; start from its weights.
      load_weights_into(model, *strategy.init_checkpoint);
      run.auto_best_checkpoint = *strategy.init_checkpoint;
    } else {
      const PhaseData data =
          prepare_phase(model, *strategy.auto_data, "auto");
      PhaseResult res = run_phase(model, data, hp, hp.auto_max_epochs,
                                  /*early_stop=*/false, "auto", out_dir,
                                  "checkpoint-auto-best");
      // Continue (or hand off) from the best checkpoint, never the last.
      load_weights_into(model, res.best_checkpoint);
      run.auto_best_checkpoint = res.best_checkpoint;
      run.auto_history = std::move(res.history);
      if (strategy.kind == StrategyKind::kAuto) {
        run.best_checkpoint = res.best_checkpoint;
        run.best_dev_f1 = res.best_dev_f1;
        run.history = std::move(run.auto_history);
        run.auto_history.clear();
        return run;
      }
    }
  }

  // rad finetune (rad and hybrid): fresh optimizer state, selection on the
  // expert dev split.
  const PhaseData data = prepare_phase(model, *strategy.rad_data, "rad");
  PhaseResult res = run_phase(model, data, hp, hp.max_epochs,
                              /*early_stop=*/true, "rad", out_dir,
                              "checkpoint-best");
  run.best_checkpoint = res.best_checkpoint;
  run.best_dev_f1 = res.best_dev_f1;
  run.history = std::move(res.history);
  return run;
}

}  // namespace radlabel
