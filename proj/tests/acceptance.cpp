// Acceptance suite: one self-contained check per release criterion, one
// PASS/FAIL line each. Exit code = number of failed criteria.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <vector>

#include "radlabel/augmentation.hpp"
#include "radlabel/checkpoint.hpp"
#include "radlabel/cli.hpp"
#include "radlabel/corpus.hpp"
#include "radlabel/evaluation.hpp"
#include "radlabel/optimizer.hpp"
#include "radlabel/rng.hpp"
#include "radlabel/synthetic.hpp"
#include "radlabel/training.hpp"

using namespace radlabel;
namespace fs = std::filesystem;

namespace {

struct CriterionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw CriterionFailure(msg);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

LabelVector random_label_vector(Rng& rng) {
  LabelVector vec;
  for (const Condition c : all_conditions()) {
    vec.set(c, static_cast<LabelClass>(rng.uniform_below(class_count(c))));
  }
  return vec;
}

std::vector<LabelVector> random_label_vectors(Rng& rng, std::size_t n) {
  std::vector<LabelVector> out(n);
  for (auto& v : out) v = random_label_vector(rng);
  return out;
}

// Brute-force oracle via the full confusion matrix.
struct OracleScore {
  bool defined = false;
  double f1 = 0.0;
  std::int64_t support = 0;
};

OracleScore oracle_binary_f1(const std::vector<LabelClass>& preds,
                             const std::vector<LabelClass>& gold,
                             LabelClass cls) {
  std::int64_t confusion[4][4] = {};
  for (std::size_t i = 0; i < preds.size(); ++i) {
    confusion[static_cast<int>(gold[i])][static_cast<int>(preds[i])]++;
  }
  const int k = static_cast<int>(cls);
  std::int64_t tp = confusion[k][k], fp = 0, fn = 0;
  OracleScore score;
  for (int g = 0; g < 4; ++g) {
    score.support += g == k ? confusion[k][g] : 0;
    if (g != k) {
      fp += confusion[g][k];
      fn += confusion[k][g];
    }
  }
  score.support = confusion[k][0] + confusion[k][1] + confusion[k][2] +
                  confusion[k][3];
  if (2 * tp + fp + fn > 0) {
    score.defined = true;
    score.f1 =
        2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  }
  return score;
}

// --- criteria -------------------------------------------------------------

void metric_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(90210);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.uniform_below(50);
    const auto preds = random_label_vectors(rng, n);
    const auto gold = random_label_vectors(rng, n);
    for (const Condition c : all_conditions()) {
      std::vector<LabelClass> p, g;
      for (std::size_t i = 0; i < n; ++i) {
        p.push_back(preds[i].at(c));
        g.push_back(gold[i].at(c));
      }
      double weighted_num = 0.0;
      std::int64_t weighted_den = 0;
      for (const LabelClass cls :
           {LabelClass::kPositive, LabelClass::kNegative,
            LabelClass::kUncertain}) {
        const TaskScore ours = binary_f1(p, g, cls);
        const OracleScore oracle = oracle_binary_f1(p, g, cls);
        require(ours.f1.has_value() == oracle.defined,
                "binary_f1 definedness diverges from oracle");
        require(ours.support == oracle.support,
                "binary_f1 support diverges from oracle");
        if (oracle.defined) {
          require(*ours.f1 == oracle.f1, "binary_f1 != oracle (exact)");
        }
        if (oracle.defined && oracle.support > 0) {
          weighted_num += static_cast<double>(oracle.support) * oracle.f1;
          weighted_den += oracle.support;
        }
      }
      const ConditionScore ours = weighted_f1_condition(preds, gold, c);
      require(ours.weighted_f1.has_value() == (weighted_den > 0),
              "weighted_f1 definedness diverges from oracle");
      if (weighted_den > 0) {
        require(*ours.weighted_f1 ==
                    weighted_num / static_cast<double>(weighted_den),
                "weighted_f1 != oracle (exact)");
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  require(secs < 10.0, "runtime " + fmt(secs) + "s exceeds 10s");
}

void weighted_f1_structural() {
  Rng rng(424242);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.uniform_below(40);
    const auto preds = random_label_vectors(rng, n);
    const auto gold = random_label_vectors(rng, n);

    // No Finding reduces to the positive-task F1.
    const ConditionScore nf =
        weighted_f1_condition(preds, gold, Condition::kNoFinding);
    require(nf.negative.support == 0 && nf.uncertain.support == 0,
            "No Finding has nonzero negative/uncertain support");
    if (nf.weighted_f1) {
      require(nf.positive.f1 && *nf.weighted_f1 == *nf.positive.f1,
              "No Finding weighted F1 != positive-task F1");
    }

    const auto c = static_cast<Condition>(rng.uniform_below(kNumConditions));
    const ConditionScore score = weighted_f1_condition(preds, gold, c);

    // Duplication invariance.
    std::vector<LabelVector> preds2 = preds, gold2 = gold;
    preds2.insert(preds2.end(), preds.begin(), preds.end());
    gold2.insert(gold2.end(), gold.begin(), gold.end());
    const ConditionScore doubled = weighted_f1_condition(preds2, gold2, c);
    require(doubled.weighted_f1.has_value() == score.weighted_f1.has_value(),
            "duplication changed definedness");
    if (score.weighted_f1) {
      require(std::abs(*doubled.weighted_f1 - *score.weighted_f1) < 1e-12,
              "duplication changed weighted F1");
    }

    // Range: within [min, max] of the contributing task F1s.
    if (score.weighted_f1) {
      double lo = 1.0, hi = 0.0;
      for (const LabelClass task :
           {LabelClass::kPositive, LabelClass::kNegative,
            LabelClass::kUncertain}) {
        const TaskScore& t = score.task(task);
        if (t.f1 && t.support > 0) {
          lo = std::min(lo, *t.f1);
          hi = std::max(hi, *t.f1);
        }
      }
      require(*score.weighted_f1 >= lo - 1e-12 &&
                  *score.weighted_f1 <= hi + 1e-12,
              "weighted F1 outside [min, max] of task F1s");
    }
  }
}

void bootstrap_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  EvalConfig cfg;
  cfg.n_bootstrap = 1000;
  cfg.seed = 31337;

  Rng rng(1000003);
  const auto gold = random_label_vectors(rng, 50);

  // Zero variance: preds == gold on every report.
  const auto perfect_stat = [&](std::span<const std::size_t> idx) {
    std::array<ConditionScore, kNumConditions> scores;
    for (const Condition c : all_conditions()) {
      scores[condition_index(c)] =
          detail::score_condition(gold, gold, c, idx);
    }
    return macro_f1(scores);
  };
  const BootstrapCi perfect = bootstrap_ci(perfect_stat, gold.size(), cfg);
  require(perfect.point == 1.0, "perfect sample point estimate != 1.0");
  require(perfect.lo == perfect.point && perfect.hi == perfect.point,
          "zero-variance CI is not (point, point)");

  // Noisy predictions: determinism, parallel/serial equality, order stats.
  auto preds = gold;
  for (std::size_t i = 0; i < preds.size(); i += 3) {
    preds[i] = random_label_vector(rng);
  }
  const auto stat = [&](std::span<const std::size_t> idx) {
    std::array<ConditionScore, kNumConditions> scores;
    for (const Condition c : all_conditions()) {
      scores[condition_index(c)] =
          detail::score_condition(preds, gold, c, idx);
    }
    return macro_f1(scores);
  };
  const BootstrapCi a = bootstrap_ci(stat, gold.size(), cfg, /*threads=*/1);
  const BootstrapCi b = bootstrap_ci(stat, gold.size(), cfg, /*threads=*/1);
  require(a.replicates == b.replicates && a.lo == b.lo && a.hi == b.hi,
          "same seed gave different replicates");
  const BootstrapCi par = bootstrap_ci(stat, gold.size(), cfg, /*threads=*/4);
  require(a.replicates == par.replicates && a.lo == par.lo && a.hi == par.hi,
          "parallel replicates differ from serial");

  require(static_cast<int>(a.replicates.size()) == cfg.n_bootstrap,
          "replicate count != n_bootstrap");
  for (const double r : a.replicates) {
    require(r >= 0.0 && r <= 1.0, "replicate statistic outside [0, 1]");
  }
  require(a.lo <= a.hi, "lo > hi");
  require(std::count(a.replicates.begin(), a.replicates.end(), a.lo) > 0 &&
              std::count(a.replicates.begin(), a.replicates.end(), a.hi) > 0,
          "CI endpoints are not order statistics of the replicates");

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  require(secs < 30.0, "runtime " + fmt(secs) + "s exceeds 30s");
}

void paired_comparison_sanity() {
  Rng rng(5150);
  const auto gold = random_label_vectors(rng, 60);
  auto preds = gold;
  for (std::size_t i = 0; i < preds.size(); i += 4) {
    preds[i] = random_label_vector(rng);
  }
  EvalConfig cfg;
  cfg.n_bootstrap = 1000;
  cfg.seed = 11;
  const Comparison cmp = compare_models(preds, preds, gold, cfg);
  require(cmp.mean_diff == 0.0, "self-comparison mean diff != 0");
  require(cmp.ci.first == 0.0 && cmp.ci.second == 0.0,
          "self-comparison CI != (0, 0)");
  require(cmp.p_value_two_sided == 1.0 / 1000.0,
          "p-value not clipped at 1/1000, got " + fmt(cmp.p_value_two_sided));
  for (std::size_t k = 0; k < kNumLabelClasses; ++k) {
    require(cmp.correct_count_diffs[k] == 0,
            "self-comparison correct-count row nonzero");
  }
  require(cmp.correct_count_total == 0, "self-comparison total nonzero");
}

void model_shape_and_gradients() {
  const Vocabulary vocab = Vocabulary::build(
      {"edema noted", "no acute disease", "effusion seen bilaterally"});
  EncoderConfig cfg;
  cfg.name = "tiny";
  cfg.hidden_size = 16;
  cfg.num_layers = 1;
  cfg.num_heads = 2;
  cfg.ff_size = 32;
  cfg.max_tokens = 32;
  MultiHeadClassifier model(cfg, vocab, 77);

  const std::vector<TokenSequence> batch = {
      model.encoder().tokenize("edema noted"),
      model.encoder().tokenize("no acute disease")};

  // 14 logit blocks: 13 of width 4, No Finding of width 2.
  const LogitBlocks logits = model.forward(batch);
  int four = 0, two = 0;
  for (const Condition c : all_conditions()) {
    const auto& block = logits.blocks[condition_index(c)];
    require(block.rows() == 2, "logit block row count != batch size");
    if (block.cols() == 4) ++four;
    if (block.cols() == 2) {
      ++two;
      require(c == Condition::kNoFinding, "2-logit head is not No Finding");
    }
  }
  require(four == 13 && two == 1, "head widths are not 13x4 + 1x2");

  // Head parameter count at hidden 768: exact formula, ~40K.
  const std::int64_t count = MultiHeadClassifier::head_parameter_count(768);
  require(count == 13 * (4 * 768 + 4) + (2 * 768 + 2),
          "parameter formula mismatch");
  require(std::abs(count - 40000) < 2000,
          "head parameter count not ~40K: " + std::to_string(count));

  // Finite-difference agreement of head gradients, encoder frozen.
  model.set_freeze_mode(FreezeMode::kEncoderFrozen);
  Rng wrng(123);
  for (Tensor* t : model.head_parameters()) {
    for (Eigen::Index r = 0; r < t->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < t->value.cols(); ++c) {
        t->value(r, c) = 0.25 * wrng.normal();
      }
    }
  }
  Rng grng(321);
  const auto gold = random_label_vectors(grng, 2);
  model.zero_grads();
  model.loss_and_gradients(batch, gold);
  Rng pick(55);
  for (Tensor* t : model.head_parameters()) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto r = static_cast<Eigen::Index>(
          pick.uniform_below(static_cast<std::uint64_t>(t->value.rows())));
      const auto c = static_cast<Eigen::Index>(
          pick.uniform_below(static_cast<std::uint64_t>(t->value.cols())));
      const double h = 1e-6;
      const double saved = t->value(r, c);
      t->value(r, c) = saved + h;
      const double up = model.loss(batch, gold);
      t->value(r, c) = saved - h;
      const double down = model.loss(batch, gold);
      t->value(r, c) = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = t->grad(r, c);
      const double rel = std::abs(numeric - analytic) /
                         std::max({std::abs(numeric), std::abs(analytic),
                                   1e-8});
      require(rel < 1e-4, "head gradient FD mismatch: rel err " + fmt(rel));
    }
  }

  // Argmax shift invariance.
  const auto before = model.predict(batch);
  model.head_bias(Condition::kPneumonia).value.array() += 7.5;
  model.head_bias(Condition::kNoFinding).value.array() -= 2.25;
  const auto after = model.predict(batch);
  require(before == after, "predictions changed under uniform logit shift");
}

struct SmokeData {
  Dataset rad;
  Dataset autods;
};

SmokeData smoke_corpora() {
  SyntheticSpec rad_spec;
  rad_spec.n_reports = 1600;
  rad_spec.seed = 7;
  rad_spec.id_prefix = "rad";
  SmokeData data;
  data.rad = split_random(make_synthetic_corpus(rad_spec), 0.75, 5);

  SyntheticSpec auto_spec;
  auto_spec.n_reports = 800;
  auto_spec.seed = 11;
  auto_spec.id_prefix = "auto";
  auto_spec.provenance = Provenance::kAutomatic;
  data.autods = split_random(make_synthetic_corpus(auto_spec), 0.85, 6);
  return data;
}

EncoderConfig smoke_encoder() {
  EncoderConfig cfg;
  cfg.name = "tiny";
  cfg.hidden_size = 64;
  cfg.num_layers = 2;
  cfg.num_heads = 4;
  cfg.ff_size = 256;
  cfg.max_tokens = 32;
  return cfg;
}

Vocabulary vocab_from(const Dataset& ds) {
  std::vector<std::string> texts;
  for (const auto& item : ds.items) texts.push_back(item.report.text);
  return Vocabulary::build(texts);
}

double split_macro_f1(MultiHeadClassifier& model, const Dataset& ds,
                      Split split) {
  std::vector<TokenSequence> tokens;
  std::vector<LabelVector> gold;
  for (const std::size_t i : ds.split_indices(split)) {
    tokens.push_back(model.encoder().tokenize(ds.items[i].report.text));
    gold.push_back(ds.items[i].labels);
  }
  std::vector<LabelVector> preds;
  for (std::size_t i = 0; i < tokens.size(); i += 64) {
    const auto end = std::min(i + 64, tokens.size());
    std::vector<TokenSequence> batch(tokens.begin() + i, tokens.begin() + end);
    const auto bp = model.predict(batch);
    preds.insert(preds.end(), bp.begin(), bp.end());
  }
  std::array<ConditionScore, kNumConditions> scores;
  for (const Condition c : all_conditions()) {
    scores[condition_index(c)] = weighted_f1_condition(preds, gold, c);
  }
  return macro_f1(scores);
}

void training_smoke() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path tmp =
      fs::temp_directory_path() / ("radlabel-acceptance-" +
                                   std::to_string(::getpid()));
  fs::create_directories(tmp);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{tmp};

  const SmokeData data = smoke_corpora();
  require(data.rad.items.size() >= 32, "corpus smaller than 32 items");

  // The paper-style recipe at desk scale: lr 2e-5, batch 18, <= 20 epochs.
  HyperParams hp;
  hp.learning_rate = 2e-5;
  hp.batch_size = 18;
  hp.max_epochs = 20;
  hp.eval_every = 0;  // epoch-end evals
  hp.patience = 20;
  hp.seed = 42;

  MultiHeadClassifier model(smoke_encoder(), vocab_from(data.rad), 42);
  TrainStrategy strategy;
  strategy.kind = StrategyKind::kRad;
  strategy.rad_data = data.rad;
  const TrainRun run =
      train(model, strategy, hp, (tmp / "rad-run").string());

  MultiHeadClassifier best = load_checkpoint(run.best_checkpoint);
  const double train_f1 = split_macro_f1(best, data.rad, Split::kTrain);
  const double dev_f1 = split_macro_f1(best, data.rad, Split::kDev);
  require(train_f1 >= 0.95,
          "train macro F1 " + fmt(train_f1) + " below 0.95");
  require(dev_f1 >= 0.90, "dev macro F1 " + fmt(dev_f1) + " below 0.90");
  require(run.best_dev_f1 == dev_f1,
          "selected checkpoint does not reproduce its dev F1");

  // Hybrid hand-off: rad-phase step-0 weights equal the auto-phase best
  // checkpoint exactly (probed with a zero-epoch rad phase).
  {
    MultiHeadClassifier hybrid(smoke_encoder(), vocab_from(data.autods), 43);
    TrainStrategy hs;
    hs.kind = StrategyKind::kHybrid;
    hs.rad_data = data.rad;
    hs.auto_data = data.autods;
    HyperParams hhp = hp;
    hhp.auto_max_epochs = 1;
    hhp.max_epochs = 0;
    bool threw = false;
    try {
      train(hybrid, hs, hhp, (tmp / "hybrid-run").string());
    } catch (const DataError&) {
      threw = true;  // zero-epoch rad phase selects nothing, by design
    }
    require(threw, "zero-epoch probe unexpectedly selected a checkpoint");
    const MultiHeadClassifier auto_best =
        load_checkpoint((tmp / "hybrid-run" / "checkpoint-auto-best")
                            .string());
    require(same_weights(hybrid, auto_best),
            "hybrid rad-phase step-0 weights differ from auto best");
  }

  // Frozen baselines leave the encoder bit-identical.
  for (const FreezeBaseline baseline :
       {FreezeBaseline::kTCls, FreezeBaseline::kTToken}) {
    MultiHeadClassifier frozen(smoke_encoder(), vocab_from(data.rad), 44);
    apply_freeze(frozen, baseline);
    std::vector<Eigen::MatrixXd> before;
    for (const Tensor* t : frozen.encoder().parameters()) {
      before.push_back(t->value);
    }
    TrainStrategy fs_strategy;
    fs_strategy.kind = StrategyKind::kRad;
    fs_strategy.rad_data = data.rad;
    HyperParams fhp = hp;
    fhp.max_epochs = 1;
    train(frozen, fs_strategy, fhp,
          (tmp / (baseline == FreezeBaseline::kTCls ? "tcls" : "ttoken"))
              .string());
    std::size_t i = 0;
    bool heads_changed = false;
    for (const Tensor* t : frozen.encoder().parameters()) {
      require(t->value == before[i++],
              "frozen encoder weights changed during training");
    }
    for (Tensor* t : frozen.head_parameters()) {
      if ((t->value.array() != 0.0).any()) heads_changed = true;
    }
    require(heads_changed, "head weights did not change");
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  require(secs < 120.0, "runtime " + fmt(secs) + "s exceeds 2 minutes");
}

// Fails on every third call.
class FlakyClient : public TranslationClient {
 public:
  FlakyClient() : TranslationClient({}) {}
  std::string backtranslate_one(const std::string& text) override {
    if (++calls_ % 3 == 0) throw TranslationError("synthetic failure");
    return text;
  }

 private:
  int calls_ = 0;
};

void augmentation_arithmetic() {
  SyntheticSpec spec;
  spec.n_reports = 120;
  spec.seed = 3;
  const Dataset base = split_random(make_synthetic_corpus(spec), 0.75, 9);
  const std::size_t n_train = base.split_indices(Split::kTrain).size();

  IdentityStubClient identity;
  const AugmentedDataset aug = augment_dataset(base, identity);
  require(aug.augmented.items.size() == n_train,
          "augmented count != train-split size");
  const Dataset combined = aug.combined();
  require(combined.split_indices(Split::kTrain).size() == 2 * n_train,
          "combined train pool is not exactly doubled");
  for (const auto& copy : aug.augmented.items) {
    const auto& base_id = aug.pairing.at(copy.report.report_id);
    for (const auto& item : base.items) {
      if (item.report.report_id == base_id) {
        require(copy.report.text == item.report.text,
                "identity copy not byte-equal");
        require(copy.labels == item.labels, "labels not preserved");
      }
    }
  }

  // Training equivalence with explicit duplication at the same seed.
  Dataset duplicated = base;
  for (const std::size_t i : augmentation_targets(base, false)) {
    LabeledReport copy = base.items[i];
    copy.report.report_id += "-bt";
    duplicated.split.emplace(copy.report.report_id, Split::kTrain);
    duplicated.items.push_back(std::move(copy));
  }
  const fs::path tmp =
      fs::temp_directory_path() /
      ("radlabel-acceptance-aug-" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{tmp};

  auto run_once = [&](const Dataset& ds, const std::string& dir) {
    EncoderConfig cfg;
    cfg.hidden_size = 32;
    cfg.num_layers = 1;
    cfg.num_heads = 2;
    cfg.ff_size = 64;
    cfg.max_tokens = 32;
    MultiHeadClassifier model(cfg, vocab_from(ds), 21);
    TrainStrategy strategy;
    strategy.kind = StrategyKind::kRad;
    strategy.rad_data = ds;
    HyperParams hp;
    hp.learning_rate = 2e-5;
    hp.batch_size = 18;
    hp.max_epochs = 2;
    hp.eval_every = 0;
    hp.seed = 42;
    return train(model, strategy, hp, (tmp / dir).string());
  };
  const TrainRun a = run_once(combined, "combined");
  const TrainRun b = run_once(duplicated, "duplicated");
  require(a.history.size() == b.history.size(),
          "augmented vs duplicated: eval counts differ");
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    require(a.history[i].train_loss == b.history[i].train_loss,
            "augmented vs duplicated: loss trajectories diverge");
    require(a.history[i].dev_macro_f1 == b.history[i].dev_macro_f1,
            "augmented vs duplicated: dev F1 trajectories diverge");
  }

  // Per-item failures still yield exactly 2N items.
  FlakyClient flaky;
  const AugmentedDataset with_failures =
      augment_dataset(base, flaky, false, /*parallelism=*/1);
  require(with_failures.augmented.items.size() == n_train,
          "failures broke the doubling arithmetic");
  require(!with_failures.fallback_ids.empty(), "expected fallbacks");
  require(with_failures.combined().split_indices(Split::kTrain).size() ==
              2 * n_train,
          "failure fallbacks broke the combined pool size");
}

void preprocessing_checks() {
  // normalize_text idempotence on fuzzed strings.
  Rng rng(616);
  static const char* pieces[] = {"word", "x",  " ",  "  ", "\t",
                                 "\n",   "\r\n", "\v", "\f", "yz9"};
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    const auto n = rng.uniform_below(24);
    for (std::uint64_t k = 0; k < n; ++k) {
      s += pieces[rng.uniform_below(std::size(pieces))];
    }
    const std::string once = normalize_text(s);
    require(normalize_text(once) == once, "normalize_text not idempotent");
  }

  // Dedup idempotence and monotone non-increase.
  SyntheticSpec spec;
  spec.n_reports = 90;
  Dataset ds = make_synthetic_corpus(spec);
  for (int i = 0; i < 30; ++i) {  // inject duplicates
    LabeledReport copy = ds.items[i];
    copy.report.report_id += "-dup";
    ds.items.push_back(copy);
  }
  const Dataset once = dedup_reports(ds);
  require(once.items.size() <= ds.items.size(), "dedup increased size");
  require(once.items.size() == 90, "dedup missed duplicates");
  const Dataset twice = dedup_reports(once);
  require(twice.items.size() == once.items.size(), "dedup not idempotent");

  // Split sizes: 75/25 and 85/15 under round-half-up.
  SyntheticSpec s100;
  s100.n_reports = 100;
  const Dataset d100 = make_synthetic_corpus(s100);
  const Dataset split75 = split_random(d100, 0.75, 3);
  require(split75.split_indices(Split::kTrain).size() == 75 &&
              split75.split_indices(Split::kDev).size() == 25,
          "75/25 split sizes wrong");
  SyntheticSpec s140;
  s140.n_reports = 140;
  const Dataset d140 = make_synthetic_corpus(s140);
  const Dataset split85 = split_random(d140, 0.85, 3);
  require(split85.split_indices(Split::kTrain).size() == 119 &&
              split85.split_indices(Split::kDev).size() == 21,
          "85/15 split sizes wrong");

  // Order independence.
  Dataset reversed = d100;
  std::reverse(reversed.items.begin(), reversed.items.end());
  const Dataset split_rev = split_random(reversed, 0.75, 3);
  require(split75.split == split_rev.split,
          "split depends on item order");
}

void reproduction_path() {
  // Full-scale retraining needs credentialed report datasets and days of
  // compute; desk-side we validate that the shipped configs resolve
  // against the CLI's schema and name the documented recipe.
  const std::vector<std::string> configs = {
      "configs/t_auto.json", "configs/hybrid_bt.json",
      "configs/evaluate_test_set.json", "configs/synthetic_demo.json"};
  for (const auto& rel : configs) {
    require(fs::exists(rel), "missing config " + rel);
  }
  std::ostringstream out, err;
  // Resolving the training configs through the CLI exercises schema
  // validation; the datasets are absent, so data loading is the expected
  // failure point, not config parsing.
  for (const auto& rel :
       {std::string("configs/t_auto.json"), std::string("configs/hybrid_bt.json")}) {
    const int code = radlabel::cli::run({"train", "--config", rel}, out, err);
    require(code == 1, "config " + rel + " failed before data loading");
    const std::string msg = err.str();
    require(msg.find("unknown config key") == std::string::npos,
            "config " + rel + " has unknown keys: " + msg);
  }
  require(fs::exists("README.md"), "README.md missing");
  std::ifstream readme("README.md");
  std::stringstream buf;
  buf << readme.rdbuf();
  require(buf.str().find("0.798") != std::string::npos,
          "README does not document the full-scale target");
}

struct Criterion {
  const char* name;
  std::function<void()> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"metric-oracle-equivalence", metric_oracle_equivalence},
      {"weighted-f1-structural", weighted_f1_structural},
      {"bootstrap-correctness", bootstrap_correctness},
      {"paired-comparison-sanity", paired_comparison_sanity},
      {"model-shape-and-gradients", model_shape_and_gradients},
      {"training-smoke", training_smoke},
      {"augmentation-arithmetic", augmentation_arithmetic},
      {"preprocessing", preprocessing_checks},
      {"reproduction-path", reproduction_path},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      criterion.fn();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (ok) {
      std::printf("[PASS] %-28s (%.1fs)\n", criterion.name, secs);
    } else {
      ++failures;
      std::printf("[FAIL] %-28s (%.1fs): %s\n", criterion.name, secs,
                  detail.c_str());
    }
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
