#include "radlabel/cli.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "radlabel/augmentation.hpp"
#include "radlabel/checkpoint.hpp"
#include "radlabel/corpus.hpp"
#include "radlabel/csv.hpp"
#include "radlabel/errors.hpp"
#include "radlabel/evaluation.hpp"
#include "radlabel/synthetic.hpp"
#include "radlabel/training.hpp"

namespace radlabel::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// --- config resolution ----------------------------------------------------

void merge_config(json& base, const json& overlay, const std::string& prefix) {
  for (const auto& [key, value] : overlay.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) {
      throw ConfigError("unknown config key '" + path + "'");
    }
    if (base[key].is_object()) {
      if (!value.is_object()) {
        throw ConfigError("config key '" + path + "' must be an object");
      }
      merge_config(base[key], value, path);
    } else {
      base[key] = value;
    }
  }
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json* node = &config;
  std::size_t start = 0;
  std::string walked;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    walked = walked.empty() ? key : walked + "." + key;
    if (!node->contains(key)) {
      throw ConfigError("unknown config key '" + walked + "'");
    }
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) {
    throw ConfigError("config key '" + path + "' is an object");
  }
  if (node->is_string()) {
    *node = raw;
    return;
  }
  try {
    *node = json::parse(raw);
  } catch (const json::exception&) {
    throw ConfigError("cannot parse value '" + raw + "' for key '" + path +
                      "'");
  }
}

json resolve_config(json defaults, const std::string& config_path,
                    const std::vector<std::string>& overrides) {
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw IOError("cannot open config '" + config_path + "'");
    json file_config;
    try {
      in >> file_config;
    } catch (const json::exception& e) {
      throw ConfigError("invalid JSON in '" + config_path + "': " + e.what());
    }
    merge_config(defaults, file_config, "");
  }
  for (const auto& assignment : overrides) {
    apply_override(defaults, assignment);
  }
  return defaults;
}

// --- shared helpers -------------------------------------------------------

Dataset load_labeled(const std::string& path, Provenance provenance,
                     std::ostream& err) {
  LoadResult res = load_reports_csv(path, provenance);
  if (!res.labeled) {
    throw FormatError("'" + path + "' has no label columns");
  }
  if (!res.empty_text_rows.empty()) {
    err << "warning: " << res.empty_text_rows.size()
        << " report(s) with empty text in " << path << " (first at row "
        << res.empty_text_rows.front() << ")\n";
  }
  return std::move(res.dataset);
}

std::vector<LabelVector> align_predictions(const Dataset& gold,
                                           const Dataset& preds,
                                           const std::string& preds_path) {
  std::unordered_map<std::string, const LabelVector*> by_id;
  for (const auto& item : preds.items) {
    by_id.emplace(item.report.report_id, &item.labels);
  }
  std::vector<LabelVector> out;
  out.reserve(gold.items.size());
  for (const auto& item : gold.items) {
    const auto it = by_id.find(item.report.report_id);
    if (it == by_id.end()) {
      throw AlignmentError("report '" + item.report.report_id +
                           "' missing from " + preds_path);
    }
    out.push_back(*it->second);
  }
  return out;
}

std::vector<LabelVector> gold_labels(const Dataset& ds) {
  std::vector<LabelVector> out;
  out.reserve(ds.items.size());
  for (const auto& item : ds.items) out.push_back(item.labels);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IOError("failed writing '" + path + "'");
}

EvalConfig eval_config_from(const json& cfg) {
  EvalConfig out;
  out.n_bootstrap = cfg.at("n_bootstrap").get<int>();
  out.alpha = cfg.at("alpha").get<double>();
  out.seed = cfg.at("seed").get<std::int64_t>();
  return out;
}

// --- train ----------------------------------------------------------------

json train_defaults() {
  return json{
      {"strategy", "rad"},
      {"rad_data", ""},
      {"auto_data", ""},
      {"init_checkpoint", ""},
      {"encoder",
       {{"name", "tiny"},
        {"hidden_size", 64},
        {"num_layers", 2},
        {"num_heads", 4},
        {"ff_size", 256},
        {"max_tokens", 128},
        {"init_std", 0.02},
        {"vocab_min_count", 1},
        {"vocab_max_size", 60000},
        {"weights", ""}}},
      {"head_input_mode", "cls"},
      {"freeze", "full"},
      {"hyperparams",
       {{"learning_rate", 2e-5},
        {"batch_size", 18},
        {"max_epochs", 20},
        {"auto_max_epochs", 8},
        {"eval_every", 500},
        {"patience", 5},
        {"seed", 42},
        {"threads", 0}}},
      {"split",
       {{"rad_train_fraction", 0.75},
        {"auto_train_fraction", 0.85},
        {"seed", 17}}},
      {"out_dir", "run"},
  };
}

HyperParams hyperparams_from(const json& cfg) {
  HyperParams hp;
  hp.learning_rate = cfg.at("learning_rate").get<double>();
  hp.batch_size = cfg.at("batch_size").get<int>();
  hp.max_epochs = cfg.at("max_epochs").get<int>();
  hp.auto_max_epochs = cfg.at("auto_max_epochs").get<int>();
  hp.eval_every = cfg.at("eval_every").get<int>();
  hp.patience = cfg.at("patience").get<int>();
  hp.seed = cfg.at("seed").get<std::int64_t>();
  hp.threads = cfg.at("threads").get<int>();
  return hp;
}

int cmd_train(const json& config, std::ostream& out, std::ostream& err) {
  const auto kind = strategy_from_name(config.at("strategy").get<std::string>());
  if (!kind) {
    throw ConfigError("strategy must be rad, auto or hybrid, got '" +
                      config.at("strategy").get<std::string>() + "'");
  }
  TrainStrategy strategy;
  strategy.kind = *kind;
  const std::string init_ckpt = config.at("init_checkpoint").get<std::string>();
  if (!init_ckpt.empty()) strategy.init_checkpoint = init_ckpt;

  const json& split_cfg = config.at("split");
  const auto need_rad = strategy.kind != StrategyKind::kAuto;
  const auto need_auto = strategy.kind == StrategyKind::kAuto ||
                         (strategy.kind == StrategyKind::kHybrid &&
                          !strategy.init_checkpoint);
  if (need_rad) {
    const std::string path = config.at("rad_data").get<std::string>();
    if (path.empty()) throw ConfigError("strategy requires rad_data");
    Dataset ds = load_labeled(path, Provenance::kExpert, err);
    if (!ds.has_split()) {
      ds = split_random(ds, split_cfg.at("rad_train_fraction").get<double>(),
                        split_cfg.at("seed").get<std::int64_t>());
    }
    strategy.rad_data = std::move(ds);
  }
  if (need_auto) {
    const std::string path = config.at("auto_data").get<std::string>();
    if (path.empty()) throw ConfigError("strategy requires auto_data");
    Dataset ds = load_labeled(path, Provenance::kAutomatic, err);
    if (!ds.has_split()) {
      ds = split_random(ds, split_cfg.at("auto_train_fraction").get<double>(),
                        split_cfg.at("seed").get<std::int64_t>());
    }
    strategy.auto_data = std::move(ds);
  }

  const HyperParams hp = hyperparams_from(config.at("hyperparams"));
  const std::string out_dir = config.at("out_dir").get<std::string>();
  if (out_dir.empty()) throw ConfigError("out_dir must be set");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IOError("cannot create run directory '" + out_dir + "'");
  write_text_file((fs::path(out_dir) / "config.json").string(),
                  config.dump(2) + "\n");

  // Model construction: a checkpoint wins (self-describing); otherwise
  // pretrained encoder weights; otherwise fresh weights with a vocabulary
  // built from the first-trained split.
  std::optional<MultiHeadClassifier> model;
  const json& enc_cfg = config.at("encoder");
  const std::string pretrained = enc_cfg.at("weights").get<std::string>();
  if (strategy.init_checkpoint) {
    model.emplace(load_checkpoint(*strategy.init_checkpoint));
  } else if (!pretrained.empty()) {
    model.emplace(model_with_pretrained_encoder(pretrained));
  } else {
    const Dataset& vocab_source = need_auto ? *strategy.auto_data
                                            : *strategy.rad_data;
    std::vector<std::string> texts;
    for (const auto& item : vocab_source.items) {
      const auto it = vocab_source.split.find(item.report.report_id);
      if (it != vocab_source.split.end() && it->second == Split::kTrain) {
        texts.push_back(item.report.text);
      }
    }
    Vocabulary vocab = Vocabulary::build(
        texts, enc_cfg.at("vocab_min_count").get<std::size_t>(),
        enc_cfg.at("vocab_max_size").get<std::size_t>());
    EncoderConfig cfg;
    cfg.name = enc_cfg.at("name").get<std::string>();
    cfg.hidden_size = enc_cfg.at("hidden_size").get<int>();
    cfg.num_layers = enc_cfg.at("num_layers").get<int>();
    cfg.num_heads = enc_cfg.at("num_heads").get<int>();
    cfg.ff_size = enc_cfg.at("ff_size").get<int>();
    cfg.max_tokens = enc_cfg.at("max_tokens").get<int>();
    cfg.init_std = enc_cfg.at("init_std").get<double>();
    model.emplace(cfg, std::move(vocab),
                  static_cast<std::uint64_t>(hp.seed));
  }

  const auto mode =
      head_input_mode_from_name(config.at("head_input_mode").get<std::string>());
  if (!mode) throw ConfigError("head_input_mode must be cls or token_average");
  model->set_head_input_mode(*mode);
  const auto baseline =
      freeze_baseline_from_name(config.at("freeze").get<std::string>());
  if (!baseline) throw ConfigError("freeze must be full, t_cls or t_token");
  apply_freeze(*model, *baseline);

  const TrainRun run = train(*model, strategy, hp, out_dir);

  const json summary{
      {"best_checkpoint", run.best_checkpoint},
      {"best_dev_f1", run.best_dev_f1},
      {"evals", run.history.size()},
      {"auto_best_checkpoint",
       run.auto_best_checkpoint ? json(*run.auto_best_checkpoint)
                                : json(nullptr)}};
  write_text_file((fs::path(out_dir) / "summary.json").string(),
                  summary.dump(2) + "\n");
  out << "best dev macro F1 " << run.best_dev_f1 << "\n"
      << "best checkpoint  " << run.best_checkpoint << "\n";
  return 0;
}

// --- label ----------------------------------------------------------------

int cmd_label(const std::string& checkpoint, const std::string& reports_path,
              const std::string& out_path, int batch_size, std::ostream& out,
              std::ostream& err) {
  MultiHeadClassifier model = load_checkpoint(checkpoint);
  LoadResult loaded = load_reports_csv(reports_path);
  if (!loaded.empty_text_rows.empty()) {
    err << "warning: " << loaded.empty_text_rows.size()
        << " report(s) with empty text in " << reports_path << "\n";
  }
  Dataset& ds = loaded.dataset;

  std::vector<TokenSequence> tokens;
  tokens.reserve(ds.items.size());
  for (const auto& item : ds.items) {
    // Degenerate empty reports still get a prediction (CLS only).
    tokens.push_back(model.encoder().tokenize(item.report.text));
  }
  for (std::size_t i = 0; i < tokens.size();
       i += static_cast<std::size_t>(batch_size)) {
    const auto end =
        std::min(i + static_cast<std::size_t>(batch_size), tokens.size());
    std::vector<TokenSequence> batch(tokens.begin() + i, tokens.begin() + end);
    const auto preds = model.predict(batch);
    for (std::size_t j = 0; j < preds.size(); ++j) {
      ds.items[i + j].labels = preds[j];
    }
  }
  ds.split.clear();
  write_reports_csv(ds, out_path, {.labels = true});
  out << "labeled " << ds.items.size() << " report(s) -> " << out_path << "\n";
  return 0;
}

// --- evaluate / compare ---------------------------------------------------

json eval_defaults() {
  return json{{"n_bootstrap", 1000},
              {"alpha", 0.05},
              {"seed", 0},
              {"threads", 1}};
}

int cmd_evaluate(const json& config, const std::string& gold_path,
                 const std::string& preds_path, const std::string& out_dir,
                 std::ostream& out, std::ostream& err) {
  const Dataset gold = load_labeled(gold_path, Provenance::kExpert, err);
  const Dataset preds = load_labeled(preds_path, Provenance::kAutomatic, err);
  const auto aligned = align_predictions(gold, preds, preds_path);

  const EvalConfig cfg = eval_config_from(config);
  const EvalReport report = evaluate_predictions(
      aligned, gold_labels(gold), cfg, /*with_ci=*/true,
      config.at("threads").get<int>());

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IOError("cannot create output directory '" + out_dir + "'");
  const ReportTable table = per_condition_report(report);
  write_text_file((fs::path(out_dir) / "evaluation.json").string(),
                  to_json_string(report) + "\n");
  write_text_file((fs::path(out_dir) / "per_condition.csv").string(),
                  render_table_csv(table));
  out << render_table_text(table);
  if (report.undefined_conditions > 0) {
    out << report.undefined_conditions
        << " condition(s) undefined and excluded from the average\n";
  }
  return 0;
}

int cmd_compare(const json& config, const std::string& gold_path,
                const std::string& preds_a_path,
                const std::string& preds_b_path, const std::string& out_dir,
                std::ostream& out, std::ostream& err) {
  const Dataset gold = load_labeled(gold_path, Provenance::kExpert, err);
  const auto a = align_predictions(
      gold, load_labeled(preds_a_path, Provenance::kAutomatic, err),
      preds_a_path);
  const auto b = align_predictions(
      gold, load_labeled(preds_b_path, Provenance::kAutomatic, err),
      preds_b_path);
  const auto gold_vecs = gold_labels(gold);

  const EvalConfig cfg = eval_config_from(config);
  const int threads = config.at("threads").get<int>();
  const Comparison cmp = compare_models(a, b, gold_vecs, cfg, threads);
  const EvalReport report_a =
      evaluate_predictions(a, gold_vecs, cfg, /*with_ci=*/true, threads);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IOError("cannot create output directory '" + out_dir + "'");
  const ReportTable table = per_condition_report(report_a, &cmp);
  write_text_file((fs::path(out_dir) / "comparison.json").string(),
                  to_json_string(cmp) + "\n");
  write_text_file((fs::path(out_dir) / "per_condition.csv").string(),
                  render_table_csv(table));
  out << render_table_text(table);
  out << "mean diff " << cmp.mean_diff << "  CI (" << cmp.ci.first << ", "
      << cmp.ci.second << ")  p " << cmp.p_value_two_sided << "\n";
  return 0;
}

// --- augment ----------------------------------------------------------------

json augment_defaults() {
  return json{
      {"client", "identity_stub"},  // identity_stub | dictionary_stub |
                                    // external_model
      {"pivot", "de"},
      {"beam", 1},
      {"endpoint_host", "localhost"},
      {"endpoint_port", 8090},
      {"augment_dev", false},
      {"parallelism", 4},
      {"split", {{"enabled", true}, {"fraction", 0.75}, {"seed", 17}}},
  };
}

int cmd_augment(const json& config, const std::string& in_path,
                const std::string& out_path,
                const std::string& write_sources,
                const std::string& read_translations, std::ostream& out,
                std::ostream& err) {
  Dataset ds = load_labeled(in_path, Provenance::kExpert, err);
  const json& split_cfg = config.at("split");
  if (!ds.has_split() && split_cfg.at("enabled").get<bool>()) {
    ds = split_random(ds, split_cfg.at("fraction").get<double>(),
                      split_cfg.at("seed").get<std::int64_t>());
  }
  const bool augment_dev = config.at("augment_dev").get<bool>();
  const auto targets = augmentation_targets(ds, augment_dev);

  if (!write_sources.empty()) {
    std::string content;
    for (const std::size_t i : targets) {
      content += ds.items[i].report.text;
      content += '\n';
    }
    write_text_file(write_sources, content);
    out << "wrote " << targets.size() << " source line(s) to "
        << write_sources << "\n";
    return 0;
  }

  TranslationConfig tc;
  tc.pivot_language = config.at("pivot").get<std::string>();
  tc.beam_size = config.at("beam").get<int>();

  std::unique_ptr<TranslationClient> client;
  if (!read_translations.empty()) {
    std::vector<std::string> sources;
    for (const std::size_t i : targets) {
      sources.push_back(ds.items[i].report.text);
    }
    client = std::make_unique<FileBatchClient>(sources, read_translations, tc);
  } else {
    const std::string kind = config.at("client").get<std::string>();
    if (kind == "identity_stub") {
      client = std::make_unique<IdentityStubClient>(tc);
    } else if (kind == "dictionary_stub") {
      client = std::make_unique<DictionaryStubClient>(tc);
    } else if (kind == "external_model") {
      client = std::make_unique<HttpTranslationClient>(
          config.at("endpoint_host").get<std::string>(),
          config.at("endpoint_port").get<int>(), tc);
    } else {
      throw ConfigError("unknown translation client '" + kind + "'");
    }
  }

  const AugmentedDataset augmented = augment_dataset(
      ds, *client, augment_dev, config.at("parallelism").get<int>());
  const Dataset combined = augmented.combined();
  write_reports_csv(combined, out_path,
                    {.labels = true, .provenance = true,
                     .split = combined.has_split()});
  out << "augmented " << augmented.augmented.items.size() << " of "
      << ds.items.size() << " report(s); combined file " << out_path << "\n";
  if (!augmented.fallback_ids.empty()) {
    err << "warning: " << augmented.fallback_ids.size()
        << " translation failure(s) kept the original text\n";
  }
  return 0;
}

// --- prevalence -------------------------------------------------------------

int cmd_prevalence(const std::string& in_path, const std::string& out_path,
                   std::ostream& out, std::ostream& err) {
  const Dataset ds = load_labeled(in_path, Provenance::kExpert, err);
  const PrevalenceTable table = class_prevalence(ds);

  constexpr std::array<LabelClass, 4> column_order = {
      LabelClass::kPositive, LabelClass::kNegative, LabelClass::kUncertain,
      LabelClass::kBlank};

  std::ostringstream csv_out;
  std::vector<std::string> header = {"condition"};
  for (const LabelClass k : column_order) {
    std::string n(label_class_name(k));
    for (auto& c : n) c = static_cast<char>(std::tolower(c));
    header.push_back(n + "_count");
    header.push_back(n + "_fraction");
  }
  csv::write_row(csv_out, header);
  for (const Condition c : all_conditions()) {
    std::vector<std::string> row = {std::string(condition_name(c))};
    for (const LabelClass k : column_order) {
      const auto& cell = table[condition_index(c)][static_cast<int>(k)];
      row.push_back(std::to_string(cell.count));
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", cell.fraction);
      row.emplace_back(buf);
    }
    csv::write_row(csv_out, row);
  }
  if (!out_path.empty()) write_text_file(out_path, csv_out.str());

  for (const Condition c : all_conditions()) {
    char line[160];
    std::string cells;
    for (const LabelClass k : column_order) {
      const bool na = c == Condition::kNoFinding &&
                      (k == LabelClass::kNegative ||
                       k == LabelClass::kUncertain);
      char cell[40];
      if (na) {
        std::snprintf(cell, sizeof(cell), "%20s", "NA");
      } else {
        const auto& p = table[condition_index(c)][static_cast<int>(k)];
        std::snprintf(cell, sizeof(cell), "%12lld (%5.2f%%)",
                      static_cast<long long>(p.count), 100.0 * p.fraction);
      }
      cells += cell;
    }
    std::snprintf(line, sizeof(line), "%-28s%s\n",
                  std::string(condition_name(c)).c_str(), cells.c_str());
    out << line;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"radiology report labeling pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::int64_t> seed;
  std::string out_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--set", overrides,
                    "config override key=value (repeatable)");
    cmd->add_option("--seed", seed, "seed override");
    return cmd;
  };

  auto* train_cmd = add_common(app.add_subcommand("train", "run a training strategy"));
  train_cmd->add_option("--out", out_path, "run directory");

  auto* label_cmd = app.add_subcommand("label", "label reports with a checkpoint");
  std::string checkpoint, reports_path;
  int label_batch = 18;
  label_cmd->add_option("--checkpoint", checkpoint)->required();
  label_cmd->add_option("--reports", reports_path)->required();
  label_cmd->add_option("--out", out_path)->required();
  label_cmd->add_option("--batch-size", label_batch);

  std::string gold_path, preds_path, preds_a, preds_b;
  auto* eval_cmd = add_common(app.add_subcommand("evaluate", "score predictions against gold labels"));
  eval_cmd->add_option("--gold", gold_path)->required();
  eval_cmd->add_option("--preds", preds_path)->required();
  eval_cmd->add_option("--out", out_path)->required();

  auto* compare_cmd = add_common(app.add_subcommand("compare", "paired bootstrap comparison of two models"));
  compare_cmd->add_option("--gold", gold_path)->required();
  compare_cmd->add_option("--preds-a", preds_a)->required();
  compare_cmd->add_option("--preds-b", preds_b)->required();
  compare_cmd->add_option("--out", out_path)->required();

  std::string in_path, write_sources, read_translations;
  auto* augment_cmd = add_common(app.add_subcommand("augment", "backtranslation augmentation"));
  augment_cmd->add_option("--in", in_path)->required();
  augment_cmd->add_option("--out", out_path);
  augment_cmd->add_option("--write-sources", write_sources,
                          "dump augmentable texts and exit");
  augment_cmd->add_option("--read-translations", read_translations,
                          "offline translations aligned with --write-sources");
  bool augment_dev_flag = false;
  augment_cmd->add_flag("--augment-dev", augment_dev_flag,
                        "augment the dev split as well");

  auto* prev_cmd = app.add_subcommand("prevalence", "per-condition class prevalence table");
  prev_cmd->add_option("--in", in_path)->required();
  prev_cmd->add_option("--out", out_path, "CSV output path");

  std::vector<const char*> argv = {"radlabel"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train_cmd->parsed()) {
      if (seed) overrides.push_back("hyperparams.seed=" + std::to_string(*seed));
      json config = resolve_config(train_defaults(), config_path, overrides);
      if (!out_path.empty()) config["out_dir"] = out_path;
      return cmd_train(config, out, err);
    }
    if (label_cmd->parsed()) {
      return cmd_label(checkpoint, reports_path, out_path, label_batch, out,
                       err);
    }
    if (eval_cmd->parsed()) {
      if (seed) overrides.push_back("seed=" + std::to_string(*seed));
      const json config = resolve_config(eval_defaults(), config_path, overrides);
      return cmd_evaluate(config, gold_path, preds_path, out_path, out, err);
    }
    if (compare_cmd->parsed()) {
      if (seed) overrides.push_back("seed=" + std::to_string(*seed));
      const json config = resolve_config(eval_defaults(), config_path, overrides);
      return cmd_compare(config, gold_path, preds_a, preds_b, out_path, out,
                         err);
    }
    if (augment_cmd->parsed()) {
      if (seed) overrides.push_back("split.seed=" + std::to_string(*seed));
      if (augment_dev_flag) overrides.push_back("augment_dev=true");
      const json config =
          resolve_config(augment_defaults(), config_path, overrides);
      if (out_path.empty() && write_sources.empty()) {
        throw ConfigError("augment requires --out (or --write-sources)");
      }
      return cmd_augment(config, in_path, out_path, write_sources,
                         read_translations, out, err);
    }
    if (prev_cmd->parsed()) {
      return cmd_prevalence(in_path, out_path, out, err);
    }
    err << "error: no command\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace radlabel::cli
