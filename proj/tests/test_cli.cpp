#include "radlabel/cli.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "radlabel/corpus.hpp"
#include "radlabel/synthetic.hpp"
#include "test_util.hpp"

using namespace radlabel;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult res;
  res.code = cli::run(args, out, err);
  res.out = out.str();
  res.err = err.str();
  return res;
}

std::string write_synth(const test_util::TempDir& tmp, const std::string& name,
                        std::size_t n, std::uint64_t seed,
                        const std::string& prefix) {
  SyntheticSpec spec;
  spec.n_reports = n;
  spec.seed = seed;
  spec.id_prefix = prefix;
  const std::string path = tmp.file(name);
  write_reports_csv(make_synthetic_corpus(spec), path, {.labels = true});
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("unknown config keys are rejected") {
  test_util::TempDir tmp("cfg");
  std::ofstream(tmp.file("bad.json")) << R"({"strateggy": "rad"})";
  const auto res = run_cli({"train", "--config", tmp.file("bad.json")});
  CHECK(res.code == 1);
  CHECK(res.err.find("strateggy") != std::string::npos);

  const auto res2 = run_cli({"train", "--set", "hyperparams.bogus=3"});
  CHECK(res2.code == 1);
  CHECK(res2.err.find("bogus") != std::string::npos);
}

TEST_CASE("train requires the strategy's dataset") {
  const auto res = run_cli({"train", "--set", "strategy=rad"});
  CHECK(res.code == 1);
  CHECK(res.err.find("rad_data") != std::string::npos);
}

TEST_CASE("end-to-end train, label, evaluate, compare on synthetic data") {
  test_util::TempDir tmp("e2e");
  const std::string rad_csv = write_synth(tmp, "rad.csv", 80, 7, "rad");
  const std::string test_csv = write_synth(tmp, "test.csv", 40, 23, "test");
  const std::string run_dir = tmp.file("run");

  // Train: fast unit-test configuration (the acceptance suite runs the
  // default 2e-5 recipe).
  const auto train_res = run_cli(
      {"train", "--set", "strategy=rad", "--set", "rad_data=" + rad_csv,
       "--set", "hyperparams.learning_rate=0.001", "--set",
       "hyperparams.max_epochs=6", "--set", "hyperparams.eval_every=0",
       "--set", "encoder.hidden_size=32", "--set", "encoder.num_layers=1",
       "--set", "encoder.num_heads=2", "--set", "encoder.ff_size=64",
       "--set", "encoder.max_tokens=32", "--out", run_dir});
  REQUIRE_MESSAGE(train_res.code == 0, train_res.err);
  CHECK(train_res.out.find("best dev macro F1") != std::string::npos);
  CHECK(std::filesystem::exists(std::filesystem::path(run_dir) /
                                "config.json"));
  CHECK(std::filesystem::exists(std::filesystem::path(run_dir) /
                                "history.jsonl"));
  const std::string ckpt =
      (std::filesystem::path(run_dir) / "checkpoint-best").string();
  REQUIRE(std::filesystem::exists(ckpt));

  // Label: row count preserved, deterministic output.
  const std::string labeled = tmp.file("labeled.csv");
  const auto label_res = run_cli({"label", "--checkpoint", ckpt, "--reports",
                                  test_csv, "--out", labeled});
  REQUIRE_MESSAGE(label_res.code == 0, label_res.err);
  const LoadResult loaded = load_reports_csv(labeled);
  CHECK(loaded.dataset.items.size() == 40);
  CHECK(loaded.labeled);

  const std::string labeled2 = tmp.file("labeled2.csv");
  REQUIRE(run_cli({"label", "--checkpoint", ckpt, "--reports", test_csv,
                   "--out", labeled2})
              .code == 0);
  CHECK(slurp(labeled) == slurp(labeled2));  // byte-identical re-run

  // Evaluate predictions against gold.
  const std::string eval_dir = tmp.file("eval");
  const auto eval_res =
      run_cli({"evaluate", "--gold", test_csv, "--preds", labeled, "--out",
               eval_dir, "--set", "n_bootstrap=100"});
  REQUIRE_MESSAGE(eval_res.code == 0, eval_res.err);
  CHECK(std::filesystem::exists(std::filesystem::path(eval_dir) /
                                "evaluation.json"));
  CHECK(std::filesystem::exists(std::filesystem::path(eval_dir) /
                                "per_condition.csv"));

  // Evaluating gold against itself is a perfect score.
  const std::string self_dir = tmp.file("self");
  const auto self_res =
      run_cli({"evaluate", "--gold", test_csv, "--preds", test_csv, "--out",
               self_dir, "--set", "n_bootstrap=100"});
  REQUIRE(self_res.code == 0);
  CHECK(slurp((std::filesystem::path(self_dir) / "evaluation.json").string())
            .find("\"macro_f1\": 1.0") != std::string::npos);

  // Compare a model against itself: zero mean difference.
  const std::string cmp_dir = tmp.file("cmp");
  const auto cmp_res = run_cli({"compare", "--gold", test_csv, "--preds-a",
                                labeled, "--preds-b", labeled, "--out",
                                cmp_dir, "--set", "n_bootstrap=100"});
  REQUIRE_MESSAGE(cmp_res.code == 0, cmp_res.err);
  CHECK(cmp_res.out.find("mean diff 0 ") != std::string::npos);

  // Alignment failure is a user error (exit 1).
  const std::string other_csv = write_synth(tmp, "other.csv", 10, 99, "zz");
  const auto bad = run_cli({"evaluate", "--gold", test_csv, "--preds",
                            other_csv, "--out", tmp.file("bad")});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("missing") != std::string::npos);
}

TEST_CASE("label on an empty reports file emits a header-only CSV") {
  test_util::TempDir tmp("label0");
  const std::string rad_csv = write_synth(tmp, "rad.csv", 60, 7, "rad");
  const std::string run_dir = tmp.file("run");
  REQUIRE(run_cli({"train", "--set", "strategy=rad", "--set",
                   "rad_data=" + rad_csv, "--set",
                   "hyperparams.learning_rate=0.001", "--set",
                   "hyperparams.max_epochs=1", "--set",
                   "hyperparams.eval_every=0", "--set",
                   "encoder.hidden_size=16", "--set", "encoder.num_layers=1",
                   "--set", "encoder.num_heads=2", "--set",
                   "encoder.ff_size=32", "--set", "encoder.max_tokens=32",
                   "--out", run_dir})
              .code == 0);

  std::ofstream(tmp.file("empty.csv")) << "report_id,patient_id,text\n";
  const std::string out_csv = tmp.file("labeled.csv");
  const auto res = run_cli(
      {"label", "--checkpoint",
       (std::filesystem::path(run_dir) / "checkpoint-best").string(),
       "--reports", tmp.file("empty.csv"), "--out", out_csv});
  REQUIRE_MESSAGE(res.code == 0, res.err);
  const auto lines = slurp(out_csv);
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 1);  // header only
}

TEST_CASE("augment doubles rows and supports offline file mode") {
  test_util::TempDir tmp("augcli");
  const std::string in_csv = write_synth(tmp, "in.csv", 12, 3, "r");

  // identity stub, unsplit input with splitting disabled: all rows augment
  const std::string out_csv = tmp.file("aug.csv");
  const auto res = run_cli({"augment", "--in", in_csv, "--out", out_csv,
                            "--set", "split.enabled=false"});
  REQUIRE_MESSAGE(res.code == 0, res.err);
  const LoadResult combined = load_reports_csv(out_csv);
  CHECK(combined.dataset.items.size() == 24);
  std::size_t bt = 0;
  for (const auto& item : combined.dataset.items) {
    bt += item.provenance == Provenance::kBacktranslated ? 1 : 0;
  }
  CHECK(bt == 12);

  // Offline: write sources, "translate" them, read back.
  const std::string sources = tmp.file("sources.txt");
  REQUIRE(run_cli({"augment", "--in", in_csv, "--write-sources", sources,
                   "--set", "split.enabled=false"})
              .code == 0);
  std::istringstream src_in(slurp(sources));
  std::ostringstream translated;
  std::string line;
  std::size_t n_lines = 0;
  while (std::getline(src_in, line)) {
    translated << "uebersetzt " << line << "\n";
    ++n_lines;
  }
  CHECK(n_lines == 12);
  std::ofstream(tmp.file("bt.txt")) << translated.str();

  const std::string out2 = tmp.file("aug2.csv");
  REQUIRE(run_cli({"augment", "--in", in_csv, "--out", out2, "--set",
                   "split.enabled=false", "--read-translations",
                   tmp.file("bt.txt")})
              .code == 0);
  const LoadResult offline = load_reports_csv(out2);
  CHECK(offline.dataset.items.size() == 24);
  bool any_translated = false;
  for (const auto& item : offline.dataset.items) {
    if (item.provenance == Provenance::kBacktranslated) {
      CHECK(item.report.text.starts_with("uebersetzt "));
      any_translated = true;
    }
  }
  CHECK(any_translated);

  // With a split, only train rows are augmented: 2*9 + 3 = 21.
  const std::string out3 = tmp.file("aug3.csv");
  REQUIRE(run_cli({"augment", "--in", in_csv, "--out", out3}).code == 0);
  CHECK(load_reports_csv(out3).dataset.items.size() == 21);
  // --augment-dev augments everything.
  const std::string out4 = tmp.file("aug4.csv");
  REQUIRE(run_cli({"augment", "--in", in_csv, "--out", out4, "--augment-dev"})
              .code == 0);
  CHECK(load_reports_csv(out4).dataset.items.size() == 24);
}

TEST_CASE("prevalence writes the per-condition table") {
  test_util::TempDir tmp("prev");
  const std::string in_csv = write_synth(tmp, "in.csv", 25, 3, "r");
  const std::string out_csv = tmp.file("prev.csv");
  const auto res = run_cli({"prevalence", "--in", in_csv, "--out", out_csv});
  REQUIRE_MESSAGE(res.code == 0, res.err);
  CHECK(res.out.find("Atelectasis") != std::string::npos);
  CHECK(res.out.find("NA") != std::string::npos);  // No Finding neg/unc
  const std::string csv_text = slurp(out_csv);
  CHECK(csv_text.find("condition,positive_count,positive_fraction") !=
        std::string::npos);
  CHECK(std::count(csv_text.begin(), csv_text.end(), '\n') == 15);
}

TEST_CASE("hybrid via init_checkpoint runs only the rad phase") {
  test_util::TempDir tmp("hybridcli");
  const std::string auto_csv = write_synth(tmp, "auto.csv", 80, 11, "auto");
  const std::string rad_csv = write_synth(tmp, "rad.csv", 40, 7, "rad");

  const std::string auto_run = tmp.file("auto-run");
  REQUIRE_MESSAGE(
      run_cli({"train", "--set", "strategy=auto", "--set",
               "auto_data=" + auto_csv, "--set",
               "hyperparams.learning_rate=0.001", "--set",
               "hyperparams.auto_max_epochs=2", "--set",
               "hyperparams.eval_every=0", "--set", "encoder.hidden_size=16",
               "--set", "encoder.num_layers=1", "--set",
               "encoder.num_heads=2", "--set", "encoder.ff_size=32", "--set",
               "encoder.max_tokens=32", "--out", auto_run})
              .code == 0,
      "auto phase failed");
  const std::string auto_best =
      (std::filesystem::path(auto_run) / "checkpoint-auto-best").string();
  REQUIRE(std::filesystem::exists(auto_best));

  const std::string hybrid_run = tmp.file("hybrid-run");
  const auto res = run_cli(
      {"train", "--set", "strategy=hybrid", "--set", "rad_data=" + rad_csv,
       "--set", "init_checkpoint=" + auto_best, "--set",
       "hyperparams.learning_rate=0.001", "--set", "hyperparams.max_epochs=2",
       "--set", "hyperparams.eval_every=0", "--out", hybrid_run});
  REQUIRE_MESSAGE(res.code == 0, res.err);
  // No auto phase ran: no auto checkpoint in the hybrid run dir.
  CHECK(!std::filesystem::exists(std::filesystem::path(hybrid_run) /
                                 "checkpoint-auto-best"));
  CHECK(std::filesystem::exists(std::filesystem::path(hybrid_run) /
                                "checkpoint-best"));
}
