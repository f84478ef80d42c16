#include "radlabel/corpus.hpp"

#include <doctest.h>

#include <fstream>

#include "radlabel/rng.hpp"
#include "radlabel/synthetic.hpp"
#include "test_util.hpp"

using namespace radlabel;

namespace {

LabeledReport make_item(const std::string& id, const std::string& patient,
                        const std::string& text) {
  LabeledReport item;
  item.report.report_id = id;
  item.report.patient_id = patient;
  item.report.text = normalize_text(text);
  return item;
}

// Random string over words, whitespace runs and control whitespace.
std::string fuzz_string(Rng& rng) {
  static const char* pieces[] = {"a",  "bb", "report", "x1", " ",  "  ",
                                 "\t", "\n", "\r\n",   "\n\n", "\v", "\f"};
  std::string s;
  const auto n = rng.uniform_below(30);
  for (std::uint64_t i = 0; i < n; ++i) {
    s += pieces[rng.uniform_below(std::size(pieces))];
  }
  return s;
}

}  // namespace

TEST_CASE("normalize_text collapses whitespace") {
  CHECK(normalize_text("a  b\n\nc") == "a b c");
  CHECK(normalize_text("x") == "x");
  CHECK(normalize_text("") == "");
  CHECK(normalize_text(" \t\n ") == "");
  CHECK(normalize_text("  leading and trailing \r\n") ==
        "leading and trailing");
  CHECK(normalize_text("line1\nline2") == "line1 line2");
}

TEST_CASE("normalize_text is idempotent on fuzzed strings") {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const std::string s = fuzz_string(rng);
    const std::string once = normalize_text(s);
    CHECK(normalize_text(once) == once);
  }
}

TEST_CASE("dedup keeps the first occurrence per patient+text") {
  Dataset ds;
  ds.items.push_back(make_item("r1", "p1", "no acute disease"));
  ds.items.push_back(make_item("r2", "p1", "no  acute\ndisease"));  // dup
  ds.items.push_back(make_item("r3", "p2", "no acute disease"));    // other patient
  ds.items.push_back(make_item("r4", "p1", "effusion seen"));

  const Dataset out = dedup_reports(ds);
  REQUIRE(out.items.size() == 3);
  CHECK(out.items[0].report.report_id == "r1");
  CHECK(out.items[1].report.report_id == "r3");
  CHECK(out.items[2].report.report_id == "r4");

  // Idempotent, never increasing.
  const Dataset again = dedup_reports(out);
  CHECK(again.items.size() == out.items.size());

  Dataset clean;
  clean.items.push_back(make_item("a", "p", "one"));
  clean.items.push_back(make_item("b", "p", "two"));
  CHECK(dedup_reports(clean).items.size() == 2);
}

TEST_CASE("split_random sizes and determinism") {
  SyntheticSpec spec;
  spec.n_reports = 100;
  const Dataset ds = make_synthetic_corpus(spec);

  const Dataset split = split_random(ds, 0.75, 3);
  CHECK(split.split_indices(Split::kTrain).size() == 75);
  CHECK(split.split_indices(Split::kDev).size() == 25);

  const Dataset split2 = split_random(ds, 0.75, 3);
  CHECK(split.split == split2.split);

  const Dataset other_seed = split_random(ds, 0.75, 4);
  CHECK(split.split != other_seed.split);

  // round-half-up on 0.85 * 4 = 3.4
  Dataset four;
  for (int i = 0; i < 4; ++i) {
    four.items.push_back(make_item("r" + std::to_string(i), "p", "text"));
  }
  const Dataset s4 = split_random(four, 0.85, 1);
  CHECK(s4.split_indices(Split::kTrain).size() == 3);
  CHECK(s4.split_indices(Split::kDev).size() == 1);

  SyntheticSpec big;
  big.n_reports = 1000;
  const Dataset s1000 = split_random(make_synthetic_corpus(big), 0.85, 1);
  CHECK(s1000.split_indices(Split::kTrain).size() == 850);
}

TEST_CASE("split assignment is independent of item order") {
  SyntheticSpec spec;
  spec.n_reports = 60;
  Dataset ds = make_synthetic_corpus(spec);
  const Dataset split_a = split_random(ds, 0.75, 9);

  Dataset reversed = ds;
  std::reverse(reversed.items.begin(), reversed.items.end());
  const Dataset split_b = split_random(reversed, 0.75, 9);
  CHECK(split_a.split == split_b.split);
}

TEST_CASE("split_random rejects degenerate inputs") {
  Dataset one;
  one.items.push_back(make_item("r", "p", "text"));
  CHECK_THROWS_AS(split_random(one, 0.5, 1), SizeError);

  Dataset two;
  two.items.push_back(make_item("a", "p", "t"));
  two.items.push_back(make_item("b", "p", "t"));
  CHECK_THROWS_AS(split_random(two, 0.95, 1), SizeError);  // dev empty
  CHECK_THROWS_AS(split_random(two, 1.5, 1), SizeError);
  CHECK_NOTHROW(split_random(two, 0.5, 1));
}

TEST_CASE("class_prevalence counts and fractions") {
  Dataset empty;
  const auto empty_table = class_prevalence(empty);
  for (const auto& row : empty_table) {
    for (const auto& cell : row) {
      CHECK(cell.count == 0);
      CHECK(cell.fraction == 0.0);
    }
  }

  Dataset single;
  single.items.push_back(make_item("r", "p", "text"));
  const auto table = class_prevalence(single);
  for (const Condition c : all_conditions()) {
    CHECK(table[condition_index(c)][0].count == 1);  // Blank
    CHECK(table[condition_index(c)][0].fraction == 1.0);
  }

  SyntheticSpec spec;
  spec.n_reports = 333;
  const Dataset ds = make_synthetic_corpus(spec);
  const auto t2 = class_prevalence(ds);
  for (const auto& row : t2) {
    std::int64_t count_sum = 0;
    double frac_sum = 0.0;
    for (const auto& cell : row) {
      count_sum += cell.count;
      frac_sum += cell.fraction;
    }
    CHECK(count_sum == 333);
    CHECK(frac_sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("reports CSV round-trips") {
  test_util::TempDir tmp("csv");
  SyntheticSpec spec;
  spec.n_reports = 40;
  Dataset ds = make_synthetic_corpus(spec);
  ds.items[3].report.text = "quoted, \"cells\" and commas";
  ds.items[5].provenance = Provenance::kBacktranslated;
  ds = split_random(ds, 0.75, 5);

  const std::string path = tmp.file("ds.csv");
  write_reports_csv(ds, path,
                    {.labels = true, .provenance = true, .split = true});
  const LoadResult loaded = load_reports_csv(path);
  REQUIRE(loaded.labeled);
  REQUIRE(loaded.dataset.items.size() == ds.items.size());
  CHECK(loaded.dataset.items == ds.items);
  CHECK(loaded.dataset.split == ds.split);
}

TEST_CASE("CSV edge cases") {
  test_util::TempDir tmp("csvedge");

  SUBCASE("header only") {
    std::ofstream(tmp.file("h.csv")) << "report_id,patient_id,text\n";
    const LoadResult res = load_reports_csv(tmp.file("h.csv"));
    CHECK(res.dataset.items.empty());
    CHECK(!res.labeled);
  }

  SUBCASE("malformed label cell names the row") {
    std::ofstream out(tmp.file("bad.csv"));
    out << "report_id,patient_id,text";
    for (const Condition c : all_conditions()) {
      out << "," << condition_name(c);
    }
    out << "\n";
    for (int r = 0; r < 6; ++r) {
      out << "r" << r << ",p,text,,,,,,,,,,,,,,\n";
    }
    out << "r6,p,text,oops,,,,,,,,,,,,,\n";  // row 8 of the file
    out.close();
    try {
      load_reports_csv(tmp.file("bad.csv"));
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("row 8") != std::string::npos);
      CHECK(std::string(e.what()).find("oops") != std::string::npos);
    }
  }

  SUBCASE("No Finding restriction enforced on load") {
    std::ofstream out(tmp.file("nf.csv"));
    out << "report_id,patient_id,text";
    for (const Condition c : all_conditions()) {
      out << "," << condition_name(c);
    }
    out << "\n";
    // No Finding is column index 8 among the condition cells.
    out << "r0,p,text,,,,,,,,,-1.0,,,,,\n";
    out.close();
    CHECK_THROWS_AS(load_reports_csv(tmp.file("nf.csv")), FormatError);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_reports_csv(tmp.file("absent.csv")), IOError);
  }

  SUBCASE("duplicate ids rejected") {
    std::ofstream(tmp.file("dup.csv"))
        << "report_id,patient_id,text\na,p,t1\na,p,t2\n";
    CHECK_THROWS_AS(load_reports_csv(tmp.file("dup.csv")), FormatError);
  }

  SUBCASE("empty text rows are retained but flagged") {
    std::ofstream(tmp.file("empty.csv"))
        << "report_id,patient_id,text\na,p,\"  \n \"\nb,p,fine\n";
    const LoadResult res = load_reports_csv(tmp.file("empty.csv"));
    REQUIRE(res.dataset.items.size() == 2);
    REQUIRE(res.empty_text_rows.size() == 1);
    CHECK(res.empty_text_rows[0] == 2);
    CHECK(res.dataset.items[0].report.text.empty());
  }
}
