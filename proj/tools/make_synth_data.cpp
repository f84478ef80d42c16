// Regenerates the seeded demo corpora under data/. The files are committed;
// rerunning this tool reproduces them byte-identically.
#include <iostream>
#include <string>

#include "radlabel/corpus.hpp"
#include "radlabel/synthetic.hpp"

using namespace radlabel;

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data";

  SyntheticSpec expert;
  expert.n_reports = 400;
  expert.seed = 7;
  expert.id_prefix = "rad";
  expert.provenance = Provenance::kExpert;
  write_reports_csv(make_synthetic_corpus(expert), dir + "/synth_expert.csv",
                    {.labels = true});

  SyntheticSpec automatic;
  automatic.n_reports = 2000;
  automatic.seed = 11;
  automatic.id_prefix = "auto";
  automatic.provenance = Provenance::kAutomatic;
  write_reports_csv(make_synthetic_corpus(automatic), dir + "/synth_auto.csv",
                    {.labels = true});

  // A small held-out set for the evaluate/compare demos.
  SyntheticSpec test;
  test.n_reports = 120;
  test.seed = 23;
  test.id_prefix = "test";
  write_reports_csv(make_synthetic_corpus(test), dir + "/synth_test.csv",
                    {.labels = true});

  std::cout << "wrote synth_expert.csv, synth_auto.csv, synth_test.csv to "
            << dir << "\n";
  return 0;
}
