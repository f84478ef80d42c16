#include "radlabel/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "radlabel/csv.hpp"
#include "radlabel/rng.hpp"

namespace radlabel {

namespace {

constexpr std::string_view kProvenanceNames[] = {"expert", "automatic",
                                                 "backtranslated"};

}  // namespace

std::string_view provenance_name(Provenance p) {
  return kProvenanceNames[static_cast<int>(p)];
}

std::optional<Provenance> provenance_from_name(std::string_view name) {
  for (int i = 0; i < 3; ++i) {
    if (kProvenanceNames[i] == name) return static_cast<Provenance>(i);
  }
  return std::nullopt;
}

std::vector<std::size_t> Dataset::split_indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto it = split.find(items[i].report.report_id);
    if (it != split.end() && it->second == s) out.push_back(i);
  }
  return out;
}

std::string normalize_text(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (std::isspace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

Dataset dedup_reports(const Dataset& ds) {
  Dataset out;
  out.seed = ds.seed;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& item : ds.items) {
    if (seen.emplace(item.report.patient_id, item.report.text).second) {
      out.items.push_back(item);
      const auto it = ds.split.find(item.report.report_id);
      if (it != ds.split.end()) out.split.emplace(*it);
    }
  }
  return out;
}

Dataset split_random(const Dataset& ds, double train_fraction,
                     std::int64_t seed) {
  const std::size_t n = ds.items.size();
  if (n < 2) {
    throw SizeError("cannot split a dataset of " + std::to_string(n) +
                    " items");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw SizeError("train_fraction must lie in (0, 1)");
  }
  const auto n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(n) + 0.5));
  if (n_train == 0 || n_train == n) {
    throw SizeError("split would leave an empty side (train=" +
                    std::to_string(n_train) + " of " + std::to_string(n) +
                    ")");
  }

  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& item : ds.items) ids.push_back(item.report.report_id);
  std::sort(ids.begin(), ids.end());

  Rng rng(static_cast<std::uint64_t>(seed));
  rng.shuffle(ids);

  Dataset out = ds;
  out.split.clear();
  out.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    out.split.emplace(ids[i], i < n_train ? Split::kTrain : Split::kDev);
  }
  return out;
}

PrevalenceTable class_prevalence(const Dataset& ds) {
  PrevalenceTable table{};
  for (const auto& item : ds.items) {
    for (const Condition c : all_conditions()) {
      table[condition_index(c)][static_cast<int>(item.labels.at(c))].count++;
    }
  }
  const auto n = static_cast<double>(ds.items.size());
  if (n > 0) {
    for (auto& row : table) {
      for (auto& cell : row) {
        cell.fraction = static_cast<double>(cell.count) / n;
      }
    }
  }
  return table;
}

namespace {

struct HeaderLayout {
  int report_id = -1;
  int patient_id = -1;
  int text = -1;
  std::array<int, kNumConditions> labels{};  // -1 when unlabeled
  int provenance = -1;
  int split = -1;
  bool labeled = false;
};

HeaderLayout parse_header(const std::vector<std::string>& header,
                          const std::string& path) {
  HeaderLayout layout;
  layout.labels.fill(-1);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& name = header[i];
    if (name == "report_id") layout.report_id = static_cast<int>(i);
    else if (name == "patient_id") layout.patient_id = static_cast<int>(i);
    else if (name == "text") layout.text = static_cast<int>(i);
    else if (name == "provenance") layout.provenance = static_cast<int>(i);
    else if (name == "split") layout.split = static_cast<int>(i);
    else if (auto c = condition_from_name(name)) {
      layout.labels[condition_index(*c)] = static_cast<int>(i);
    } else {
      throw FormatError("unknown column '" + name + "' in " + path);
    }
  }
  if (layout.report_id < 0 || layout.patient_id < 0 || layout.text < 0) {
    throw FormatError("header of " + path +
                      " must contain report_id, patient_id and text");
  }
  const auto n_label_cols =
      std::count_if(layout.labels.begin(), layout.labels.end(),
                    [](int i) { return i >= 0; });
  if (n_label_cols != 0 &&
      n_label_cols != static_cast<long>(kNumConditions)) {
    throw FormatError("header of " + path + " has " +
                      std::to_string(n_label_cols) + " of " +
                      std::to_string(kNumConditions) + " condition columns");
  }
  layout.labeled = n_label_cols != 0;
  return layout;
}

}  // namespace

LoadResult load_reports_csv(const std::string& path,
                            Provenance default_provenance) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) {
    throw FormatError("file " + path + " has no header row");
  }
  const HeaderLayout layout = parse_header(rows[0], path);

  LoadResult result;
  result.labeled = layout.labeled;
  std::set<std::string> seen_ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string at_row = " at row " + std::to_string(r + 1) + " of " +
                               path;
    if (row.size() != rows[0].size()) {
      throw FormatError("expected " + std::to_string(rows[0].size()) +
                        " fields, got " + std::to_string(row.size()) + at_row);
    }
    LabeledReport item;
    item.report.report_id = row[layout.report_id];
    item.report.patient_id = row[layout.patient_id];
    item.report.text = normalize_text(row[layout.text]);
    if (item.report.report_id.empty()) {
      throw FormatError("empty report_id" + at_row);
    }
    if (!seen_ids.insert(item.report.report_id).second) {
      throw FormatError("duplicate report_id '" + item.report.report_id +
                        "'" + at_row);
    }
    if (item.report.text.empty()) result.empty_text_rows.push_back(r + 1);

    if (layout.labeled) {
      for (const Condition c : all_conditions()) {
        const std::string& cell = row[layout.labels[condition_index(c)]];
        try {
          item.labels.set(c, parse_label_value(cell, condition_name(c)));
        } catch (const FormatError& e) {
          throw FormatError(std::string(e.what()) + at_row);
        }
      }
      try {
        validate(item.labels);
      } catch (const SchemaError& e) {
        throw FormatError(std::string(e.what()) + at_row);
      }
    }

    item.provenance = default_provenance;
    if (layout.provenance >= 0 && !row[layout.provenance].empty()) {
      const auto p = provenance_from_name(row[layout.provenance]);
      if (!p) {
        throw FormatError("unknown provenance '" + row[layout.provenance] +
                          "'" + at_row);
      }
      item.provenance = *p;
    }
    if (layout.split >= 0 && !row[layout.split].empty()) {
      const std::string& s = row[layout.split];
      if (s == "train") {
        result.dataset.split.emplace(item.report.report_id, Split::kTrain);
      } else if (s == "dev") {
        result.dataset.split.emplace(item.report.report_id, Split::kDev);
      } else {
        throw FormatError("unknown split '" + s + "'" + at_row);
      }
    }
    result.dataset.items.push_back(std::move(item));
  }
  if (!result.dataset.split.empty() &&
      result.dataset.split.size() != result.dataset.items.size()) {
    throw FormatError("split column of " + path +
                      " does not cover every row");
  }
  return result;
}

void write_reports_csv(const Dataset& ds, const std::string& path,
                       const CsvWriteOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open '" + path + "' for writing");

  std::vector<std::string> header = {"report_id", "patient_id", "text"};
  if (options.labels) {
    for (const Condition c : all_conditions()) {
      header.emplace_back(condition_name(c));
    }
  }
  if (options.provenance) header.emplace_back("provenance");
  if (options.split) header.emplace_back("split");
  csv::write_row(out, header);

  for (const auto& item : ds.items) {
    std::vector<std::string> row = {item.report.report_id,
                                    item.report.patient_id, item.report.text};
    if (options.labels) {
      for (auto& cell : encode_label_row(item.labels)) {
        row.push_back(std::move(cell));
      }
    }
    if (options.provenance) {
      row.emplace_back(provenance_name(item.provenance));
    }
    if (options.split) {
      const auto it = ds.split.find(item.report.report_id);
      row.emplace_back(it == ds.split.end()
                           ? ""
                           : (it->second == Split::kTrain ? "train" : "dev"));
    }
    csv::write_row(out, row);
  }
  if (!out) throw IOError("failed writing '" + path + "'");
}

}  // namespace radlabel
