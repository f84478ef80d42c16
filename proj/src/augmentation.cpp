#include "radlabel/augmentation.hpp"

#include <algorithm>
#include <fstream>
#include <future>

#include <httplib.h>
#include <json.hpp>

#include "radlabel/errors.hpp"
#include "radlabel/tokenizer.hpp"

namespace radlabel {

using nlohmann::json;

std::string backtranslate(TranslationClient& client, const std::string& text) {
  if (text.empty()) throw TranslationError("cannot translate empty text");
  std::string out = client.backtranslate_one(text);
  if (out.empty()) throw TranslationError("client returned empty output");
  return out;
}

namespace {

// Paraphrases observed from German pivot round-trips on radiology text.
std::map<std::string, std::string> default_dictionary() {
  return {
      {"anterior", "front"},     {"cutaneous", "skin"},
      {"clavicle", "collarbone"}, {"osseous", "bony"},
      {"marked", "pronounced"},  {"multiple", "several"},
      {"demonstrates", "shows"}, {"unremarkable", "unobtrusive"},
      {"residual", "remaining"}, {"evaluation", "assessment"},
  };
}

}  // namespace

DictionaryStubClient::DictionaryStubClient(TranslationConfig config)
    : TranslationClient(std::move(config)),
      replacements_(default_dictionary()) {}

DictionaryStubClient::DictionaryStubClient(
    std::map<std::string, std::string> replacements, TranslationConfig config)
    : TranslationClient(std::move(config)),
      replacements_(std::move(replacements)) {}

std::string DictionaryStubClient::backtranslate_one(const std::string& text) {
  std::string out;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    const auto it = replacements_.find(word);
    out += it == replacements_.end() ? word : it->second;
    word.clear();
  };
  for (char c : text) {
    if (c == ' ') {
      flush();
      out.push_back(c);
    } else {
      word.push_back(c);
    }
  }
  flush();
  return out;
}

HttpTranslationClient::HttpTranslationClient(std::string host, int port,
                                             TranslationConfig config)
    : TranslationClient(std::move(config)), host_(std::move(host)),
      port_(port) {}

std::vector<std::string> HttpTranslationClient::backtranslate_batch(
    const std::vector<std::string>& texts) {
  httplib::Client cli(host_, port_);
  const json request{{"texts", texts},
                     {"pivot", config().pivot_language},
                     {"beam", config().beam_size}};
  auto res = cli.Post("/translate", request.dump(), "application/json");
  if (!res) {
    throw TranslationError("translation endpoint unreachable at " + host_ +
                           ":" + std::to_string(port_));
  }
  if (res->status != 200) {
    throw TranslationError("translation endpoint returned status " +
                           std::to_string(res->status));
  }
  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::exception& e) {
    throw TranslationError(std::string("bad translation response: ") +
                           e.what());
  }
  if (!body.contains("texts") || !body["texts"].is_array() ||
      body["texts"].size() != texts.size()) {
    throw TranslationError(
        "translation response length does not match request");
  }
  return body["texts"].get<std::vector<std::string>>();
}

std::string HttpTranslationClient::backtranslate_one(const std::string& text) {
  return backtranslate_batch({text}).at(0);
}

FileBatchClient::FileBatchClient(const std::vector<std::string>& sources,
                                 const std::string& translations_path,
                                 TranslationConfig config)
    : TranslationClient(std::move(config)) {
  std::ifstream in(translations_path, std::ios::binary);
  if (!in) {
    throw IOError("cannot open translations file '" + translations_path +
                  "'");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (lines.size() != sources.size()) {
    throw FormatError("translations file has " + std::to_string(lines.size()) +
                      " lines for " + std::to_string(sources.size()) +
                      " sources");
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    by_source_.emplace(sources[i], lines[i]);
  }
}

std::string FileBatchClient::backtranslate_one(const std::string& text) {
  const auto it = by_source_.find(text);
  if (it == by_source_.end()) {
    throw TranslationError("no offline translation for this text");
  }
  return it->second;
}

Dataset AugmentedDataset::combined() const {
  Dataset out = base;
  for (const auto& item : augmented.items) {
    out.items.push_back(item);
    if (!base.split.empty()) {
      const auto base_it = base.split.find(pairing.at(item.report.report_id));
      out.split.emplace(item.report.report_id, base_it->second);
    }
  }
  return out;
}

std::vector<std::size_t> augmentation_targets(const Dataset& ds,
                                              bool augment_dev) {
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    if (ds.has_split()) {
      const auto it = ds.split.find(ds.items[i].report.report_id);
      if (it->second == Split::kDev && !augment_dev) continue;
    }
    targets.push_back(i);
  }
  return targets;
}

AugmentedDataset augment_dataset(const Dataset& ds, TranslationClient& client,
                                 bool augment_dev, int parallelism) {
  if (parallelism < 1) parallelism = 1;
  AugmentedDataset result;
  result.base = ds;

  const std::vector<std::size_t> targets =
      augmentation_targets(ds, augment_dev);

  // Bounded parallel translation, reassembled in input order. Failures
  // become original-text copies so the pool is always exactly doubled.
  std::vector<std::string> translated(targets.size());
  std::vector<bool> failed(targets.size(), false);
  for (std::size_t block = 0; block < targets.size();
       block += static_cast<std::size_t>(parallelism)) {
    const auto end = std::min(block + static_cast<std::size_t>(parallelism),
                              targets.size());
    std::vector<std::future<std::string>> futures;
    futures.reserve(end - block);
    for (std::size_t j = block; j < end; ++j) {
      const std::string& text = ds.items[targets[j]].report.text;
      futures.push_back(std::async(std::launch::async, [&client, &text] {
        return backtranslate(client, text);
      }));
    }
    for (std::size_t j = block; j < end; ++j) {
      try {
        translated[j] = normalize_text(futures[j - block].get());
        if (translated[j].empty()) throw TranslationError("blank output");
      } catch (const TranslationError&) {
        translated[j] = ds.items[targets[j]].report.text;
        failed[j] = true;
      }
    }
  }

  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto& base_item = ds.items[targets[j]];
    LabeledReport copy;
    copy.report.report_id = base_item.report.report_id + "-bt";
    copy.report.patient_id = base_item.report.patient_id;
    copy.report.text = translated[j];
    copy.labels = base_item.labels;
    copy.provenance = Provenance::kBacktranslated;
    result.pairing.emplace(copy.report.report_id, base_item.report.report_id);
    if (failed[j]) result.fallback_ids.push_back(copy.report.report_id);
    result.augmented.items.push_back(std::move(copy));
  }
  return result;
}

}  // namespace radlabel
