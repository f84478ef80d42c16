#ifndef RADLABEL_AUGMENTATION_HPP
#define RADLABEL_AUGMENTATION_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "radlabel/corpus.hpp"

namespace radlabel {

struct TranslationConfig {
  std::string pivot_language = "de";
  int beam_size = 1;
};

// Pivot-and-back translation boundary. Implementations must be
// deterministic for a fixed configuration.
class TranslationClient {
 public:
  explicit TranslationClient(TranslationConfig config)
      : config_(std::move(config)) {}
  virtual ~TranslationClient() = default;

  // Throws TranslationError on failure; may return empty output (the
  // augmentation fallback handles both).
  virtual std::string backtranslate_one(const std::string& text) = 0;

  const TranslationConfig& config() const { return config_; }

 private:
  TranslationConfig config_;
};

// Returns the backtranslation of `text`; TranslationError on client
// failure or empty output — callers fall back to the original text.
std::string backtranslate(TranslationClient& client, const std::string& text);

class IdentityStubClient : public TranslationClient {
 public:
  explicit IdentityStubClient(TranslationConfig config = {})
      : TranslationClient(std::move(config)) {}
  std::string backtranslate_one(const std::string& text) override {
    return text;
  }
};

// Word-for-word substitutions, approximating the paraphrases a real
// pivot round-trip produces. Case-sensitive whole-word matches.
class DictionaryStubClient : public TranslationClient {
 public:
  explicit DictionaryStubClient(TranslationConfig config = {});
  DictionaryStubClient(std::map<std::string, std::string> replacements,
                       TranslationConfig config = {});
  std::string backtranslate_one(const std::string& text) override;

 private:
  std::map<std::string, std::string> replacements_;
};

// Remote translation model behind the wire protocol:
//   POST <endpoint>/translate
//   request  {"texts": [...], "pivot": "de", "beam": 1}
//   response {"texts": [...]}   (same length and order)
class HttpTranslationClient : public TranslationClient {
 public:
  HttpTranslationClient(std::string host, int port,
                        TranslationConfig config = {});
  std::string backtranslate_one(const std::string& text) override;
  std::vector<std::string> backtranslate_batch(
      const std::vector<std::string>& texts);

 private:
  std::string host_;
  int port_;
};

// Offline batch mode: answers from a newline-delimited translations file
// aligned with the sources it was produced from.
class FileBatchClient : public TranslationClient {
 public:
  // `sources` pairs each original text with its line in the file.
  FileBatchClient(const std::vector<std::string>& sources,
                  const std::string& translations_path,
                  TranslationConfig config = {});
  std::string backtranslate_one(const std::string& text) override;

 private:
  std::map<std::string, std::string> by_source_;
};

struct AugmentedDataset {
  Dataset base;       // input dataset, bit-identical to what was passed in
  Dataset augmented;  // one backtranslated copy per augmentable item
  std::map<std::string, std::string> pairing;  // augmented id -> base id
  std::vector<std::string> fallback_ids;  // copies that kept the original text

  // base plus augmented; augmented items inherit their base item's split.
  Dataset combined() const;
};

// Indices of the items augment_dataset would copy, in dataset order:
// train-split items (all items when the dataset is unsplit), plus dev
// items iff augment_dev.
std::vector<std::size_t> augmentation_targets(const Dataset& ds,
                                              bool augment_dev);

// Backtranslates every augmentation target. Labels are copied verbatim;
// failures degrade to original-text copies so the pool is always doubled.
// Translation calls run with bounded parallelism, reassembled in input
// order.
AugmentedDataset augment_dataset(const Dataset& ds, TranslationClient& client,
                                 bool augment_dev = false,
                                 int parallelism = 4);

}  // namespace radlabel

#endif  // RADLABEL_AUGMENTATION_HPP
