#include "radlabel/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "radlabel/errors.hpp"

namespace radlabel {

namespace {
constexpr const char* kSpecials[] = {"[PAD]", "[CLS]", "[UNK]"};
}

Vocabulary::Vocabulary() {
  for (const char* s : kSpecials) add(s);
}

void Vocabulary::add(const std::string& token) {
  index_.emplace(token, static_cast<std::int32_t>(tokens_.size()));
  tokens_.push_back(token);
}

std::vector<std::string> Vocabulary::split_words(const std::string& text) {
  std::vector<std::string> words;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
      continue;
    }
    if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
    if (!std::isspace(c)) words.push_back(std::string(1, static_cast<char>(c)));
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

Vocabulary Vocabulary::build(const std::vector<std::string>& texts,
                             std::size_t min_count, std::size_t max_size) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> stats;
  std::size_t order = 0;
  for (const auto& text : texts) {
    for (auto& word : split_words(text)) {
      auto [it, inserted] = stats.emplace(std::move(word),
                                          std::make_pair(0u, order));
      it->second.first++;
      if (inserted) ++order;
    }
  }
  std::vector<const decltype(stats)::value_type*> entries;
  entries.reserve(stats.size());
  for (const auto& e : stats) {
    if (e.second.first >= min_count) entries.push_back(&e);
  }
  std::sort(entries.begin(), entries.end(), [](const auto* a, const auto* b) {
    if (a->second.first != b->second.first)
      return a->second.first > b->second.first;
    return a->second.second < b->second.second;
  });

  Vocabulary vocab;
  for (const auto* e : entries) {
    if (vocab.tokens_.size() >= max_size) break;
    vocab.add(e->first);
  }
  return vocab;
}

std::int32_t Vocabulary::id_of(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open '" + path + "' for writing");
  for (const auto& t : tokens_) out << t << '\n';
  if (!out) throw IOError("failed writing '" + path + "'");
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open '" + path + "' for reading");
  Vocabulary vocab;
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (i < 3) {
      if (line != kSpecials[i]) {
        throw FormatError("vocabulary " + path +
                          " does not start with the special tokens");
      }
    } else {
      vocab.add(line);
    }
    ++i;
  }
  if (i < 3) throw FormatError("vocabulary " + path + " is truncated");
  return vocab;
}

TokenSequence tokenize_and_truncate(const Vocabulary& vocab,
                                    const std::string& text,
                                    std::size_t max_tokens) {
  TokenSequence seq;
  seq.ids.push_back(Vocabulary::kClsId);
  for (const auto& word : Vocabulary::split_words(text)) {
    if (seq.ids.size() >= max_tokens) break;
    seq.ids.push_back(vocab.id_of(word));
  }
  seq.mask.assign(seq.ids.size(), 1);
  return seq;
}

}  // namespace radlabel
