#ifndef RADLABEL_TOKENIZER_HPP
#define RADLABEL_TOKENIZER_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace radlabel {

// Token ids plus padding mask (1 = real token). Sequences produced by the
// tokenizer are unpadded (all-ones mask); padded sequences only appear when
// a caller aligns lengths itself.
struct TokenSequence {
  std::vector<std::int32_t> ids;
  std::vector<std::uint8_t> mask;

  std::size_t size() const { return ids.size(); }
};

// Word-level vocabulary with fixed special ids. Lowercases, splits on
// whitespace, and treats every non-alphanumeric character as its own token.
class Vocabulary {
 public:
  static constexpr std::int32_t kPadId = 0;
  static constexpr std::int32_t kClsId = 1;
  static constexpr std::int32_t kUnkId = 2;

  Vocabulary();

  // Tokens ordered by descending frequency (ties by first occurrence),
  // capped at max_size entries including the specials.
  static Vocabulary build(const std::vector<std::string>& texts,
                          std::size_t min_count = 1,
                          std::size_t max_size = 60000);

  static std::vector<std::string> split_words(const std::string& text);

  std::int32_t id_of(const std::string& token) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  void add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
};

// text -> [CLS] + word ids, truncated to max_tokens. The start marker is
// always retained; truncation drops trailing content tokens.
TokenSequence tokenize_and_truncate(const Vocabulary& vocab,
                                    const std::string& text,
                                    std::size_t max_tokens);

}  // namespace radlabel

#endif  // RADLABEL_TOKENIZER_HPP
