#ifndef RADLABEL_ENCODER_HPP
#define RADLABEL_ENCODER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "radlabel/tensor.hpp"
#include "radlabel/tokenizer.hpp"

namespace radlabel {

// Architecture hyperparameters. `name` identifies the weight source (e.g.
// a generic vs. biomedically pretrained initialization) and is recorded in
// checkpoints; it does not select a code path.
struct EncoderConfig {
  std::string name = "tiny";
  int hidden_size = 64;
  int num_layers = 2;
  int num_heads = 4;
  int ff_size = 256;
  int max_tokens = 512;
  double init_std = 0.02;
};

struct LayerNormCache {
  Eigen::MatrixXd xhat;
  Eigen::VectorXd inv_std;
};

struct LayerCache {
  Eigen::MatrixXd x;  // layer input [T x H]
  Eigen::MatrixXd q, k, v;
  std::vector<Eigen::MatrixXd> attn;  // per head [T x T]
  Eigen::MatrixXd context;
  LayerNormCache ln1;
  Eigen::MatrixXd y1;     // post-LN1 [T x H]
  Eigen::MatrixXd f1, g;  // FFN pre/post activation [T x F]
  LayerNormCache ln2;
};

struct EncoderCache {
  LayerNormCache ln_emb;
  std::vector<LayerCache> layers;
  Eigen::MatrixXd out;  // final hidden states [T x H]
};

// Pre-norm-free (post-LN) transformer encoder over word-level token ids,
// with hand-written backward passes. One sequence at a time; padding
// positions (mask 0) are excluded as attention keys.
class TransformerEncoder {
 public:
  TransformerEncoder(EncoderConfig config, Vocabulary vocab,
                     std::uint64_t seed);

  const EncoderConfig& config() const { return config_; }
  const Vocabulary& vocabulary() const { return vocab_; }

  TokenSequence tokenize(const std::string& text) const {
    return tokenize_and_truncate(vocab_, text,
                                 static_cast<std::size_t>(config_.max_tokens));
  }

  // Final-layer hidden states, one row per token. Position 0 is the CLS
  // (start marker) state. Throws ShapeError on malformed input.
  Eigen::MatrixXd forward(const TokenSequence& seq,
                          EncoderCache* cache = nullptr) const;

  // Accumulates parameter gradients for d(loss)/d(hidden states).
  void backward(const TokenSequence& seq, const EncoderCache& cache,
                const Eigen::MatrixXd& d_out);

  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  void set_trainable(bool trainable);

 private:
  struct LayerParams {
    Tensor wq, bq, wk, bk, wv, bv, wo, bo;
    Tensor ln1_gamma, ln1_beta;
    Tensor w1, b1, w2, b2;
    Tensor ln2_gamma, ln2_beta;
  };

  void check_input(const TokenSequence& seq) const;

  EncoderConfig config_;
  Vocabulary vocab_;
  Tensor word_emb_;  // [V x H]
  Tensor pos_emb_;   // [max_tokens x H]
  Tensor ln_emb_gamma_, ln_emb_beta_;
  std::vector<LayerParams> layers_;
};

}  // namespace radlabel

#endif  // RADLABEL_ENCODER_HPP
