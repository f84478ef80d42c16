#ifndef RADLABEL_MODEL_HPP
#define RADLABEL_MODEL_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "radlabel/encoder.hpp"
#include "radlabel/label_schema.hpp"

namespace radlabel {

enum class HeadInputMode { kCls, kTokenAverage };
enum class FreezeMode { kNone, kEncoderFrozen };

std::string_view head_input_mode_name(HeadInputMode m);
std::optional<HeadInputMode> head_input_mode_from_name(std::string_view name);

// One logit block per condition: [batch x class_count(condition)].
struct LogitBlocks {
  std::array<Eigen::MatrixXd, kNumConditions> blocks;

  Eigen::Index batch_size() const { return blocks[0].rows(); }
};

struct HyperParams {
  double learning_rate = 2e-5;
  int batch_size = 18;
  int max_epochs = 20;       // rad phases; dev-based early stop applies
  int auto_max_epochs = 8;   // auto phase trains this many epochs
  int eval_every = 500;      // steps; epoch boundaries always evaluate
  int patience = 5;          // evals without dev improvement before stopping
  std::int64_t seed = 42;
  int threads = 0;           // worker threads per batch; 0 = hardware
};

// Encoder + 14 affine classification heads on the pooled representation.
// 13 heads emit 4 logits; the No Finding head emits 2.
class MultiHeadClassifier {
 public:
  MultiHeadClassifier(EncoderConfig config, Vocabulary vocab,
                      std::uint64_t seed);

  TransformerEncoder& encoder() { return encoder_; }
  const TransformerEncoder& encoder() const { return encoder_; }

  HeadInputMode head_input_mode() const { return head_input_mode_; }
  void set_head_input_mode(HeadInputMode m) { head_input_mode_ = m; }
  FreezeMode freeze_mode() const { return freeze_mode_; }
  void set_freeze_mode(FreezeMode m);

  // Batch items are processed independently; with n_threads > 1 they are
  // distributed over a fixed number of lanes whose results are combined in
  // lane order, so outputs are bit-identical for every thread count.
  LogitBlocks forward(const std::vector<TokenSequence>& batch,
                      int n_threads = 1) const;
  std::vector<LabelVector> predict(const std::vector<TokenSequence>& batch,
                                   int n_threads = 1) const;

  // Sum over the 14 heads of the per-head mean-over-batch cross-entropy.
  double loss(const std::vector<TokenSequence>& batch,
              const std::vector<LabelVector>& gold) const;

  // Same value as loss(), also accumulating parameter gradients. Encoder
  // gradients are skipped entirely when the encoder is frozen.
  double loss_and_gradients(const std::vector<TokenSequence>& batch,
                            const std::vector<LabelVector>& gold,
                            int n_threads = 1);

  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  std::vector<Tensor*> trainable_parameters();
  std::vector<Tensor*> head_parameters();
  void zero_grads();

  Tensor& head_weight(Condition c) { return heads_[condition_index(c)].w; }
  Tensor& head_bias(Condition c) { return heads_[condition_index(c)].b; }

  // 13*(4*hidden + 4) + (2*hidden + 2)
  static std::int64_t head_parameter_count(int hidden_size);

  MultiHeadClassifier(const MultiHeadClassifier& other);
  MultiHeadClassifier& operator=(const MultiHeadClassifier&) = delete;
  MultiHeadClassifier(MultiHeadClassifier&&) noexcept;
  MultiHeadClassifier& operator=(MultiHeadClassifier&&) noexcept;
  ~MultiHeadClassifier();

 private:
  struct Head {
    Tensor w;  // [H x classes]
    Tensor b;  // [1 x classes]
  };
  struct Lanes;

  Eigen::RowVectorXd pooled(const Eigen::MatrixXd& hidden,
                            const TokenSequence& seq) const;
  double item_loss_and_grads(const TokenSequence& seq, const LabelVector& gold,
                             double inv_batch);
  void ensure_lanes();

  TransformerEncoder encoder_;
  std::array<Head, kNumConditions> heads_;
  HeadInputMode head_input_mode_ = HeadInputMode::kCls;
  FreezeMode freeze_mode_ = FreezeMode::kNone;
  std::unique_ptr<Lanes> lanes_;  // parallel gradient scratch, not state
};

// Argmax decoding with ties broken by the lowest class index
// (Blank, Positive, Negative, Uncertain). Valid by construction.
std::vector<LabelVector> predict_from_logits(const LogitBlocks& logits);

// True if every parameter of both models is bit-identical.
bool same_weights(const MultiHeadClassifier& a, const MultiHeadClassifier& b);

}  // namespace radlabel

#endif  // RADLABEL_MODEL_HPP
