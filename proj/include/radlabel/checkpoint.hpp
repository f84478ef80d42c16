#ifndef RADLABEL_CHECKPOINT_HPP
#define RADLABEL_CHECKPOINT_HPP

#include <string>

#include "radlabel/model.hpp"

namespace radlabel {

// Checkpoint directory layout:
//   manifest.json  schema version, encoder config, head_input_mode,
//                  hidden size, canonical condition order
//   vocab.txt      one token per line, line number = id
//   encoder.bin    named tensors, raw doubles
//   heads.bin      named tensors, raw doubles
// Weights round-trip bit-exactly.
void save_checkpoint(const MultiHeadClassifier& model, const std::string& dir);

MultiHeadClassifier load_checkpoint(const std::string& dir);

// Loads weights from `dir` into an existing model of identical
// architecture (hybrid phase hand-off).
void load_weights_into(MultiHeadClassifier& model, const std::string& dir);

// Builds a model whose encoder (config, vocabulary, weights) comes from a
// checkpoint while the heads start fresh at zero — pretrained-encoder
// initialization.
MultiHeadClassifier model_with_pretrained_encoder(const std::string& dir);

}  // namespace radlabel

#endif  // RADLABEL_CHECKPOINT_HPP
