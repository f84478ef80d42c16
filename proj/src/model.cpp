#include "radlabel/model.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "radlabel/errors.hpp"

namespace radlabel {

namespace {

// Fixed lane count: the batch is always carved into kGradLanes contiguous
// chunks combined in lane order, so gradient sums and losses do not depend
// on how many worker threads execute the lanes.
constexpr int kGradLanes = 6;

int effective_threads(int n_threads, std::size_t work_items) {
  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  return std::max(1, std::min<int>(n_threads,
                                   static_cast<int>(work_items)));
}

// Runs fn(k) for k in [0, n) on `threads` workers.
template <typename Fn>
void parallel_for(int n, int threads, const Fn& fn) {
  if (threads <= 1 || n <= 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int n_workers = std::min(threads, n);
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) {
    pool.emplace_back([&] {
      for (int k = next.fetch_add(1); k < n; k = next.fetch_add(1)) fn(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

struct MultiHeadClassifier::Lanes {
  std::vector<MultiHeadClassifier> models;
};

std::string_view head_input_mode_name(HeadInputMode m) {
  return m == HeadInputMode::kCls ? "cls" : "token_average";
}

std::optional<HeadInputMode> head_input_mode_from_name(std::string_view name) {
  if (name == "cls") return HeadInputMode::kCls;
  if (name == "token_average") return HeadInputMode::kTokenAverage;
  return std::nullopt;
}

MultiHeadClassifier::MultiHeadClassifier(EncoderConfig config,
                                         Vocabulary vocab, std::uint64_t seed)
    : encoder_(std::move(config), std::move(vocab), seed) {
  const auto h = static_cast<Eigen::Index>(encoder_.config().hidden_size);
  for (const Condition c : all_conditions()) {
    const auto n = static_cast<Eigen::Index>(class_count(c));
    const std::string base =
        "head." + std::string(condition_name(c)) + ".";
    heads_[condition_index(c)].w = Tensor(base + "w", h, n);
    heads_[condition_index(c)].b = Tensor(base + "b", 1, n);
  }
}

MultiHeadClassifier::MultiHeadClassifier(const MultiHeadClassifier& other)
    : encoder_(other.encoder_),
      heads_(other.heads_),
      head_input_mode_(other.head_input_mode_),
      freeze_mode_(other.freeze_mode_) {}

MultiHeadClassifier::MultiHeadClassifier(MultiHeadClassifier&&) noexcept =
    default;
MultiHeadClassifier& MultiHeadClassifier::operator=(
    MultiHeadClassifier&&) noexcept = default;
MultiHeadClassifier::~MultiHeadClassifier() = default;

void MultiHeadClassifier::set_freeze_mode(FreezeMode m) {
  freeze_mode_ = m;
  encoder_.set_trainable(m == FreezeMode::kNone);
}

Eigen::RowVectorXd MultiHeadClassifier::pooled(const Eigen::MatrixXd& hidden,
                                               const TokenSequence& seq) const {
  if (head_input_mode_ == HeadInputMode::kCls) {
    return hidden.row(0);
  }
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(hidden.cols());
  double n = 0.0;
  for (Eigen::Index t = 0; t < hidden.rows(); ++t) {
    if (seq.mask[t]) {
      sum += hidden.row(t);
      n += 1.0;
    }
  }
  return sum / n;
}

LogitBlocks MultiHeadClassifier::forward(
    const std::vector<TokenSequence>& batch, int n_threads) const {
  if (batch.empty()) throw ShapeError("empty batch");
  const auto b = static_cast<Eigen::Index>(batch.size());
  LogitBlocks out;
  for (const Condition c : all_conditions()) {
    out.blocks[condition_index(c)] =
        Eigen::MatrixXd::Zero(b, class_count(c));
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(
      static_cast<int>(b), effective_threads(n_threads, batch.size()),
      [&](int i) {
        try {
          const Eigen::MatrixXd hidden = encoder_.forward(batch[i]);
          const Eigen::RowVectorXd h = pooled(hidden, batch[i]);
          for (std::size_t ci = 0; ci < kNumConditions; ++ci) {
            out.blocks[ci].row(i) =
                h * heads_[ci].w.value + heads_[ci].b.value.row(0);
          }
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<LabelVector> MultiHeadClassifier::predict(
    const std::vector<TokenSequence>& batch, int n_threads) const {
  return predict_from_logits(forward(batch, n_threads));
}

namespace {

// log(sum(exp(row))) with the usual max shift.
double log_sum_exp(const Eigen::RowVectorXd& row) {
  const double m = row.maxCoeff();
  return m + std::log((row.array() - m).exp().sum());
}

void check_gold(const std::vector<TokenSequence>& batch,
                const std::vector<LabelVector>& gold) {
  if (batch.size() != gold.size()) {
    throw ShapeError("batch and gold labels differ in length");
  }
  for (const auto& g : gold) validate(g);
}

}  // namespace

double MultiHeadClassifier::loss(const std::vector<TokenSequence>& batch,
                                 const std::vector<LabelVector>& gold) const {
  check_gold(batch, gold);
  const LogitBlocks logits = forward(batch);
  const double b = static_cast<double>(batch.size());
  double total = 0.0;
  for (const Condition c : all_conditions()) {
    const auto& block = logits.blocks[condition_index(c)];
    double head_sum = 0.0;
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      const int y = static_cast<int>(gold[i].at(c));
      head_sum += log_sum_exp(block.row(i)) - block(i, y);
    }
    total += head_sum / b;
  }
  return total;
}

double MultiHeadClassifier::item_loss_and_grads(const TokenSequence& seq,
                                                const LabelVector& gold,
                                                double inv_batch) {
  const bool train_encoder = freeze_mode_ == FreezeMode::kNone;
  EncoderCache cache;
  const Eigen::MatrixXd hidden =
      train_encoder ? encoder_.forward(seq, &cache) : encoder_.forward(seq);
  const Eigen::RowVectorXd h = pooled(hidden, seq);

  double item_loss = 0.0;
  Eigen::RowVectorXd dh = Eigen::RowVectorXd::Zero(h.cols());
  for (const Condition c : all_conditions()) {
    auto& head = heads_[condition_index(c)];
    const Eigen::RowVectorXd logits = h * head.w.value + head.b.value.row(0);
    const int y = static_cast<int>(gold.at(c));
    const double lse = log_sum_exp(logits);
    item_loss += (lse - logits(y)) * inv_batch;

    Eigen::RowVectorXd dlogits = (logits.array() - lse).exp();
    dlogits(y) -= 1.0;
    dlogits *= inv_batch;

    head.w.grad += h.transpose() * dlogits;
    head.b.grad.row(0) += dlogits;
    dh += dlogits * head.w.value.transpose();
  }

  if (train_encoder) {
    Eigen::MatrixXd d_hidden =
        Eigen::MatrixXd::Zero(hidden.rows(), hidden.cols());
    if (head_input_mode_ == HeadInputMode::kCls) {
      d_hidden.row(0) = dh;
    } else {
      double n = 0.0;
      for (Eigen::Index t = 0; t < hidden.rows(); ++t) {
        if (seq.mask[t]) n += 1.0;
      }
      for (Eigen::Index t = 0; t < hidden.rows(); ++t) {
        if (seq.mask[t]) d_hidden.row(t) = dh / n;
      }
    }
    encoder_.backward(seq, cache, d_hidden);
  }
  return item_loss;
}

void MultiHeadClassifier::ensure_lanes() {
  if (lanes_) return;
  lanes_ = std::make_unique<Lanes>();
  lanes_->models.reserve(kGradLanes);
  for (int l = 0; l < kGradLanes; ++l) {
    lanes_->models.push_back(*this);
  }
}

double MultiHeadClassifier::loss_and_gradients(
    const std::vector<TokenSequence>& batch,
    const std::vector<LabelVector>& gold, int n_threads) {
  check_gold(batch, gold);
  if (batch.empty()) throw ShapeError("empty batch");
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const int workers = effective_threads(n_threads, batch.size());

  if (workers <= 1) {
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      total += item_loss_and_grads(batch[i], gold[i], inv_batch);
    }
    return total;
  }

  // Lane decomposition: chunking depends only on the batch size, and lane
  // results merge in lane order, so any worker count gives the same bits.
  ensure_lanes();
  const std::size_t chunk =
      (batch.size() + kGradLanes - 1) / kGradLanes;
  const int used =
      static_cast<int>((batch.size() + chunk - 1) / chunk);

  const auto main_params = parameters();
  std::array<double, kGradLanes> lane_loss{};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(used, workers, [&](int l) {
    try {
      MultiHeadClassifier& lane = lanes_->models[l];
      lane.head_input_mode_ = head_input_mode_;
      if (lane.freeze_mode_ != freeze_mode_) lane.set_freeze_mode(freeze_mode_);
      const auto lane_params = lane.parameters();
      for (std::size_t p = 0; p < main_params.size(); ++p) {
        lane_params[p]->value = main_params[p]->value;
        lane_params[p]->grad.setZero();
      }
      const std::size_t begin = static_cast<std::size_t>(l) * chunk;
      const std::size_t end = std::min(begin + chunk, batch.size());
      double partial = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        partial += lane.item_loss_and_grads(batch[i], gold[i], inv_batch);
      }
      lane_loss[l] = partial;
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);

  double total = 0.0;
  for (int l = 0; l < used; ++l) {
    total += lane_loss[l];
    const auto lane_params = lanes_->models[l].parameters();
    for (std::size_t p = 0; p < main_params.size(); ++p) {
      if (main_params[p]->trainable) {
        main_params[p]->grad += lane_params[p]->grad;
      }
    }
  }
  return total;
}

std::vector<Tensor*> MultiHeadClassifier::parameters() {
  std::vector<Tensor*> out = encoder_.parameters();
  for (auto& head : heads_) {
    out.push_back(&head.w);
    out.push_back(&head.b);
  }
  return out;
}

std::vector<const Tensor*> MultiHeadClassifier::parameters() const {
  auto mutable_params = const_cast<MultiHeadClassifier*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::vector<Tensor*> MultiHeadClassifier::trainable_parameters() {
  std::vector<Tensor*> out;
  for (Tensor* t : parameters()) {
    if (t->trainable) out.push_back(t);
  }
  return out;
}

std::vector<Tensor*> MultiHeadClassifier::head_parameters() {
  std::vector<Tensor*> out;
  for (auto& head : heads_) {
    out.push_back(&head.w);
    out.push_back(&head.b);
  }
  return out;
}

void MultiHeadClassifier::zero_grads() {
  for (Tensor* t : parameters()) t->zero_grad();
}

std::int64_t MultiHeadClassifier::head_parameter_count(int hidden_size) {
  const std::int64_t h = hidden_size;
  return 13 * (4 * h + 4) + (2 * h + 2);
}

std::vector<LabelVector> predict_from_logits(const LogitBlocks& logits) {
  const Eigen::Index b = logits.batch_size();
  std::vector<LabelVector> out(static_cast<std::size_t>(b));
  for (Eigen::Index i = 0; i < b; ++i) {
    for (const Condition c : all_conditions()) {
      const auto& block = logits.blocks[condition_index(c)];
      int best = 0;
      for (Eigen::Index k = 1; k < block.cols(); ++k) {
        if (block(i, k) > block(i, best)) best = static_cast<int>(k);
      }
      out[i].set(c, static_cast<LabelClass>(best));
    }
  }
  return out;
}

bool same_weights(const MultiHeadClassifier& a, const MultiHeadClassifier& b) {
  const auto pa = a.parameters();
  const auto pb = b.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i]->name != pb[i]->name) return false;
    if (pa[i]->value.rows() != pb[i]->value.rows() ||
        pa[i]->value.cols() != pb[i]->value.cols()) {
      return false;
    }
    if (pa[i]->value != pb[i]->value) return false;
  }
  return true;
}

}  // namespace radlabel
