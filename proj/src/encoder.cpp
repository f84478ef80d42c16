#include "radlabel/encoder.hpp"

#include <cmath>

#include "radlabel/errors.hpp"
#include "radlabel/rng.hpp"

namespace radlabel {

namespace {

constexpr double kLayerNormEps = 1e-12;

Eigen::MatrixXd layer_norm_forward(const Eigen::MatrixXd& x,
                                   const Tensor& gamma, const Tensor& beta,
                                   LayerNormCache* cache) {
  const Eigen::Index t = x.rows();
  const Eigen::Index h = x.cols();
  Eigen::MatrixXd xhat(t, h);
  Eigen::VectorXd inv_std(t);
  for (Eigen::Index i = 0; i < t; ++i) {
    const double mu = x.row(i).mean();
    const double var = (x.row(i).array() - mu).square().mean();
    const double is = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(i) = (x.row(i).array() - mu) * is;
    inv_std(i) = is;
  }
  Eigen::MatrixXd y =
      (xhat.array().rowwise() * gamma.value.row(0).array()).rowwise() +
      beta.value.row(0).array();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

// Returns dX; accumulates dgamma/dbeta.
Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixXd& dy,
                                    const LayerNormCache& cache,
                                    Tensor& gamma, Tensor& beta) {
  const Eigen::Index t = dy.rows();
  const Eigen::Index h = dy.cols();
  gamma.grad.row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  beta.grad.row(0) += dy.colwise().sum();

  Eigen::MatrixXd dxhat =
      dy.array().rowwise() * gamma.value.row(0).array();
  Eigen::MatrixXd dx(t, h);
  for (Eigen::Index i = 0; i < t; ++i) {
    const double m1 = dxhat.row(i).mean();
    const double m2 =
        (dxhat.row(i).array() * cache.xhat.row(i).array()).mean();
    dx.row(i) = cache.inv_std(i) *
                (dxhat.row(i).array() - m1 - cache.xhat.row(i).array() * m2);
  }
  return dx;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

double gelu_grad(double x) {
  const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  const double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
  return cdf + x * phi;
}

// Row-wise softmax over valid key positions; invalid columns get 0.
Eigen::MatrixXd masked_softmax_rows(const Eigen::MatrixXd& scores,
                                    const std::vector<std::uint8_t>& mask) {
  const Eigen::Index t = scores.rows();
  const Eigen::Index n = scores.cols();
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(t, n);
  for (Eigen::Index i = 0; i < t; ++i) {
    double max_v = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (mask[j] && scores(i, j) > max_v) max_v = scores(i, j);
    }
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (mask[j]) {
        probs(i, j) = std::exp(scores(i, j) - max_v);
        sum += probs(i, j);
      }
    }
    probs.row(i) /= sum;
  }
  return probs;
}

}  // namespace

TransformerEncoder::TransformerEncoder(EncoderConfig config, Vocabulary vocab,
                                       std::uint64_t seed)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  if (config_.hidden_size <= 0 || config_.num_layers < 0 ||
      config_.num_heads <= 0 || config_.ff_size <= 0 ||
      config_.max_tokens <= 0) {
    throw ConfigError("encoder dimensions must be positive");
  }
  if (config_.hidden_size % config_.num_heads != 0) {
    throw ConfigError("hidden_size must be divisible by num_heads");
  }
  const auto h = static_cast<Eigen::Index>(config_.hidden_size);
  const auto f = static_cast<Eigen::Index>(config_.ff_size);
  const auto v = static_cast<Eigen::Index>(vocab_.size());

  word_emb_ = Tensor("embeddings.word", v, h);
  pos_emb_ = Tensor("embeddings.position", config_.max_tokens, h);
  ln_emb_gamma_ = Tensor("embeddings.ln.gamma", 1, h);
  ln_emb_beta_ = Tensor("embeddings.ln.beta", 1, h);
  layers_.resize(config_.num_layers);
  for (int l = 0; l < config_.num_layers; ++l) {
    const std::string p = "layer." + std::to_string(l) + ".";
    auto& lp = layers_[l];
    lp.wq = Tensor(p + "attn.wq", h, h);
    lp.bq = Tensor(p + "attn.bq", 1, h);
    lp.wk = Tensor(p + "attn.wk", h, h);
    lp.bk = Tensor(p + "attn.bk", 1, h);
    lp.wv = Tensor(p + "attn.wv", h, h);
    lp.bv = Tensor(p + "attn.bv", 1, h);
    lp.wo = Tensor(p + "attn.wo", h, h);
    lp.bo = Tensor(p + "attn.bo", 1, h);
    lp.ln1_gamma = Tensor(p + "ln1.gamma", 1, h);
    lp.ln1_beta = Tensor(p + "ln1.beta", 1, h);
    lp.w1 = Tensor(p + "ffn.w1", h, f);
    lp.b1 = Tensor(p + "ffn.b1", 1, f);
    lp.w2 = Tensor(p + "ffn.w2", f, h);
    lp.b2 = Tensor(p + "ffn.b2", 1, h);
    lp.ln2_gamma = Tensor(p + "ln2.gamma", 1, h);
    lp.ln2_beta = Tensor(p + "ln2.beta", 1, h);
  }

  Rng rng(seed);
  for (Tensor* t : parameters()) {
    if (t->name.ends_with("gamma")) {
      t->value.setOnes();
    } else if (t->value.rows() == 1) {  // biases and LN shifts
      t->value.setZero();
    } else {
      // Position embeddings at init_std; weight matrices fan-in scaled so
      // each transform has O(1) gain from a random start.
      const bool is_position = t->name == "embeddings.position";
      const double std =
          is_position ? config_.init_std
                      : 1.0 / std::sqrt(static_cast<double>(t->value.rows()));
      for (Eigen::Index r = 0; r < t->value.rows(); ++r) {
        for (Eigen::Index c = 0; c < t->value.cols(); ++c) {
          t->value(r, c) = std * rng.normal();
        }
      }
    }
  }
  // Word embeddings: Gaussian rows orthonormalized in chunks of H
  // (semi-orthogonal init), scaled to norm sqrt(H) so token identity
  // dominates the position term.
  {
    Eigen::MatrixXd& w = word_emb_.value;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = rng.normal();
      }
    }
    const Eigen::Index chunk = w.cols();
    for (Eigen::Index base = 0; base < w.rows(); base += chunk) {
      const Eigen::Index n = std::min(chunk, w.rows() - base);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
          w.row(base + i) -=
              w.row(base + i).dot(w.row(base + j)) * w.row(base + j);
        }
        const double norm = w.row(base + i).norm();
        w.row(base + i) /= std::max(norm, 1e-12);
      }
    }
    w *= std::sqrt(static_cast<double>(w.cols()));
  }
  // The padding embedding stays zero.
  word_emb_.value.row(Vocabulary::kPadId).setZero();
}

void TransformerEncoder::check_input(const TokenSequence& seq) const {
  if (seq.ids.empty()) throw ShapeError("empty token sequence");
  if (seq.mask.size() != seq.ids.size()) {
    throw ShapeError("token/mask length mismatch");
  }
  if (seq.ids.size() > static_cast<std::size_t>(config_.max_tokens)) {
    throw ShapeError("sequence of " + std::to_string(seq.ids.size()) +
                     " tokens exceeds max_tokens=" +
                     std::to_string(config_.max_tokens));
  }
  bool any_valid = false;
  for (std::size_t t = 0; t < seq.ids.size(); ++t) {
    if (seq.ids[t] < 0 ||
        seq.ids[t] >= static_cast<std::int32_t>(vocab_.size())) {
      throw ShapeError("token id " + std::to_string(seq.ids[t]) +
                       " outside vocabulary");
    }
    any_valid |= seq.mask[t] != 0;
  }
  if (!any_valid) throw ShapeError("sequence has no non-padding tokens");
}

Eigen::MatrixXd TransformerEncoder::forward(const TokenSequence& seq,
                                            EncoderCache* cache) const {
  check_input(seq);
  const auto t = static_cast<Eigen::Index>(seq.ids.size());
  const auto h = static_cast<Eigen::Index>(config_.hidden_size);
  const int n_heads = config_.num_heads;
  const Eigen::Index dk = h / n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  Eigen::MatrixXd x(t, h);
  for (Eigen::Index i = 0; i < t; ++i) {
    x.row(i) = word_emb_.value.row(seq.ids[i]) + pos_emb_.value.row(i);
  }
  x = layer_norm_forward(x, ln_emb_gamma_, ln_emb_beta_,
                         cache ? &cache->ln_emb : nullptr);
  if (cache) cache->layers.resize(layers_.size());

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& lp = layers_[l];
    LayerCache* lc = cache ? &cache->layers[l] : nullptr;
    if (lc) lc->x = x;

    Eigen::MatrixXd q = (x * lp.wq.value).rowwise() + lp.bq.value.row(0);
    Eigen::MatrixXd k = (x * lp.wk.value).rowwise() + lp.bk.value.row(0);
    Eigen::MatrixXd v = (x * lp.wv.value).rowwise() + lp.bv.value.row(0);

    Eigen::MatrixXd context(t, h);
    std::vector<Eigen::MatrixXd> attn(n_heads);
    for (int hd = 0; hd < n_heads; ++hd) {
      const auto qh = q.middleCols(hd * dk, dk);
      const auto kh = k.middleCols(hd * dk, dk);
      const auto vh = v.middleCols(hd * dk, dk);
      Eigen::MatrixXd scores = qh * kh.transpose() * scale;
      attn[hd] = masked_softmax_rows(scores, seq.mask);
      context.middleCols(hd * dk, dk) = attn[hd] * vh;
    }
    Eigen::MatrixXd attn_out =
        (context * lp.wo.value).rowwise() + lp.bo.value.row(0);

    Eigen::MatrixXd y1 = layer_norm_forward(x + attn_out, lp.ln1_gamma,
                                            lp.ln1_beta, lc ? &lc->ln1 : nullptr);

    Eigen::MatrixXd f1 = (y1 * lp.w1.value).rowwise() + lp.b1.value.row(0);
    Eigen::MatrixXd g = f1.unaryExpr([](double a) { return gelu(a); });
    Eigen::MatrixXd f2 = (g * lp.w2.value).rowwise() + lp.b2.value.row(0);

    x = layer_norm_forward(y1 + f2, lp.ln2_gamma, lp.ln2_beta,
                           lc ? &lc->ln2 : nullptr);
    if (lc) {
      lc->q = std::move(q);
      lc->k = std::move(k);
      lc->v = std::move(v);
      lc->attn = std::move(attn);
      lc->context = std::move(context);
      lc->y1 = std::move(y1);
      lc->f1 = std::move(f1);
      lc->g = std::move(g);
    }
  }
  if (cache) cache->out = x;
  return x;
}

void TransformerEncoder::backward(const TokenSequence& seq,
                                  const EncoderCache& cache,
                                  const Eigen::MatrixXd& d_out) {
  const auto t = static_cast<Eigen::Index>(seq.ids.size());
  const auto h = static_cast<Eigen::Index>(config_.hidden_size);
  const int n_heads = config_.num_heads;
  const Eigen::Index dk = h / n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  if (d_out.rows() != t || d_out.cols() != h) {
    throw ShapeError("d_out shape does not match sequence");
  }

  Eigen::MatrixXd dx = d_out;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    auto& lp = layers_[li];
    const auto& lc = cache.layers[li];

    // LN2
    Eigen::MatrixXd dz2 =
        layer_norm_backward(dx, lc.ln2, lp.ln2_gamma, lp.ln2_beta);

    // FFN
    Eigen::MatrixXd dy1 = dz2;
    lp.w2.grad += lc.g.transpose() * dz2;
    lp.b2.grad.row(0) += dz2.colwise().sum();
    Eigen::MatrixXd dg = dz2 * lp.w2.value.transpose();
    Eigen::MatrixXd df1 =
        dg.array() * lc.f1.unaryExpr([](double a) { return gelu_grad(a); })
                         .array();
    lp.w1.grad += lc.y1.transpose() * df1;
    lp.b1.grad.row(0) += df1.colwise().sum();
    dy1 += df1 * lp.w1.value.transpose();

    // LN1
    Eigen::MatrixXd dz1 =
        layer_norm_backward(dy1, lc.ln1, lp.ln1_gamma, lp.ln1_beta);

    // output projection
    Eigen::MatrixXd dlayer_x = dz1;
    lp.wo.grad += lc.context.transpose() * dz1;
    lp.bo.grad.row(0) += dz1.colwise().sum();
    Eigen::MatrixXd dcontext = dz1 * lp.wo.value.transpose();

    // attention heads
    Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(t, h);
    Eigen::MatrixXd dkm = Eigen::MatrixXd::Zero(t, h);
    Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(t, h);
    for (int hd = 0; hd < n_heads; ++hd) {
      const auto qh = lc.q.middleCols(hd * dk, dk);
      const auto kh = lc.k.middleCols(hd * dk, dk);
      const auto vh = lc.v.middleCols(hd * dk, dk);
      const Eigen::MatrixXd& a = lc.attn[hd];
      const auto dch = dcontext.middleCols(hd * dk, dk);

      Eigen::MatrixXd da = dch * vh.transpose();
      dv.middleCols(hd * dk, dk) = a.transpose() * dch;

      Eigen::MatrixXd ds(t, t);
      for (Eigen::Index i = 0; i < t; ++i) {
        const double dot = da.row(i).dot(a.row(i));
        ds.row(i) = a.row(i).array() * (da.row(i).array() - dot);
      }
      dq.middleCols(hd * dk, dk) = ds * kh * scale;
      dkm.middleCols(hd * dk, dk) = ds.transpose() * qh * scale;
    }

    lp.wq.grad += lc.x.transpose() * dq;
    lp.bq.grad.row(0) += dq.colwise().sum();
    lp.wk.grad += lc.x.transpose() * dkm;
    lp.bk.grad.row(0) += dkm.colwise().sum();
    lp.wv.grad += lc.x.transpose() * dv;
    lp.bv.grad.row(0) += dv.colwise().sum();
    dlayer_x += dq * lp.wq.value.transpose() + dkm * lp.wk.value.transpose() +
                dv * lp.wv.value.transpose();
    dx = std::move(dlayer_x);
  }

  Eigen::MatrixXd demb =
      layer_norm_backward(dx, cache.ln_emb, ln_emb_gamma_, ln_emb_beta_);
  for (Eigen::Index i = 0; i < t; ++i) {
    word_emb_.grad.row(seq.ids[i]) += demb.row(i);
    pos_emb_.grad.row(i) += demb.row(i);
  }
}

std::vector<Tensor*> TransformerEncoder::parameters() {
  std::vector<Tensor*> out = {&word_emb_, &pos_emb_, &ln_emb_gamma_,
                              &ln_emb_beta_};
  for (auto& lp : layers_) {
    for (Tensor* t : {&lp.wq, &lp.bq, &lp.wk, &lp.bk, &lp.wv, &lp.bv, &lp.wo,
                      &lp.bo, &lp.ln1_gamma, &lp.ln1_beta, &lp.w1, &lp.b1,
                      &lp.w2, &lp.b2, &lp.ln2_gamma, &lp.ln2_beta}) {
      out.push_back(t);
    }
  }
  return out;
}

std::vector<const Tensor*> TransformerEncoder::parameters() const {
  auto mutable_params = const_cast<TransformerEncoder*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

void TransformerEncoder::set_trainable(bool trainable) {
  for (Tensor* t : parameters()) t->trainable = trainable;
}

}  // namespace radlabel
