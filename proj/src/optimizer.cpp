#include "radlabel/optimizer.hpp"

#include <cmath>

namespace radlabel {

AdamOptimizer::AdamOptimizer(std::vector<Tensor*> params, double learning_rate,
                             double beta1, double beta2, double eps)
    : params_(std::move(params)),
      lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {
  reset();
}

void AdamOptimizer::reset() {
  t_ = 0;
  moments_.clear();
  moments_.reserve(params_.size());
  for (const Tensor* p : params_) {
    moments_.push_back({Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()),
                        Eigen::MatrixXd::Zero(p->value.rows(),
                                              p->value.cols())});
  }
}

void AdamOptimizer::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor* p = params_[i];
    if (!p->trainable) continue;
    auto& mom = moments_[i];
    mom.m = beta1_ * mom.m + (1.0 - beta1_) * p->grad;
    mom.v = beta2_ * mom.v.array() +
            (1.0 - beta2_) * p->grad.array().square();
    p->value.array() -=
        lr_ * (mom.m.array() / bc1) /
        ((mom.v.array() / bc2).sqrt() + eps_);
  }
}

}  // namespace radlabel
