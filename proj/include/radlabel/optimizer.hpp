#ifndef RADLABEL_OPTIMIZER_HPP
#define RADLABEL_OPTIMIZER_HPP

#include <cstdint>
#include <vector>

#include "radlabel/tensor.hpp"

namespace radlabel {

// Adam with bias correction; no weight decay, no schedule.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(std::vector<Tensor*> params, double learning_rate,
                         double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);

  // Applies one update from the accumulated gradients of trainable tensors.
  void step();

  // Drops all moment estimates and the step counter.
  void reset();

  std::int64_t step_count() const { return t_; }

 private:
  struct Moments {
    Eigen::MatrixXd m, v;
  };

  std::vector<Tensor*> params_;
  std::vector<Moments> moments_;
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
};

}  // namespace radlabel

#endif  // RADLABEL_OPTIMIZER_HPP
