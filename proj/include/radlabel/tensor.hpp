#ifndef RADLABEL_TENSOR_HPP
#define RADLABEL_TENSOR_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>

namespace radlabel {

// Named parameter matrix with its gradient accumulator. Vectors are stored
// as 1xN matrices.
struct Tensor {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;
  bool trainable = true;

  Tensor() = default;
  Tensor(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)),
        value(Eigen::MatrixXd::Zero(rows, cols)),
        grad(Eigen::MatrixXd::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
};

}  // namespace radlabel

#endif  // RADLABEL_TENSOR_HPP
