#pragma once

// Minimal dense network with hand-derived backpropagation. Batches are row
// matrices (one sample per row); a layer computes act(x W + b).

#include <Eigen/Dense>
#include <vector>

#include "sqcsef/rng.hpp"

namespace sqcsef::nn {

enum class Activation { linear, relu };

struct Dense {
  Eigen::MatrixXd weight;  ///< in x out
  Eigen::MatrixXd bias;    ///< 1 x out
  Activation activation = Activation::linear;
};

/// Forward intermediates needed by backward().
struct Trace {
  std::vector<Eigen::MatrixXd> inputs;  ///< input to each layer
  std::vector<Eigen::MatrixXd> pre;     ///< x W + b of each layer
};

class Mlp {
 public:
  Mlp() = default;
  /// `widths` = {in, h1, ..., out}; hidden layers use `hidden`, the last
  /// layer is linear. Weights ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), biases 0.
  Mlp(const std::vector<int>& widths, Activation hidden, Rng& rng);

  [[nodiscard]] Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Trace* trace = nullptr) const;

  /// Given dL/d(output), accumulates parameter gradients into `grads`
  /// (same layout as parameters()) and returns dL/d(input).
  Eigen::MatrixXd backward(const Trace& trace, const Eigen::MatrixXd& grad_out,
                           std::vector<Eigen::MatrixXd*> grads) const;

  /// weight0, bias0, weight1, bias1, ...
  std::vector<Eigen::MatrixXd*> parameters();
  std::vector<const Eigen::MatrixXd*> parameters() const;

  [[nodiscard]] std::vector<int> widths() const;
  [[nodiscard]] std::vector<Dense>& layers() { return layers_; }
  [[nodiscard]] const std::vector<Dense>& layers() const { return layers_; }

 private:
  std::vector<Dense> layers_;
};

/// Row-wise softmax, stabilized by subtracting the row maximum.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);
/// Backward pass of softmax_rows given its output and dL/d(output).
Eigen::MatrixXd softmax_rows_backward(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& grad_probs);

/// Adam with bias correction over a fixed list of tensors.
class Adam {
 public:
  Adam(const std::vector<Eigen::MatrixXd*>& params, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void step(const std::vector<Eigen::MatrixXd*>& params, const std::vector<Eigen::MatrixXd>& grads);
  [[nodiscard]] long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> m_, v_;
};

}  // namespace sqcsef::nn
