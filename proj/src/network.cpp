#include "sqcsef/network.hpp"

#include <cmath>

#include "sqcsef/error.hpp"

namespace sqcsef::nn {

Mlp::Mlp(const std::vector<int>& widths, Activation hidden, Rng& rng) {
  if (widths.size() < 2) throw ConfigError("a network needs at least an input and an output width");
  for (int w : widths) {
    if (w < 1) throw ConfigError("layer widths must be positive");
  }
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Dense d;
    const int fan_in = widths[l];
    const double limit = std::sqrt(6.0 / fan_in);
    d.weight.resize(fan_in, widths[l + 1]);
    // Fill row-major so the draw order does not depend on storage order.
    for (Eigen::Index i = 0; i < d.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < d.weight.cols(); ++j) d.weight(i, j) = rng.uniform(-limit, limit);
    }
    d.bias = Eigen::MatrixXd::Zero(1, widths[l + 1]);
    d.activation = l + 2 == widths.size() ? Activation::linear : hidden;
    layers_.push_back(std::move(d));
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Trace* trace) const {
  if (trace != nullptr) {
    trace->inputs.clear();
    trace->pre.clear();
  }
  Eigen::MatrixXd a = x;
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = a * layer.weight;
    z.rowwise() += layer.bias.row(0);
    if (trace != nullptr) {
      trace->inputs.push_back(a);
      trace->pre.push_back(z);
    }
    a = layer.activation == Activation::relu ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

Eigen::MatrixXd Mlp::backward(const Trace& trace, const Eigen::MatrixXd& grad_out,
                              std::vector<Eigen::MatrixXd*> grads) const {
  Eigen::MatrixXd g = grad_out;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& layer = layers_[l];
    if (layer.activation == Activation::relu) g = g.cwiseProduct((trace.pre[l].array() > 0.0).cast<double>().matrix());
    *grads[2 * l] += trace.inputs[l].transpose() * g;
    *grads[2 * l + 1] += g.colwise().sum();
    g = g * layer.weight.transpose();
  }
  return g;
}

std::vector<Eigen::MatrixXd*> Mlp::parameters() {
  std::vector<Eigen::MatrixXd*> out;
  for (auto& l : layers_) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Eigen::MatrixXd*> Mlp::parameters() const {
  std::vector<const Eigen::MatrixXd*> out;
  for (const auto& l : layers_) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<int> Mlp::widths() const {
  std::vector<int> w;
  if (layers_.empty()) return w;
  w.push_back(static_cast<int>(layers_.front().weight.rows()));
  for (const auto& l : layers_) w.push_back(static_cast<int>(l.weight.cols()));
  return w;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(i).array() - top).exp().matrix();
    p.row(i) = e / e.sum();
  }
  return p;
}

Eigen::MatrixXd softmax_rows_backward(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& grad_probs) {
  const Eigen::VectorXd dot = probs.cwiseProduct(grad_probs).rowwise().sum();
  Eigen::MatrixXd centered = grad_probs;
  centered.colwise() -= dot;
  return probs.cwiseProduct(centered);
}

Adam::Adam(const std::vector<Eigen::MatrixXd*>& params, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto* p : params) {
    m_.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
    v_.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
  }
}

void Adam::step(const std::vector<Eigen::MatrixXd*>& params, const std::vector<Eigen::MatrixXd>& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseProduct(grads[i]);
    const Eigen::ArrayXXd m_hat = m_[i].array() / c1;
    const Eigen::ArrayXXd v_hat = v_[i].array() / c2;
    params[i]->array() -= lr_ * m_hat / (v_hat.sqrt() + eps_);
  }
}

}  // namespace sqcsef::nn
