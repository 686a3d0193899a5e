#include <doctest.h>

#include <cmath>

#include "sqcsef/network.hpp"

using namespace sqcsef;
using namespace sqcsef::nn;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int r, int c) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-1, 1);
  }
  return m;
}

}  // namespace

TEST_CASE("shapes and initialization bounds") {
  Rng rng(1);
  Mlp net({3, 5, 4, 2}, Activation::relu, rng);
  CHECK(net.widths() == std::vector<int>{3, 5, 4, 2});
  CHECK(net.parameters().size() == 6);
  CHECK(net.layers().back().activation == Activation::linear);
  CHECK(net.layers().front().activation == Activation::relu);
  const double bound = std::sqrt(6.0 / 3.0);
  CHECK(net.layers()[0].weight.cwiseAbs().maxCoeff() <= bound);
  CHECK(net.layers()[0].bias.isZero());
  CHECK(net.forward(random_matrix(rng, 7, 3)).rows() == 7);
  CHECK(net.forward(random_matrix(rng, 7, 3)).cols() == 2);

  Rng a(9), b(9);
  Mlp n1({4, 3}, Activation::relu, a), n2({4, 3}, Activation::relu, b);
  CHECK(n1.layers()[0].weight == n2.layers()[0].weight);
}

TEST_CASE("backward matches central differences") {
  Rng rng(2);
  Mlp net({3, 6, 5, 2}, Activation::relu, rng);
  for (auto& l : net.layers()) l.bias = random_matrix(rng, 1, static_cast<int>(l.bias.cols())) * 0.1;
  const Eigen::MatrixXd x = random_matrix(rng, 8, 3);
  const Eigen::MatrixXd w = random_matrix(rng, 8, 2);
  const auto loss = [&](const Mlp& n, const Eigen::MatrixXd& in) { return (n.forward(in).array() * w.array()).sum(); };

  Trace trace;
  (void)net.forward(x, &trace);
  std::vector<Eigen::MatrixXd> grads;
  std::vector<Eigen::MatrixXd*> gp;
  for (auto* p : net.parameters()) grads.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
  for (auto& g : grads) gp.push_back(&g);
  const Eigen::MatrixXd dx = net.backward(trace, w, gp);

  const double h = 1e-6;
  auto params = net.parameters();
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (Eigen::Index i = 0; i < params[t]->size(); ++i) {
      const double keep = params[t]->data()[i];
      params[t]->data()[i] = keep + h;
      const double up = loss(net, x);
      params[t]->data()[i] = keep - h;
      const double down = loss(net, x);
      params[t]->data()[i] = keep;
      CHECK(grads[t].data()[i] == doctest::Approx((up - down) / (2 * h)).epsilon(1e-6));
    }
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::MatrixXd xp = x, xm = x;
    xp.data()[i] += h;
    xm.data()[i] -= h;
    CHECK(dx.data()[i] == doctest::Approx((loss(net, xp) - loss(net, xm)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("softmax rows") {
  Eigen::MatrixXd z(2, 3);
  z << 1000, 1000, 1000, 0, std::log(2.0), std::log(3.0);
  const auto p = softmax_rows(z);
  CHECK(p(0, 0) == doctest::Approx(1.0 / 3));
  CHECK(p(1, 2) == doctest::Approx(0.5));
  CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15);

  Rng rng(3);
  const Eigen::MatrixXd logits = random_matrix(rng, 4, 3);
  const Eigen::MatrixXd g = random_matrix(rng, 4, 3);
  const Eigen::MatrixXd analytic = softmax_rows_backward(softmax_rows(logits), g);
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    Eigen::MatrixXd up = logits, down = logits;
    up.data()[i] += 1e-6;
    down.data()[i] -= 1e-6;
    const double numeric = ((softmax_rows(up) - softmax_rows(down)).array() * g.array()).sum() / 2e-6;
    CHECK(analytic.data()[i] == doctest::Approx(numeric).epsilon(1e-6));
  }
}

TEST_CASE("adam minimizes a quadratic") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(2, 2, 5.0);
  std::vector<Eigen::MatrixXd*> params{&x};
  Adam opt(params, 0.1);
  for (int i = 0; i < 500; ++i) opt.step(params, {2 * x});
  CHECK(x.cwiseAbs().maxCoeff() < 1e-2);
  CHECK(opt.steps() == 500);
}

TEST_CASE("first adam step moves every entry by the learning rate") {
  Eigen::MatrixXd x(1, 3);
  x << 1, -2, 3;
  std::vector<Eigen::MatrixXd*> params{&x};
  Adam opt(params, 0.01);
  Eigen::MatrixXd g(1, 3);
  g << 0.5, -4, 1e-3;
  opt.step(params, {g});
  CHECK(x(0, 0) == doctest::Approx(0.99).epsilon(1e-6));
  CHECK(x(0, 1) == doctest::Approx(-1.99).epsilon(1e-6));
  CHECK(x(0, 2) == doctest::Approx(2.99).epsilon(1e-4));
}
