#include <catch2/catch_amalgamated.hpp>

#include "robustagg/mlp.hpp"
#include "robustagg/stats.hpp"

#include <cmath>
#include <vector>

using namespace robustagg;

namespace {

// Flattened view over all parameters, used by the finite-difference oracle.
std::vector<double*> parameter_pointers(Mlp& net) {
  std::vector<double*> ptrs;
  for (auto& l : net.layers()) {
    for (Eigen::Index i = 0; i < l.w.size(); ++i) ptrs.push_back(l.w.data() + i);
    for (Eigen::Index i = 0; i < l.b.size(); ++i) ptrs.push_back(l.b.data() + i);
  }
  return ptrs;
}

std::vector<double> gradient_values(const MlpGrad& g) {
  std::vector<double> out;
  for (const auto& l : g.layers) {
    for (Eigen::Index i = 0; i < l.w.size(); ++i) out.push_back(l.w.data()[i]);
    for (Eigen::Index i = 0; i < l.b.size(); ++i) out.push_back(l.b.data()[i]);
  }
  return out;
}

double weighted_output(const Mlp& net, const Matrix& x, const Vector& w) {
  return net.forward(x).dot(w);
}

}  // namespace

TEST_CASE("zero network outputs its output bias", "[mlp]") {
  Mlp net({2, 8, 3});
  net.layers().back().b(0) = -1.75;
  Matrix x = Matrix::Random(2, 5);
  Vector out = net.forward(x);
  for (Eigen::Index i = 0; i < 5; ++i) REQUIRE(out(i) == -1.75);
}

TEST_CASE("hand-built pass-through reproduces a linear functional on x >= 0", "[mlp]") {
  // Embed the identity in the first layer; since all activations stay
  // nonnegative for x >= 0 the ReLUs are transparent, and the output layer
  // applies the desired coefficients.
  Mlp net({2, 8, 3});
  auto& layers = net.layers();
  layers[0].w(0, 0) = 1.0;
  layers[0].w(1, 1) = 1.0;
  for (std::size_t l = 1; l + 1 < layers.size(); ++l) {
    layers[l].w(0, 0) = 1.0;
    layers[l].w(1, 1) = 1.0;
  }
  layers.back().w(0, 0) = 3.0;
  layers.back().w(0, 1) = -2.0;
  layers.back().b(0) = 0.25;

  RandomSource rng(3);
  for (int k = 0; k < 50; ++k) {
    Matrix x(2, 1);
    x << rng.uniform() * 5.0, rng.uniform() * 5.0;
    double expect = 3.0 * x(0, 0) - 2.0 * x(1, 0) + 0.25;
    REQUIRE(net.forward(x)(0) == Catch::Approx(expect).margin(1e-12));
  }
}

TEST_CASE("identical rows give identical outputs", "[mlp]") {
  RandomSource rng(4);
  Mlp net = Mlp::he_init({3, 16, 3}, rng);
  Matrix x(3, 2);
  x.col(0) << 0.3, -0.1, 0.9;
  x.col(1) = x.col(0);
  Vector out = net.forward(x);
  REQUIRE(out(0) == out(1));
}

TEST_CASE("relu stack with zero biases is positively homogeneous", "[mlp][property]") {
  RandomSource rng(5);
  Mlp net = Mlp::he_init({2, 32, 3}, rng);
  Matrix x = Matrix::Random(2, 7);
  for (double t : {0.5, 2.0, 13.0}) {
    Vector a = net.forward(t * x);
    Vector b = net.forward(x);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      REQUIRE(a(i) == Catch::Approx(t * b(i)).margin(1e-10 * (1.0 + std::fabs(a(i)))));
  }
}

TEST_CASE("forward_batch matches forward and feeds backward", "[mlp]") {
  RandomSource rng(6);
  Mlp net = Mlp::he_init({2, 8, 3}, rng);
  Matrix x = Matrix::Random(2, 9);
  MlpWorkspace ws;
  Vector a = forward_batch(net, x, ws);
  Vector b = net.forward(x);
  REQUIRE((a - b).cwiseAbs().maxCoeff() == 0.0);

  MlpGrad g = net.zero_grad();
  REQUIRE_THROWS_AS(backward(net, ws, Vector::Ones(4), g), std::logic_error);  // batch mismatch
  backward(net, ws, Vector::Ones(9), g);
  REQUIRE_THROWS_AS(backward(net, ws, Vector::Ones(9), g), std::logic_error);  // consumed
}

TEST_CASE("constant loss has zero gradient", "[mlp]") {
  RandomSource rng(7);
  Mlp net = Mlp::he_init({2, 8, 3}, rng);
  Matrix x = Matrix::Random(2, 5);
  MlpWorkspace ws;
  forward_batch(net, x, ws);
  MlpGrad g = net.zero_grad();
  backward(net, ws, Vector::Zero(5), g);
  for (double v : gradient_values(g)) REQUIRE(v == 0.0);
}

TEST_CASE("single linear layer gradient has the closed form", "[mlp]") {
  // Squared loss on one sample through an identity-embedded net: the
  // gradient of (net(x) - y)^2 w.r.t. the output-layer weights is
  // 2 (net(x) - y) * activation.
  RandomSource rng(8);
  Mlp net = Mlp::he_init({1, 4, 3}, rng);
  Matrix x(1, 1);
  x << 0.7;
  double target = 0.2;
  MlpWorkspace ws;
  double pred = forward_batch(net, x, ws)(0);
  MlpGrad g = net.zero_grad();
  Vector og(1);
  og << 2.0 * (pred - target);
  backward(net, ws, og, g);

  Matrix top_act = x;
  const auto& layers = net.layers();
  for (std::size_t l = 0; l + 1 < layers.size(); ++l)
    top_act = ((layers[l].w * top_act).colwise() + layers[l].b).cwiseMax(0.0);
  for (Eigen::Index j = 0; j < top_act.rows(); ++j)
    REQUIRE(g.layers.back().w(0, j) ==
            Catch::Approx(2.0 * (pred - target) * top_act(j, 0)).margin(1e-12));
}

TEST_CASE("backward matches central finite differences", "[mlp][property]") {
  RandomSource rng(9);
  const double step = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    auto net_rng = rng.substream(static_cast<std::uint64_t>(trial));
    Mlp net = Mlp::he_init({2, 8, 3}, net_rng);
    auto data_rng = rng.substream(100 + static_cast<std::uint64_t>(trial));
    Matrix x(2, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = data_rng.normal();
    Vector w(4);
    for (Eigen::Index i = 0; i < 4; ++i) w(i) = data_rng.normal();

    MlpWorkspace ws;
    forward_batch(net, x, ws);
    MlpGrad g = net.zero_grad();
    backward(net, ws, w, g);
    auto grads = gradient_values(g);
    auto ptrs = parameter_pointers(net);
    REQUIRE(grads.size() == ptrs.size());

    double max_rel = 0.0;
    for (std::size_t p = 0; p < ptrs.size(); ++p) {
      double saved = *ptrs[p];
      *ptrs[p] = saved + step;
      double up = weighted_output(net, x, w);
      *ptrs[p] = saved - step;
      double dn = weighted_output(net, x, w);
      *ptrs[p] = saved;
      double fd = (up - dn) / (2.0 * step);
      double denom = std::max({std::fabs(fd), std::fabs(grads[p]), 1e-6});
      max_rel = std::max(max_rel, std::fabs(fd - grads[p]) / denom);
    }
    REQUIRE(max_rel < 1e-4);
  }
}

TEST_CASE("he initialization statistics and determinism", "[mlp]") {
  REQUIRE(default_hidden_dim(2) == 128);

  RandomSource a(10), b(10);
  Mlp na = Mlp::he_init({2, 128, 3}, a);
  Mlp nb = Mlp::he_init({2, 128, 3}, b);
  for (std::size_t l = 0; l < na.layers().size(); ++l) {
    REQUIRE(na.layers()[l].w == nb.layers()[l].w);
    REQUIRE(na.layers()[l].b.isZero());
  }

  // Empirical sd of a 128-fan-in layer: sqrt(2/128) within 5%.
  const auto& w1 = na.layers()[1].w;
  std::vector<double> vals(w1.data(), w1.data() + w1.size());
  REQUIRE(vals.size() == 128u * 128u);
  REQUIRE(sample_sd(vals) == Catch::Approx(std::sqrt(2.0 / 128.0)).epsilon(0.05));
}

TEST_CASE("shape errors", "[mlp]") {
  Mlp net({2, 8, 3});
  REQUIRE_THROWS_AS(net.forward(Matrix::Random(3, 4)), std::logic_error);
  REQUIRE_THROWS_AS(Mlp({0, 8, 3}), config_error);
}
