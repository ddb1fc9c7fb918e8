#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "ecodrive/nn/adam.hpp"
#include "ecodrive/nn/checkpoint.hpp"
#include "ecodrive/nn/mlp.hpp"

using namespace ecodrive::nn;

namespace {

// Straight-line evaluation of one sample, written independently of Mlp::forward.
Eigen::VectorXd reference_forward(const Mlp& net, const Eigen::VectorXd& input) {
  const auto& widths = net.widths();
  const double* p = net.params().data();
  std::vector<double> x(input.data(), input.data() + input.size());
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l], out = widths[l + 1];
    std::vector<double> y(out, 0.0);
    for (int i = 0; i < out; ++i) {
      double acc = p[in * out + i];  // bias follows the column-major weights
      for (int j = 0; j < in; ++j) acc += p[j * out + i] * x[j];
      if (l + 2 < widths.size()) {
        switch (net.activation()) {
          case Activation::kElu: acc = acc > 0 ? acc : std::expm1(acc); break;
          case Activation::kTanh: acc = std::tanh(acc); break;
          case Activation::kRelu: acc = acc > 0 ? acc : 0.0; break;
          case Activation::kIdentity: break;
        }
      }
      y[i] = acc;
    }
    p += static_cast<std::ptrdiff_t>(in) * out + out;
    x = std::move(y);
  }
  return Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

Mlp random_net(std::mt19937_64& rng, Activation act) {
  std::uniform_int_distribution<int> width(1, 7);
  std::uniform_int_distribution<int> depth(0, 3);
  std::vector<int> widths{width(rng)};
  for (int d = depth(rng); d > 0; --d) widths.push_back(width(rng));
  widths.push_back(width(rng));
  Mlp net(widths, act);
  net.initialize(rng, 1.0);
  return net;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

}  // namespace

TEST_CASE("forward: zero weights give the output bias, identity layer passes input through") {
  Mlp net({3, 4, 2});
  net.bias(1) << 0.5, -1.5;
  const Eigen::MatrixXd out = net.forward(Eigen::Vector3d(1.0, -2.0, 3.0));
  CHECK(out(0, 0) == 0.5);
  CHECK(out(1, 0) == -1.5);

  Mlp identity({3, 3});
  identity.weight(0).setIdentity();
  const Eigen::Vector3d x(0.25, -7.0, 3.5);
  CHECK(identity.forward(x).col(0) == x);

  CHECK_THROWS_AS(net.forward(Eigen::Vector2d(1.0, 2.0)), std::invalid_argument);
  CHECK_THROWS_AS(Mlp({3}), std::invalid_argument);
}

TEST_CASE("forward: batched output matches a straight-line reference") {
  std::mt19937_64 rng(1);
  for (Activation act : {Activation::kElu, Activation::kTanh, Activation::kRelu, Activation::kIdentity}) {
    for (int k = 0; k < 50; ++k) {
      const Mlp net = random_net(rng, act);
      const Eigen::MatrixXd x = random_matrix(net.input_size(), 5, rng);
      const Eigen::MatrixXd y = net.forward(x);
      MlpTape tape;
      const Eigen::MatrixXd y_taped = net.forward(x, tape);
      CHECK(y == y_taped);
      for (int c = 0; c < 5; ++c) {
        const Eigen::VectorXd ref = reference_forward(net, x.col(c));
        for (Eigen::Index i = 0; i < ref.size(); ++i) CHECK(y(i, c) == doctest::Approx(ref(i)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("backward: zero output gradient and one-neuron squared loss") {
  std::mt19937_64 rng(2);
  const Mlp net = random_net(rng, Activation::kElu);
  const Eigen::MatrixXd x = random_matrix(net.input_size(), 3, rng);
  MlpTape tape;
  net.forward(x, tape);
  CHECK(net.backward(tape, Eigen::MatrixXd::Zero(net.output_size(), 3)).isZero(0.0));

  Mlp neuron({2, 1});
  neuron.weight(0) << 0.3, -0.8;
  neuron.bias(0)(0) = 0.1;
  const Eigen::Vector2d in(1.5, 2.0);
  const double target = 0.7;
  const double pred = neuron.forward(in, tape)(0, 0);
  Eigen::MatrixXd g(1, 1);
  g(0, 0) = 2.0 * (pred - target);
  const Eigen::VectorXd grad = neuron.backward(tape, g);
  CHECK(grad(0) == doctest::Approx(2.0 * (pred - target) * 1.5));
  CHECK(grad(1) == doctest::Approx(2.0 * (pred - target) * 2.0));
  CHECK(grad(2) == doctest::Approx(2.0 * (pred - target)));

  CHECK_THROWS_AS(neuron.backward(tape, Eigen::MatrixXd::Zero(2, 1)), std::invalid_argument);
}

TEST_CASE("backward: parameter and input gradients match central finite differences") {
  std::mt19937_64 rng(3);
  const double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Activation act = (k % 2 == 0) ? Activation::kElu : Activation::kTanh;
    Mlp net = random_net(rng, act);
    const Eigen::MatrixXd x = random_matrix(net.input_size(), 3, rng);
    const Eigen::MatrixXd g = random_matrix(net.output_size(), 3, rng);
    auto loss = [&](const Mlp& n, const Eigen::MatrixXd& in) { return (n.forward(in).array() * g.array()).sum(); };

    MlpTape tape;
    net.forward(x, tape);
    Eigen::MatrixXd input_grad;
    const Eigen::VectorXd grad = net.backward(tape, g, &input_grad);

    for (Eigen::Index i = 0; i < net.num_params(); ++i) {
      const double saved = net.params()(i);
      net.params()(i) = saved + h;
      const double up = loss(net, x);
      net.params()(i) = saved - h;
      const double down = loss(net, x);
      net.params()(i) = saved;
      const double fd = (up - down) / (2.0 * h);
      const double rel = std::abs(fd - grad(i)) / std::max({std::abs(fd), std::abs(grad(i)), 1e-6});
      worst = std::max(worst, rel);
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::MatrixXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fd = (loss(net, xp) - loss(net, xm)) / (2.0 * h);
      const double rel = std::abs(fd - input_grad(i)) / std::max({std::abs(fd), std::abs(input_grad(i)), 1e-6});
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("initialize: fan-in bounds, output scale and seed determinism") {
  std::mt19937_64 a(4), b(4);
  Mlp n1({10, 32, 3}), n2({10, 32, 3});
  n1.initialize(a, 0.01);
  n2.initialize(b, 0.01);
  CHECK(n1 == n2);
  CHECK(n1.weight(0).cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(10.0));
  CHECK(n1.weight(1).cwiseAbs().maxCoeff() <= 0.01 / std::sqrt(32.0));
  CHECK(n1.weight(0).cwiseAbs().maxCoeff() > 0.5 / std::sqrt(10.0));
}

TEST_CASE("adam_step: zero gradient, first step and constant-gradient drift") {
  Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(4, -1.0, 1.0);
  const Eigen::VectorXd p0 = p;
  AdamState s(4, 1e-3);
  adam_step(p, Eigen::VectorXd::Zero(4), s);
  CHECK(p == p0);
  CHECK(s.step == 1);

  AdamState first(4, 1e-3);
  Eigen::VectorXd q = p0;
  const Eigen::Vector4d g(0.5, -2.0, 1e-3, -30.0);
  adam_step(q, g, first);
  for (int i = 0; i < 4; ++i) {
    // m_hat = g, v_hat = g^2 at t = 1.
    const double expected = -1e-3 * g(i) / (std::abs(g(i)) + 1e-8);
    CHECK(q(i) - p0(i) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(q(i) - p0(i) == doctest::Approx(-1e-3 * (g(i) > 0 ? 1.0 : -1.0)).epsilon(1e-4));
  }

  AdamState drift(1, 1e-3);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(1);
  double prev = 0.0;
  for (int t = 0; t < 1000; ++t) {
    adam_step(r, Eigen::VectorXd::Constant(1, 0.3), drift);
    CHECK(r(0) < prev);
    CHECK(prev - r(0) <= 1e-3 * (1 + 1e-9));
    prev = r(0);
  }
}

TEST_CASE("adam_step: non-finite gradient is rejected without side effects") {
  Eigen::VectorXd p = Eigen::VectorXd::Ones(3);
  AdamState s(3, 1e-3);
  Eigen::VectorXd g = Eigen::VectorXd::Ones(3);
  g(1) = std::nan("");
  try {
    adam_step(p, g, s);
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
  CHECK(p == Eigen::VectorXd::Ones(3));
  CHECK(s.step == 0);
  CHECK(first_non_finite(g) == 1);
  CHECK(first_non_finite(p) == -1);
}

TEST_CASE("snapshot: deep copy, idempotent, identical serialization") {
  std::mt19937_64 rng(6);
  Mlp net({4, 8, 2});
  net.initialize(rng);
  const Mlp snap = snapshot(net);
  const Eigen::MatrixXd x = random_matrix(4, 3, rng);
  const Eigen::MatrixXd before = snap.forward(x);
  net.params()(0) += 1.0;
  CHECK(snap.forward(x) == before);
  CHECK(snapshot(snapshot(snap)).forward(x) == snap.forward(x));
  CHECK(mlp_to_json(snapshot(snap)).dump() == mlp_to_json(snap).dump());
  CHECK(std::hash<std::string>{}(mlp_to_json(snapshot(snap)).dump()) == std::hash<std::string>{}(mlp_to_json(snap).dump()));
}

TEST_CASE("checkpoint: networks and optimizer state round-trip bit-exactly") {
  std::mt19937_64 rng(7);
  Mlp net({5, 16, 16, 3}, Activation::kTanh);
  net.initialize(rng, 0.3);
  net.params()(2) = 1e-300;
  net.params()(3) = -0.1;
  net.params()(4) = 1.0 / 3.0;
  AdamState opt(net.num_params(), 5e-5);
  Eigen::VectorXd p = net.params();
  adam_step(p, random_matrix(net.num_params(), 1, rng), opt);

  const auto dir = std::filesystem::temp_directory_path() / "ecodrive_nn_ckpt";
  Json j;
  j["net"] = mlp_to_json(net);
  j["opt"] = adam_to_json(opt);
  write_json_file(dir / "a.json", j);
  const Json back = read_json_file(dir / "a.json");
  const Mlp net2 = mlp_from_json(back.at("net"));
  const AdamState opt2 = adam_from_json(back.at("opt"));
  CHECK(net2 == net);
  CHECK(opt2 == opt);
  CHECK(net2.activation() == Activation::kTanh);

  Json broken = mlp_to_json(net);
  broken["params"].erase(0);
  CHECK_THROWS_AS(mlp_from_json(broken), CheckpointError);
  CHECK_THROWS_AS(read_json_file(dir / "missing.json"), CheckpointError);
}
