#include "ecodrive/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace ecodrive::nn {
namespace {

void apply_activation(Activation a, Eigen::MatrixXd& x) {
  switch (a) {
    case Activation::kElu:
      x = (x.array().max(0.0) + (x.array().min(0.0).exp() - 1.0)).matrix();
      break;
    case Activation::kTanh:
      x = x.array().tanh().matrix();
      break;
    case Activation::kRelu:
      x = x.cwiseMax(0.0);
      break;
    case Activation::kIdentity:
      break;
  }
}

// Elementwise derivative evaluated at the pre-activation.
Eigen::MatrixXd activation_derivative(Activation a, const Eigen::MatrixXd& pre) {
  switch (a) {
    case Activation::kElu:
      return pre.array().min(0.0).exp().matrix();
    case Activation::kTanh:
      return (1.0 - pre.array().tanh().square()).matrix();
    case Activation::kRelu:
      return pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::kIdentity:
      break;
  }
  return Eigen::MatrixXd::Ones(pre.rows(), pre.cols());
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "elu") return Activation::kElu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "identity") return Activation::kIdentity;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kElu: return "elu";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kIdentity: return "identity";
  }
  return "?";
}

Mlp::Mlp(std::vector<int> widths, Activation hidden) : widths_(std::move(widths)), hidden_(hidden) {
  if (widths_.size() < 2) throw std::invalid_argument("Mlp: need input and output widths");
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    if (widths_[l] <= 0 || widths_[l + 1] <= 0) throw std::invalid_argument("Mlp: widths must be positive");
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(widths_[l + 1]) * (widths_[l] + 1);
  }
  params_ = Eigen::VectorXd::Zero(total);
}

void Mlp::initialize(std::mt19937_64& rng, double output_scale) {
  for (int l = 0; l < num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const double scale = (l == num_layers() - 1) ? output_scale : 1.0;
    auto w = weight(l);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = scale * dist(rng);
    auto b = bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = scale * dist(rng);
  }
}

Eigen::Map<Eigen::MatrixXd> Mlp::weight(int layer) {
  return {params_.data() + offset(layer), widths_[layer + 1], widths_[layer]};
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int layer) const {
  return {params_.data() + offset(layer), widths_[layer + 1], widths_[layer]};
}

Eigen::Map<Eigen::VectorXd> Mlp::bias(int layer) {
  return {params_.data() + offset(layer) + static_cast<Eigen::Index>(widths_[layer + 1]) * widths_[layer],
          widths_[layer + 1]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int layer) const {
  return {params_.data() + offset(layer) + static_cast<Eigen::Index>(widths_[layer + 1]) * widths_[layer],
          widths_[layer + 1]};
}

Eigen::MatrixXd Mlp::forward(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  if (inputs.rows() != input_size()) throw std::invalid_argument("Mlp::forward: input size mismatch");
  Eigen::MatrixXd x = inputs;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * x;
    z.colwise() += bias(l);
    if (l + 1 < num_layers()) apply_activation(hidden_, z);
    x = std::move(z);
  }
  return x;
}

Eigen::MatrixXd Mlp::forward(const Eigen::Ref<const Eigen::MatrixXd>& inputs, MlpTape& tape) const {
  if (inputs.rows() != input_size()) throw std::invalid_argument("Mlp::forward: input size mismatch");
  tape.inputs.assign(num_layers(), {});
  tape.preactivations.assign(num_layers(), {});
  Eigen::MatrixXd x = inputs;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * x;
    z.colwise() += bias(l);
    tape.inputs[l] = std::move(x);
    tape.preactivations[l] = z;
    if (l + 1 < num_layers()) apply_activation(hidden_, z);
    x = std::move(z);
  }
  return x;
}

Eigen::VectorXd Mlp::backward(const MlpTape& tape, const Eigen::Ref<const Eigen::MatrixXd>& output_grad,
                              Eigen::MatrixXd* input_grad) const {
  if (static_cast<int>(tape.inputs.size()) != num_layers()) throw std::invalid_argument("Mlp::backward: empty tape");
  if (output_grad.rows() != output_size() || output_grad.cols() != tape.inputs.front().cols()) {
    throw std::invalid_argument("Mlp::backward: output gradient shape mismatch");
  }
  Eigen::VectorXd grads = Eigen::VectorXd::Zero(num_params());
  Eigen::MatrixXd delta = output_grad;
  for (int l = num_layers() - 1; l >= 0; --l) {
    const Eigen::Index w_size = static_cast<Eigen::Index>(widths_[l + 1]) * widths_[l];
    Eigen::Map<Eigen::MatrixXd> gw(grads.data() + offset(l), widths_[l + 1], widths_[l]);
    Eigen::Map<Eigen::VectorXd> gb(grads.data() + offset(l) + w_size, widths_[l + 1]);
    gw.noalias() = delta * tape.inputs[l].transpose();
    gb = delta.rowwise().sum();
    if (l > 0 || input_grad != nullptr) {
      Eigen::MatrixXd upstream = weight(l).transpose() * delta;
      if (l > 0) {
        delta = upstream.cwiseProduct(activation_derivative(hidden_, tape.preactivations[l - 1]));
      } else {
        *input_grad = std::move(upstream);
      }
    }
  }
  return grads;
}

bool Mlp::operator==(const Mlp& other) const {
  return widths_ == other.widths_ && hidden_ == other.hidden_ && params_.size() == other.params_.size() &&
         params_ == other.params_;
}

}  // namespace ecodrive::nn
