#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ecodrive::nn {

enum class Activation { kElu, kTanh, kRelu, kIdentity };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);

/// Per-layer values recorded by a forward pass and consumed by backward().
struct MlpTape {
  std::vector<Eigen::MatrixXd> inputs;       // input to each layer
  std::vector<Eigen::MatrixXd> preactivations;
};

/// Fully connected network with a shared hidden activation and a linear
/// output layer. Parameters live in one flat vector: for each layer the
/// weight matrix (out x in, column-major) followed by its bias.
///
/// Batches are column-major: one sample per column.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> widths, Activation hidden = Activation::kElu);

  /// Fan-in scaled uniform init, U(-1/sqrt(in), 1/sqrt(in)) for weights and
  /// biases. The output layer is additionally multiplied by `output_scale`.
  void initialize(std::mt19937_64& rng, double output_scale = 1.0);

  int input_size() const { return widths_.front(); }
  int output_size() const { return widths_.back(); }
  int num_layers() const { return static_cast<int>(widths_.size()) - 1; }
  const std::vector<int>& widths() const { return widths_; }
  Activation activation() const { return hidden_; }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }
  Eigen::Index num_params() const { return params_.size(); }

  Eigen::Map<Eigen::MatrixXd> weight(int layer);
  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<Eigen::VectorXd> bias(int layer);
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

  Eigen::MatrixXd forward(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const;
  Eigen::MatrixXd forward(const Eigen::Ref<const Eigen::MatrixXd>& inputs, MlpTape& tape) const;

  /// Reverse-mode gradient of sum_over_batch <output_grad, output> with
  /// respect to the parameters, for the batch recorded in `tape`.
  /// Optionally also returns the gradient with respect to the inputs.
  Eigen::VectorXd backward(const MlpTape& tape, const Eigen::Ref<const Eigen::MatrixXd>& output_grad,
                           Eigen::MatrixXd* input_grad = nullptr) const;

  bool operator==(const Mlp& other) const;

 private:
  Eigen::Index offset(int layer) const { return offsets_[layer]; }

  std::vector<int> widths_;
  std::vector<Eigen::Index> offsets_;
  Activation hidden_ = Activation::kElu;
  Eigen::VectorXd params_;
};

/// Deep copy used for target networks.
inline Mlp snapshot(const Mlp& net) { return net; }

}  // namespace ecodrive::nn
