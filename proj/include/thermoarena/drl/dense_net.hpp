#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "thermoarena/errors.hpp"

namespace thermoarena::drl {

/// Elementwise tanh through the vectorized exponential, 1 - 2 / (exp(2x) + 1).
/// Absolute error is a few ulp; std::tanh has no SIMD path for doubles.
template <typename Derived>
auto fast_tanh(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return Scalar(1) - Scalar(2) / ((Scalar(2) * x).exp() + Scalar(1));
}

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Fully connected network: tanh on hidden layers, linear output.
///
/// All weights and biases live in one flat parameter vector so optimizers and
/// target averaging operate on a single contiguous array. Layer l occupies
/// [W_l (out x in, column-major) | b_l (out)]. Batches are column-major: one
/// sample per column.
template <typename Scalar>
class DenseNet {
 public:
  using Vector = VectorX<Scalar>;
  using Matrix = MatrixX<Scalar>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;

  /// Activations of one forward pass; layer l input is `values[l]`.
  struct Tape {
    std::vector<Matrix> values;
  };

  DenseNet() = default;

  /// Zero-initialized network with the given layer widths (input first).
  explicit DenseNet(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw ShapeMismatch("a network needs at least input and output sizes");
    offsets_.push_back(0);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      if (sizes_[l] <= 0 || sizes_[l + 1] <= 0) throw ShapeMismatch("layer sizes must be positive");
      offsets_.push_back(offsets_.back() + static_cast<Eigen::Index>(sizes_[l] + 1) * sizes_[l + 1]);
    }
    params_ = Vector::Zero(offsets_.back());
  }

  /// Fan-in scaled uniform initialization, U(-1/sqrt(in), 1/sqrt(in)).
  template <typename Rng>
  static DenseNet random(std::vector<int> sizes, Rng& rng) {
    DenseNet net(std::move(sizes));
    for (int l = 0; l < net.num_layers(); ++l) {
      const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(net.sizes_[l]));
      std::uniform_real_distribution<Scalar> dist(-bound, bound);
      auto W = net.weight(l);
      for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = dist(rng);
      auto b = net.bias(l);
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = dist(rng);
    }
    return net;
  }

  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  Eigen::Index parameter_count() const { return params_.size(); }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  MatrixMap weight(int l) { return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]}; }
  ConstMatrixMap weight(int l) const { return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]}; }
  VectorMap bias(int l) { return {params_.data() + offsets_[l] + weight_count(l), sizes_[l + 1]}; }
  ConstVectorMap bias(int l) const { return {params_.data() + offsets_[l] + weight_count(l), sizes_[l + 1]}; }

  /// Batched forward pass. Records activations when `tape` is given.
  Matrix forward(const Eigen::Ref<const Matrix>& input, Tape* tape = nullptr) const {
    if (input.rows() != input_size())
      throw ShapeMismatch("network expects input of size " + std::to_string(input_size()) + ", got " +
                          std::to_string(input.rows()));
    Matrix x = input;
    if (tape) {
      tape->values.clear();
      tape->values.push_back(x);
    }
    for (int l = 0; l < num_layers(); ++l) {
      Matrix z(sizes_[l + 1], x.cols());
      z.noalias() = weight(l) * x;
      z.colwise() += bias(l);
      if (l + 1 < num_layers()) z = fast_tanh(z.array()).matrix();
      x = std::move(z);
      if (tape) tape->values.push_back(x);
    }
    return x;
  }

  Vector forward_one(const Eigen::Ref<const Vector>& input) const {
    return forward(Eigen::Map<const Matrix>(input.data(), input.size(), 1)).col(0);
  }

  /// Reverse-mode pass for a recorded forward. Accumulates dL/dparams into
  /// `param_grad` (same layout as parameters()) and returns dL/dinput.
  Matrix backward(const Tape& tape, const Eigen::Ref<const Matrix>& output_grad, Vector& param_grad) const {
    if (static_cast<int>(tape.values.size()) != num_layers() + 1) throw ShapeMismatch("tape does not match network");
    if (output_grad.rows() != output_size() || output_grad.cols() != tape.values.back().cols())
      throw ShapeMismatch("output gradient shape does not match forward pass");
    if (param_grad.size() != parameter_count()) param_grad = Vector::Zero(parameter_count());

    Matrix delta = output_grad;
    for (int l = num_layers() - 1; l >= 0; --l) {
      if (l + 1 < num_layers()) {
        const auto& a = tape.values[l + 1];
        delta = (delta.array() * (Scalar(1) - a.array().square())).matrix();
      }
      MatrixMap gW(param_grad.data() + offsets_[l], sizes_[l + 1], sizes_[l]);
      VectorMap gb(param_grad.data() + offsets_[l] + weight_count(l), sizes_[l + 1]);
      gW.noalias() += delta * tape.values[l].transpose();
      gb += delta.rowwise().sum();
      Matrix prev(sizes_[l], delta.cols());
      prev.noalias() = weight(l).transpose() * delta;
      delta = std::move(prev);
    }
    return delta;
  }

  /// dL/dinput only; skips parameter gradients.
  Matrix input_gradient(const Tape& tape, const Eigen::Ref<const Matrix>& output_grad) const {
    Matrix delta = output_grad;
    for (int l = num_layers() - 1; l >= 0; --l) {
      if (l + 1 < num_layers()) delta = (delta.array() * (Scalar(1) - tape.values[l + 1].array().square())).matrix();
      Matrix prev(sizes_[l], delta.cols());
      prev.noalias() = weight(l).transpose() * delta;
      delta = std::move(prev);
    }
    return delta;
  }

  bool operator==(const DenseNet& o) const { return sizes_ == o.sizes_ && params_ == o.params_; }

 private:
  Eigen::Index weight_count(int l) const { return static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1]; }

  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;
  Vector params_;
};

using DenseNetd = DenseNet<double>;

/// target <- (1 - tau) * target + tau * online
template <typename Scalar>
void polyak_update(DenseNet<Scalar>& target, const DenseNet<Scalar>& online, Scalar tau) {
  if (target.sizes() != online.sizes()) throw ShapeMismatch("polyak_update: networks differ in shape");
  target.parameters() = (Scalar(1) - tau) * target.parameters() + tau * online.parameters();
}

}  // namespace thermoarena::drl
