#pragma once

#include <Eigen/Core>
#include <cmath>

#include "thermoarena/errors.hpp"

namespace thermoarena::drl {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
struct AdamState {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> m;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v;
  long step = 0;

  explicit AdamState(Eigen::Index n = 0)
      : m(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n)), v(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n)) {}
  bool operator==(const AdamState&) const = default;
};

/// One bias-corrected Adam step, in place.
template <typename Scalar, typename ParamDerived, typename GradDerived>
void adam_step(Eigen::MatrixBase<ParamDerived>& params, const Eigen::MatrixBase<GradDerived>& grads,
               AdamState<Scalar>& state, Scalar lr, const AdamOptions& opt = {}) {
  if (params.size() != grads.size() || state.m.size() != params.size())
    throw ShapeMismatch("adam_step: parameter, gradient and state sizes differ");
  ++state.step;
  const Scalar b1 = static_cast<Scalar>(opt.beta1);
  const Scalar b2 = static_cast<Scalar>(opt.beta2);
  state.m = b1 * state.m + (Scalar(1) - b1) * grads;
  state.v = b2 * state.v + (Scalar(1) - b2) * grads.cwiseAbs2();
  const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
  const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));
  params -= (lr * (state.m / c1).array() / ((state.v / c2).array().sqrt() + static_cast<Scalar>(opt.epsilon))).matrix();
}

/// Rescales `grads` so its L2 norm is at most `max_norm`. Returns the original norm.
template <typename Derived>
typename Derived::Scalar clip_grad_norm(Eigen::MatrixBase<Derived>& grads, typename Derived::Scalar max_norm) {
  const auto norm = grads.norm();
  if (norm > max_norm) grads *= max_norm / (norm + typename Derived::Scalar(1e-6));
  return norm;
}

}  // namespace thermoarena::drl
