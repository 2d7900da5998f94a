#pragma once

#include <Eigen/Core>
#include <utility>

#include "thermoarena/errors.hpp"

namespace thermoarena::drl {

/// Generalized advantage estimation.
///
/// `values` holds V(s_t) for each step and `last_value` bootstraps the step
/// after the final one. `dones[t]` marks that no value flows from t+1 into t.
/// Returns (advantages, returns = advantages + values).
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> gae(
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& rewards,
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& values,
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& dones, Scalar last_value, Scalar gamma,
    Scalar lambda) {
  const Eigen::Index n = rewards.size();
  if (values.size() != n || dones.size() != n) throw LengthMismatch("gae: rewards, values and dones differ in length");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> adv(n);
  Scalar next_adv = 0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const Scalar next_value = t + 1 < n ? values(t + 1) : last_value;
    const Scalar live = Scalar(1) - dones(t);
    const Scalar delta = rewards(t) + gamma * next_value * live - values(t);
    next_adv = delta + gamma * lambda * live * next_adv;
    adv(t) = next_adv;
  }
  return {adv, adv + values};
}

}  // namespace thermoarena::drl
