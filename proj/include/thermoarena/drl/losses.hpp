#pragma once

#include <Eigen/Core>

#include "thermoarena/drl/dense_net.hpp"

namespace thermoarena::drl {

/// Stack observation and action rows into a critic input.
Eigen::MatrixXd critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions);

struct TwinCriticLoss {
  double loss = 0.0;
  Eigen::VectorXd grad_q1;
  Eigen::VectorXd grad_q2;
};

/// scale * (mean((Q1 - y)^2) + mean((Q2 - y)^2)).
TwinCriticLoss twin_critic_loss(const DenseNetd& q1, const DenseNetd& q2, const Eigen::MatrixXd& obs,
                                const Eigen::MatrixXd& actions, const Eigen::VectorXd& targets, double scale);

/// Reparameterized tanh-Gaussian sample a = tanh(mean + exp(log_std) * noise).
struct SquashedGaussian {
  static constexpr double kLogStdMin = -20.0;
  static constexpr double kLogStdMax = 2.0;

  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_std;  // clamped
  Eigen::MatrixXd std;
  Eigen::MatrixXd noise;
  Eigen::MatrixXd pre_tanh;
  Eigen::MatrixXd action;
  Eigen::MatrixXd log_std_active;  // 1 where the clamp is inactive
  Eigen::RowVectorXd log_prob;

  /// `head` stacks mean rows over raw log-std rows.
  static SquashedGaussian from_head(const Eigen::MatrixXd& head, const Eigen::MatrixXd& noise);

  /// Chain dL/daction and dL/dlog_prob back to the raw head outputs.
  Eigen::MatrixXd head_gradient(const Eigen::MatrixXd& d_action, const Eigen::RowVectorXd& d_log_prob) const;
};

/// log(1 - tanh(u)^2) without cancellation.
double log1m_tanh2(double u);

}  // namespace thermoarena::drl
