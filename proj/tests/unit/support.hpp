#pragma once

#include <Eigen/Dense>
#include <doctest.h>
#include <functional>
#include <random>

namespace test {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

/// Largest relative error between `analytic` and central differences of `f` around `x`.
inline double max_fd_error(Eigen::VectorXd x, const Eigen::VectorXd& analytic,
                           const std::function<double(const Eigen::VectorXd&)>& f, double h = 1e-5) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x(i);
    x(i) = keep + h;
    const double up = f(x);
    x(i) = keep - h;
    const double down = f(x);
    x(i) = keep;
    const double fd = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(fd), std::abs(analytic(i)), 1e-6});
    worst = std::max(worst, std::abs(fd - analytic(i)) / scale);
  }
  return worst;
}

}  // namespace test
