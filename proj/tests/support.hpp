#pragma once

#include <random>

#include <Eigen/Dense>

#include "varalg/linalg.hpp"

namespace test_support {

// Random SPD matrix with eigenvalues in [lo, hi], via a random orthogonal
// similarity.
inline Eigen::MatrixXd random_spd_entries(std::mt19937_64& rng, int n,
                                          double lo = 0.1, double hi = 10.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> eig(lo, hi);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = eig(rng);
  const Eigen::MatrixXd m = q * d.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

inline varalg::SpdMatrix random_spd(std::mt19937_64& rng, int n,
                                    double lo = 0.1, double hi = 10.0) {
  return varalg::make_spd(random_spd_entries(rng, n, lo, hi));
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n,
                                     double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u(i) = gauss(rng);
  return u;
}

}  // namespace test_support
