#pragma once

// Independent reference computations used only by the tests. Nothing here
// reuses the library's closed forms.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

/// Generator restricted to the up states of the positional two-unit system:
/// state 0 = one working and one in standby, state 1 = one working and one in repair.
inline Eigen::Matrix2d warm_generator(double l1, double l2, double mu) {
  Eigen::Matrix2d q;
  q << -(l1 + l2), l1 + l2, mu, -(l1 + mu);
  return q;
}

/// P(tau > t) from the transient solution exp(Q t) 1.
inline double warm_survival(double l1, double l2, double mu, int start, double t) {
  const Eigen::Matrix2d p = (warm_generator(l1, l2, mu) * t).exp();
  return p.row(start).sum();
}

/// Density -d/dt P(tau > t) = -(exp(Qt) Q 1)_start.
inline double warm_density(double l1, double l2, double mu, int start, double t) {
  const Eigen::Matrix2d q = warm_generator(l1, l2, mu);
  const Eigen::Matrix2d p = (q * t).exp();
  return -(p * q).row(start).sum();
}

/// Four up states of the per-unit cold system, indexed like the start states:
/// 0 = C1 works/C2 waits, 1 = C2 works/C1 repair, 2 = C1 works/C2 repair, 3 = C2 works/C1 waits.
inline Eigen::Matrix4d cold_generator(double l1, double l2, double m1, double m2) {
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  q(0, 1) = l1;
  q(0, 0) = -l1;
  q(1, 3) = m1;
  q(1, 1) = -(m1 + l2);
  q(3, 2) = l2;
  q(3, 3) = -l2;
  q(2, 0) = m2;
  q(2, 2) = -(m2 + l1);
  return q;
}

inline double cold_survival(double l1, double l2, double m1, double m2, int start, double t) {
  const Eigen::Matrix4d p = (cold_generator(l1, l2, m1, m2) * t).exp();
  return p.row(start).sum();
}

/// Laplace transform of the survival: ((sI - Q)^{-1} 1)_start.
inline double cold_transform(double l1, double l2, double m1, double m2, int start, double s) {
  const Eigen::Matrix4d a = s * Eigen::Matrix4d::Identity() - cold_generator(l1, l2, m1, m2);
  const Eigen::Vector4d x = a.partialPivLu().solve(Eigen::Vector4d::Ones());
  return x(start);
}

/// Mean lifetimes: (-Q)^{-1} 1.
inline Eigen::Vector4d cold_means(double l1, double l2, double m1, double m2) {
  return (-cold_generator(l1, l2, m1, m2)).partialPivLu().solve(Eigen::Vector4d::Ones());
}

/// Log-uniform rate generator for property sweeps.
class Rates {
 public:
  explicit Rates(unsigned seed, double lo = 0.05, double hi = 20.0) : gen_(seed), lo_(std::log(lo)), hi_(std::log(hi)) {}
  double operator()() { return std::exp(std::uniform_real_distribution<double>(lo_, hi_)(gen_)); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
  bool coin() { return std::bernoulli_distribution(0.5)(gen_); }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  double lo_, hi_;
};

}  // namespace oracle
