#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "standbyrel/errors.hpp"

namespace standbyrel {

/// Real polynomial, coefficients in ascending powers of s.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> c) : c_(c) { trim(); }
  explicit Polynomial(std::vector<double> c) : c_(std::move(c)) { trim(); }

  /// s + r
  static Polynomial linear(double r) { return Polynomial{r, 1.0}; }

  const std::vector<double>& coefficients() const noexcept { return c_; }
  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  double operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }
  double leading() const { return c_.empty() ? 0.0 : c_.back(); }

  template <class T>
  T operator()(T s) const {
    T acc = T(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + T(*it);
    return acc;
  }

  Polynomial derivative() const {
    std::vector<double> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<double>(i));
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + b[i];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }
  friend Polynomial operator*(double k, const Polynomial& p) {
    std::vector<double> r = p.c_;
    for (double& x : r) x *= k;
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }

  /// Quotient and remainder of long division.
  friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den) {
    if (den.degree() < 0) throw ValidationError("polynomial division by zero");
    std::vector<double> rem = num.c_;
    const int dd = den.degree();
    if (num.degree() < dd) return {Polynomial{}, num};
    std::vector<double> q(static_cast<std::size_t>(num.degree() - dd + 1), 0.0);
    for (int k = num.degree() - dd; k >= 0; --k) {
      const double coef = rem[static_cast<std::size_t>(k + dd)] / den.leading();
      q[static_cast<std::size_t>(k)] = coef;
      for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(k + j)] -= coef * den[static_cast<std::size_t>(j)];
    }
    rem.resize(static_cast<std::size_t>(dd));
    return {Polynomial(std::move(q)), Polynomial(std::move(rem))};
  }

  /// Complex roots from the companion matrix, each polished by Newton steps.
  std::vector<std::complex<double>> roots() const {
    const int n = degree();
    if (n < 1) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c_[static_cast<std::size_t>(i)] / leading();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const Polynomial dp = derivative();
    std::vector<std::complex<double>> out;
    for (int i = 0; i < n; ++i) {
      std::complex<double> z = solver.eigenvalues()[i];
      for (int it = 0; it < 3; ++it) {
        const auto fz = (*this)(z);
        const auto dz = dp(z);
        if (std::abs(dz) < 1e-300) break;
        const auto step = fz / dz;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        // Newton on a multiple root converges slowly; accept only improvements.
        if (std::abs((*this)(z - step)) < std::abs(fz)) z -= step; else break;
      }
      out.push_back(z);
    }
    return out;
  }

  bool operator==(const Polynomial&) const = default;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }

  std::vector<double> c_;
};

/// Laplace transform of a survival function as a proper rational function
/// N(s) / D(s), deg D = deg N + 1, all poles in the open left half-plane.
class RationalLT {
 public:
  RationalLT(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.degree() != num_.degree() + 1) {
      throw ValidationError("rational transform needs deg D = deg N + 1");
    }
    poles_ = poles();
    for (const auto& p : poles_) {
      if (!(p.at.real() < 0.0)) throw ValidationError("rational transform has a pole outside the left half-plane");
    }
  }

  const Polynomial& numerator() const noexcept { return num_; }
  const Polynomial& denominator() const noexcept { return den_; }

  double operator()(double s) const { return num_(s) / den_(s); }

  /// Both polynomials scaled so D is monic.
  RationalLT normalized() const {
    const double k = 1.0 / den_.leading();
    return RationalLT(k * num_, k * den_, trusted{});
  }

  /// Time-domain inverse at t >= 0 by partial fractions. Poles within 1e-4
  /// (relative) of each other are merged and treated as one repeated pole.
  double invert(double t) const {
    if (!(t >= 0.0)) throw ValidationError("time must be nonnegative");
    double acc = 0.0;
    for (const auto& pole : poles_) acc += pole_term(pole, t).real();
    return acc;
  }

  /// Inverse of s F(s) - f(0+): the negative derivative of the survival
  /// (the density) when F is a survival transform.
  RationalLT density_transform() const {
    const Polynomial sn = Polynomial{0.0, 1.0} * num_;
    const double f0 = num_.leading() / den_.leading();
    std::vector<double> n = (f0 * den_ - sn).coefficients();
    n.resize(static_cast<std::size_t>(den_.degree()), 0.0);
    return RationalLT(Polynomial(std::move(n)),
                      den_, trusted{});
  }

 private:
  struct trusted {};
  RationalLT(Polynomial num, Polynomial den, trusted) : num_(std::move(num)), den_(std::move(den)) {
    poles_ = poles();
  }

  struct Pole {
    std::complex<double> at;
    int multiplicity;
    std::vector<std::complex<double>> coeffs;  // coeffs[k] multiplies (s - p)^{k - m}
  };

  std::vector<Pole> poles() const {
    const auto raw = den_.roots();
    std::vector<bool> used(raw.size(), false);
    std::vector<Pole> out;
    double scale = 1.0;
    for (const auto& r : raw) scale = std::max(scale, std::abs(r));
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (used[i]) continue;
      // Single-linkage cluster: a root of multiplicity m comes back scattered by about eps^(1/m).
      std::vector<std::size_t> cluster{i};
      used[i] = true;
      for (std::size_t c = 0; c < cluster.size(); ++c) {
        for (std::size_t j = 0; j < raw.size(); ++j) {
          if (!used[j] && std::abs(raw[j] - raw[cluster[c]]) < 1e-4 * scale) {
            used[j] = true;
            cluster.push_back(j);
          }
        }
      }
      std::complex<double> sum = 0.0;
      for (auto j : cluster) sum += raw[j];
      const int m = static_cast<int>(cluster.size());
      out.push_back({sum / static_cast<double>(m), m, {}});
    }
    for (auto& p : out) p.coeffs = laurent(p, out);
    return out;
  }

  /// Taylor coefficients of (s - p)^m F(s) around p, orders 0..m-1.
  std::vector<std::complex<double>> laurent(const Pole& p, const std::vector<Pole>& all) const {
    const int m = p.multiplicity;
    // Q(s) = D(s) / (s - p)^m = lead * prod over other poles (s - q)^k
    auto series_of_linear = [&](std::complex<double> q) {
      // (s - q) = (p - q) + (s - p)
      return std::vector<std::complex<double>>{p.at - q, 1.0};
    };
    auto mul = [m](const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b) {
      std::vector<std::complex<double>> r(static_cast<std::size_t>(m), 0.0);
      for (std::size_t i = 0; i < a.size() && i < r.size(); ++i)
        for (std::size_t j = 0; j < b.size() && i + j < r.size(); ++j) r[i + j] += a[i] * b[j];
      return r;
    };
    std::vector<std::complex<double>> q(static_cast<std::size_t>(m), 0.0);
    q[0] = den_.leading();
    for (const auto& other : all) {
      if (&other == &p) continue;
      for (int k = 0; k < other.multiplicity; ++k) q = mul(q, series_of_linear(other.at));
    }
    // N(s) Taylor series at p.
    std::vector<std::complex<double>> n(static_cast<std::size_t>(m), 0.0);
    Polynomial d = num_;
    double fact = 1.0;
    for (int k = 0; k < m; ++k) {
      if (k > 0) fact *= k;
      n[static_cast<std::size_t>(k)] = d(p.at) / fact;
      d = d.derivative();
    }
    // Series division n / q.
    std::vector<std::complex<double>> c(static_cast<std::size_t>(m), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      std::complex<double> acc = n[k];
      for (std::size_t j = 1; j <= k; ++j) acc -= q[j] * c[k - j];
      c[k] = acc / q[0];
    }
    return c;
  }

  /// Inverse of sum_k c_k (s - p)^{k - m}: sum_k c_k t^{m-1-k} / (m-1-k)! e^{pt}.
  static std::complex<double> pole_term(const Pole& p, double t) {
    std::complex<double> acc = 0.0;
    const int m = p.multiplicity;
    for (int k = 0; k < m; ++k) {
      const int power = m - 1 - k;
      acc += p.coeffs[static_cast<std::size_t>(k)] * std::pow(t, power) / std::tgamma(power + 1.0);
    }
    return acc * std::exp(p.at * t);
  }

  Polynomial num_;
  Polynomial den_;
  std::vector<Pole> poles_;
};

inline double invert_laplace(const RationalLT& lt, double t) { return lt.invert(t); }

namespace detail {

inline std::vector<double> stehfest_weights(int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  const int half = n / 2;
  for (int k = 1; k <= n; ++k) {
    double sum = 0.0;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      sum += std::pow(j, half) * std::tgamma(2.0 * j + 1.0) /
             (std::tgamma(half - j + 1.0) * std::tgamma(j + 1.0) * std::tgamma(j) * std::tgamma(k - j + 1.0) *
              std::tgamma(2.0 * j - k + 1.0));
    }
    v[static_cast<std::size_t>(k - 1)] = ((k + half) % 2 == 0 ? 1.0 : -1.0) * sum;
  }
  return v;
}

}  // namespace detail

/// Gaver-Stehfest inversion of a survival transform evaluated on the real
/// axis. Accurate to roughly 1e-4 for smooth survival functions at n = 14.
/// Throws AccuracyError when the result leaves [-1e-3, 1 + 1e-3].
inline double invert_laplace(const std::function<double(double)>& transform, double t, int n = 14) {
  if (!(t >= 0.0)) throw ValidationError("time must be nonnegative");
  if (n < 2 || n % 2 != 0) throw ValidationError("Stehfest order must be even and at least 2");
  double value;
  if (t == 0.0) {
    // Initial-value theorem: lim s F(s).
    const double s = 1e9;
    value = s * transform(s);
  } else {
    static thread_local int cached_n = 0;
    static thread_local std::vector<double> weights;
    if (cached_n != n) {
      weights = detail::stehfest_weights(n);
      cached_n = n;
    }
    const double ln2t = std::numbers::ln2 / t;
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += weights[static_cast<std::size_t>(k - 1)] * transform(k * ln2t);
    value = ln2t * acc;
  }
  if (!(value >= -1e-3 && value <= 1.0 + 1e-3)) {
    throw AccuracyError("Stehfest inversion left the unit interval at t = " + std::to_string(t) + " (value " +
                        std::to_string(value) + ")");
  }
  return value;
}

}  // namespace standbyrel
