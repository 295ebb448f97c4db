#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "standbyrel/errors.hpp"
#include "standbyrel/quadrature.hpp"
#include "standbyrel/rng.hpp"

namespace standbyrel {

struct Exponential {
  double rate;
  bool operator==(const Exponential&) const = default;
};

struct Deterministic {
  double value;
  bool operator==(const Deterministic&) const = default;
};

struct Weibull {
  double shape;
  double scale;
  bool operator==(const Weibull&) const = default;
};

/// Measured lifetimes; the law is the empirical measure of the sample.
struct Empirical {
  std::shared_ptr<const std::vector<double>> sorted;
  bool operator==(const Empirical& o) const {
    return sorted == o.sorted || (sorted && o.sorted && *sorted == *o.sorted);
  }
};

/// A point mass of a lifetime or repair law.
struct Atom {
  double at;
  double mass;
};

/// Nonnegative lifetime or repair-time law. Immutable after construction.
class Distribution {
 public:
  using Kind = std::variant<Exponential, Deterministic, Weibull, Empirical>;

  static Distribution exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw ValidationError("exponential rate must be positive and finite, got " + std::to_string(rate));
    }
    return Distribution(Exponential{rate});
  }

  static Distribution deterministic(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw ValidationError("deterministic time must be nonnegative and finite, got " + std::to_string(value));
    }
    return Distribution(Deterministic{value});
  }

  static Distribution weibull(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
      throw ValidationError("weibull shape and scale must be positive and finite");
    }
    return Distribution(Weibull{shape, scale});
  }

  static Distribution empirical(std::vector<double> sample) {
    if (sample.empty()) throw ValidationError("empirical sample is empty");
    for (double x : sample) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw ValidationError("empirical sample contains a negative or non-finite value");
      }
    }
    std::sort(sample.begin(), sample.end());
    return Distribution(Empirical{std::make_shared<const std::vector<double>>(std::move(sample))});
  }

  const Kind& kind() const noexcept { return kind_; }
  bool operator==(const Distribution& o) const { return kind_ == o.kind_; }

  bool is_exponential() const noexcept { return std::holds_alternative<Exponential>(kind_); }
  bool is_deterministic() const noexcept { return std::holds_alternative<Deterministic>(kind_); }
  /// True when the law has a density and no atoms.
  bool has_density() const noexcept {
    return std::holds_alternative<Exponential>(kind_) || std::holds_alternative<Weibull>(kind_);
  }

  /// P(X > t).
  double survival(double t) const {
    check_time(t);
    return std::visit(
        [t](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) {
            return std::exp(-k.rate * t);
          } else if constexpr (std::is_same_v<K, Deterministic>) {
            return t < k.value ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<K, Weibull>) {
            return std::exp(-std::pow(t / k.scale, k.shape));
          } else {
            const auto& s = *k.sorted;
            const auto above = s.end() - std::upper_bound(s.begin(), s.end(), t);
            return static_cast<double>(above) / static_cast<double>(s.size());
          }
        },
        kind_);
  }

  /// P(X <= t).
  double cdf(double t) const { return 1.0 - survival(t); }

  /// P(X < t). Differs from cdf only at atoms.
  double cdf_left(double t) const {
    check_time(t);
    if (const auto* d = std::get_if<Deterministic>(&kind_)) return t > d->value ? 1.0 : 0.0;
    if (const auto* e = std::get_if<Empirical>(&kind_)) {
      const auto& s = *e->sorted;
      const auto below = std::lower_bound(s.begin(), s.end(), t) - s.begin();
      return static_cast<double>(below) / static_cast<double>(s.size());
    }
    return cdf(t);
  }

  /// Density of the law; empty for purely atomic kinds.
  std::optional<double> density(double t) const {
    check_time(t);
    if (const auto* e = std::get_if<Exponential>(&kind_)) return e->rate * std::exp(-e->rate * t);
    if (const auto* w = std::get_if<Weibull>(&kind_)) {
      if (t == 0.0) {
        if (w->shape < 1.0) return std::numeric_limits<double>::infinity();
        return w->shape == 1.0 ? 1.0 / w->scale : 0.0;
      }
      const double z = t / w->scale;
      return w->shape / w->scale * std::pow(z, w->shape - 1.0) * std::exp(-std::pow(z, w->shape));
    }
    return std::nullopt;
  }

  /// Point masses (empty for continuous kinds).
  std::vector<Atom> atoms() const {
    if (const auto* d = std::get_if<Deterministic>(&kind_)) return {{d->value, 1.0}};
    if (const auto* e = std::get_if<Empirical>(&kind_)) {
      std::vector<Atom> out;
      const auto& s = *e->sorted;
      const double m = 1.0 / static_cast<double>(s.size());
      for (std::size_t i = 0; i < s.size();) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        out.push_back({s[i], m * static_cast<double>(j - i)});
        i = j;
      }
      return out;
    }
    return {};
  }

  double mean() const {
    return std::visit(
        [](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) {
            return 1.0 / k.rate;
          } else if constexpr (std::is_same_v<K, Deterministic>) {
            return k.value;
          } else if constexpr (std::is_same_v<K, Weibull>) {
            return k.scale * std::tgamma(1.0 + 1.0 / k.shape);
          } else {
            const auto& s = *k.sorted;
            return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
          }
        },
        kind_);
  }

  /// E[min(X, t)], the integral of the survival over [0, t].
  double partial_mean(double t) const {
    check_time(t);
    if (const auto* e = std::get_if<Exponential>(&kind_)) return -std::expm1(-e->rate * t) / e->rate;
    if (const auto* d = std::get_if<Deterministic>(&kind_)) return std::min(d->value, t);
    if (const auto* e = std::get_if<Empirical>(&kind_)) {
      double acc = 0.0;
      for (double x : *e->sorted) acc += std::min(x, t);
      return acc / static_cast<double>(e->sorted->size());
    }
    return integrate([this](double u) { return survival(u); }, 0.0, t, 1e-12).value;
  }

  /// Smallest time beyond which the survival is below `eps`.
  double upper_tail(double eps) const {
    return std::visit(
        [eps](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) {
            return -std::log(eps) / k.rate;
          } else if constexpr (std::is_same_v<K, Deterministic>) {
            return k.value;
          } else if constexpr (std::is_same_v<K, Weibull>) {
            return k.scale * std::pow(-std::log(eps), 1.0 / k.shape);
          } else {
            return k.sorted->back();
          }
        },
        kind_);
  }

  /// Characteristic rate used to scale time grids.
  double rate_scale() const {
    if (const auto* e = std::get_if<Exponential>(&kind_)) return e->rate;
    const double m = mean();
    return m > 0.0 ? 1.0 / m : 1.0;
  }

  /// Inverse-transform draw (resampling for Empirical).
  double sample(Rng& rng) const {
    return std::visit(
        [&rng](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) {
            return -std::log(rng.uniform()) / k.rate;
          } else if constexpr (std::is_same_v<K, Deterministic>) {
            return k.value;
          } else if constexpr (std::is_same_v<K, Weibull>) {
            return k.scale * std::pow(-std::log(rng.uniform()), 1.0 / k.shape);
          } else {
            return (*k.sorted)[rng.index(k.sorted->size())];
          }
        },
        kind_);
  }

  /// Laplace transform of the survival function, s >= 0.
  double laplace_survival(double s) const {
    if (s < 0.0) throw ValidationError("laplace_survival: s must be nonnegative");
    if (s == 0.0) return mean();
    if (const auto* e = std::get_if<Exponential>(&kind_)) return 1.0 / (s + e->rate);
    if (const auto* d = std::get_if<Deterministic>(&kind_)) return -std::expm1(-s * d->value) / s;
    if (const auto* e = std::get_if<Empirical>(&kind_)) {
      double acc = 0.0;
      for (double x : *e->sorted) acc += -std::expm1(-s * x);
      return acc / (static_cast<double>(e->sorted->size()) * s);
    }
    const double hi = upper_tail(1e-16);
    return integrate([&](double t) { return std::exp(-s * t) * survival(t); }, 0.0, hi, 1e-12).value;
  }

  /// E[exp(-s X)].
  double laplace_stieltjes(double s) const {
    if (s < 0.0) throw ValidationError("laplace_stieltjes: s must be nonnegative");
    if (const auto* e = std::get_if<Exponential>(&kind_)) return e->rate / (s + e->rate);
    if (const auto* d = std::get_if<Deterministic>(&kind_)) return std::exp(-s * d->value);
    if (const auto* e = std::get_if<Empirical>(&kind_)) {
      double acc = 0.0;
      for (double x : *e->sorted) acc += std::exp(-s * x);
      return acc / static_cast<double>(e->sorted->size());
    }
    return 1.0 - s * laplace_survival(s);
  }

  /// Literal accepted by parse_distribution.
  std::string literal() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) {
            os << "exp:" << k.rate;
          } else if constexpr (std::is_same_v<K, Deterministic>) {
            os << "det:" << k.value;
          } else if constexpr (std::is_same_v<K, Weibull>) {
            os << "weibull:" << k.shape << ',' << k.scale;
          } else {
            os << "emp:<" << k.sorted->size() << " samples>";
          }
        },
        kind_);
    return os.str();
  }

 private:
  explicit Distribution(Kind k) : kind_(std::move(k)) {}

  static void check_time(double t) {
    if (!(t >= 0.0)) throw ValidationError("time must be nonnegative, got " + std::to_string(t));
  }

  Kind kind_;
};

namespace detail {

inline double parse_number(std::string_view token, std::string_view whole) {
  double v = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || token.empty()) {
    throw ValidationError("malformed number '" + std::string(token) + "' in '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace detail

/// Reads one nonnegative float per line; blank lines are skipped.
inline std::vector<double> read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open sample file '" + path + "'");
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.push_back(detail::parse_number(std::string_view(line).substr(b, e - b + 1), path));
  }
  return out;
}

/// Parses `exp:RATE`, `det:T`, `weibull:SHAPE,SCALE`, `emp:PATH`.
inline Distribution parse_distribution(std::string_view literal) {
  const auto colon = literal.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("unknown distribution literal '" + std::string(literal) + "'");
  }
  const auto tag = literal.substr(0, colon);
  const auto body = literal.substr(colon + 1);
  if (tag == "exp") return Distribution::exponential(detail::parse_number(body, literal));
  if (tag == "det") return Distribution::deterministic(detail::parse_number(body, literal));
  if (tag == "weibull") {
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) {
      throw ValidationError("weibull literal needs SHAPE,SCALE: '" + std::string(literal) + "'");
    }
    return Distribution::weibull(detail::parse_number(body.substr(0, comma), literal),
                                 detail::parse_number(body.substr(comma + 1), literal));
  }
  if (tag == "emp") return Distribution::empirical(read_sample_file(std::string(body)));
  throw ValidationError("unknown distribution literal '" + std::string(literal) + "'");
}

/// P(X > Y) for independent X, Y. Ties count as "not greater".
inline double prob_greater(const Distribution& x, const Distribution& y) {
  const auto* ex = std::get_if<Exponential>(&x.kind());
  if (ex) {
    if (const auto* ey = std::get_if<Exponential>(&y.kind())) return ey->rate / (ex->rate + ey->rate);
    if (const auto* dy = std::get_if<Deterministic>(&y.kind())) return std::exp(-ex->rate * dy->value);
  }
  if (const auto* dx = std::get_if<Deterministic>(&x.kind())) return y.cdf_left(dx->value);
  if (const auto* emx = std::get_if<Empirical>(&x.kind())) {
    double acc = 0.0;
    for (double v : *emx->sorted) acc += y.cdf_left(v);
    return acc / static_cast<double>(emx->sorted->size());
  }
  // x is continuous from here on.
  double total = 0.0;
  for (const auto& a : y.atoms()) total += a.mass * x.survival(a.at);
  if (y.has_density()) {
    const double hi = std::max(x.upper_tail(1e-12), y.upper_tail(1e-12));
    const auto q = integrate([&](double t) { return x.survival(t) * *y.density(t); }, 0.0, hi, 1e-10);
    total += q.value;
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace standbyrel
