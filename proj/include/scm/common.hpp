#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace scm {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Exponent of an L^p-type norm, 1 <= p <= infinity.
class PNorm {
 public:
  explicit PNorm(double p) : p_(p) {
    if (!(p >= 1.0)) {
      throw std::invalid_argument("p must satisfy p >= 1, got " + std::to_string(p));
    }
  }

  static PNorm infinity() { return PNorm(std::numeric_limits<double>::infinity()); }

  double value() const { return p_; }
  bool is_infinite() const { return std::isinf(p_); }

  /// (p - 1) / p, with the p = infinity limit 1.
  double conjugate_ratio() const { return is_infinite() ? 1.0 : (p_ - 1.0) / p_; }

  friend bool operator==(PNorm lhs, PNorm rhs) { return lhs.p_ == rhs.p_; }

 private:
  double p_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Accumulates sum |v|^p, or max |v| for p = infinity.
class PowerAccumulator {
 public:
  explicit PowerAccumulator(PNorm p) : p_(p) {}

  void add(double v, double weight = 1.0) {
    const double a = std::abs(v);
    if (p_.is_infinite()) {
      if (a > acc_) acc_ = a;
    } else if (p_.value() == 1.0) {
      acc_ += weight * a;
    } else if (p_.value() == 2.0) {
      acc_ += weight * a * a;
    } else {
      acc_ += weight * std::pow(a, p_.value());
    }
  }

  /// Raw accumulated value: sum of weighted powers, or the max.
  double raw() const { return acc_; }

  /// (scale * sum)^(1/p), or the max.
  double result(double scale = 1.0) const {
    if (p_.is_infinite()) return acc_;
    return std::pow(scale * acc_, 1.0 / p_.value());
  }

 private:
  PNorm p_;
  double acc_ = 0.0;
};

}  // namespace scm
